use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_tts, BootstrapEstimate};
use super::empirical::FirstPassageEmpirical;
use crate::hash::derive_u64;
use crate::{Error, Result};

/// Minimum number of finite grid points for a meaningful optimum.
pub const MIN_FINITE_POINTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsPoint {
    pub t_f: f64,
    #[serde(with = "super::ext_f64")]
    pub tts_mean: f64,
    #[serde(with = "super::ext_f64")]
    pub tts_sigma: f64,
}

impl TtsPoint {
    pub fn from_estimate(t_f: f64, est: &BootstrapEstimate) -> Self {
        TtsPoint {
            t_f,
            tts_mean: est.mean,
            tts_sigma: est.sigma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptTts {
    pub t_f: f64,
    pub tts: f64,
    pub sigma: f64,
    /// The minimiser is the first or last grid point.
    pub boundary_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsCurve {
    pub size: usize,
    pub quantile: f64,
    pub f_p: f64,
    pub grid: Vec<TtsPoint>,
    pub opt: Option<OptTts>,
}

/// Minimum of the mean TTS over a strictly increasing grid; ties go to the
/// smaller runtime.
pub fn opt_tts(grid: &[TtsPoint]) -> Result<OptTts> {
    if grid.windows(2).any(|w| !(w[0].t_f < w[1].t_f)) {
        return Err(Error::InvalidParameter("t_f grid must be strictly increasing".into()));
    }
    let finite = grid.iter().filter(|p| p.tts_mean.is_finite()).count();
    if finite == 0 {
        return Err(Error::AllInfinite);
    }
    if finite < MIN_FINITE_POINTS {
        return Err(Error::InsufficientData(format!(
            "{finite} finite grid points, need {MIN_FINITE_POINTS}"
        )));
    }
    let mut best = 0;
    for (i, p) in grid.iter().enumerate() {
        if p.tts_mean < grid[best].tts_mean || !grid[best].tts_mean.is_finite() {
            best = i;
        }
    }
    let p = grid[best];
    Ok(OptTts {
        t_f: p.t_f,
        tts: p.tts_mean,
        sigma: p.tts_sigma,
        boundary_flag: best == 0 || best == grid.len() - 1,
    })
}

/// Bootstrapped TTS curve of one size over `grid`; each grid point uses its
/// own seed derived from `seed` and the point index. A grid runtime beyond
/// some instance's every cutoff is an error. `opt` is `None` when the curve
/// has too few finite points.
pub fn tts_curve(
    instances: &[FirstPassageEmpirical],
    grid: &[f64],
    size: usize,
    q: f64,
    f_p: f64,
    resamples: usize,
    seed: u64,
) -> Result<TtsCurve> {
    let mut points = Vec::with_capacity(grid.len());
    for (k, &t_f) in grid.iter().enumerate() {
        let counts = instances
            .iter()
            .map(|inst| {
                let c = inst.counts_at(t_f)?;
                if c.runs == 0 {
                    return Err(Error::InsufficientData(format!(
                        "every run of {} is censored below t_f = {t_f}",
                        inst.instance_id
                    )));
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?;
        let s = derive_u64(&[&seed.to_string(), &k.to_string()]);
        let est = bootstrap_tts(&counts, t_f, q, f_p, resamples, s)?;
        points.push(TtsPoint::from_estimate(t_f, &est));
    }
    let opt = match opt_tts(&points) {
        Ok(o) => Some(o),
        Err(Error::AllInfinite | Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TtsCurve {
        size,
        quantile: q,
        f_p,
        grid: points,
        opt,
    })
}

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::posterior::SuccessPosterior;
use super::quantile::quantile_sorted;
use super::tts::{tts_point, tts_unchecked};
use crate::rng::stream_rng;
use crate::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 1000;

/// Mean and 1σ spread of the bootstrapped TTS quantile. When any resample
/// quantile is `+∞` the mean and sigma are `+∞` and `infinite` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEstimate {
    #[serde(with = "super::ext_f64")]
    pub mean: f64,
    #[serde(with = "super::ext_f64")]
    pub sigma: f64,
    pub infinite: bool,
    /// Fraction of resamples whose quantile is `+∞`.
    pub infinite_fraction: f64,
}

/// Bayesian bootstrap of the `q`-quantile of per-instance TTS at runtime
/// `t_f`. Each resample draws the instances with replacement and a success
/// probability for each from its Jeffreys posterior. An instance with no
/// observed success contributes `+∞`.
pub fn bootstrap_tts(
    counts: &[SuccessPosterior],
    t_f: f64,
    q: f64,
    f_p: f64,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapEstimate> {
    if counts.is_empty() {
        return Err(Error::InsufficientData("bootstrap over zero instances".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile level must lie in (0, 1), got {q}"
        )));
    }
    if resamples == 0 {
        return Err(Error::InvalidParameter("at least one resample is required".into()));
    }
    tts_point(t_f, 0.5, f_p)?;
    let dists: Vec<_> = counts
        .iter()
        .map(|c| (c.successes > 0).then(|| c.distribution()))
        .collect();
    let mut rng = stream_rng(seed, 0);
    let mut sample = vec![0.0; counts.len()];
    let mut quantiles = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for v in sample.iter_mut() {
            let i = rng.random_range(0..dists.len());
            *v = match &dists[i] {
                Some(d) => tts_unchecked(t_f, d.sample(&mut rng), f_p),
                None => f64::INFINITY,
            };
        }
        sample.sort_by(f64::total_cmp);
        quantiles.push(quantile_sorted(&sample, q));
    }
    let inf = quantiles.iter().filter(|v| v.is_infinite()).count();
    if inf > 0 {
        return Ok(BootstrapEstimate {
            mean: f64::INFINITY,
            sigma: f64::INFINITY,
            infinite: true,
            infinite_fraction: inf as f64 / resamples as f64,
        });
    }
    let r = resamples as f64;
    let mean = quantiles.iter().sum::<f64>() / r;
    let sigma = if resamples > 1 {
        (quantiles.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(BootstrapEstimate {
        mean,
        sigma,
        infinite: false,
        infinite_fraction: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(runs: u64, s: u64, k: usize) -> Vec<SuccessPosterior> {
        vec![SuccessPosterior::new(runs, s).unwrap(); k]
    }

    #[test]
    fn certain_success() {
        let est = bootstrap_tts(&all(100, 100, 20), 10.0, 0.5, 2.0, 500, 1).unwrap();
        assert!(!est.infinite);
        assert!((est.mean - 5.0).abs() < 1e-9, "{est:?}");
        assert!(est.sigma < 1e-9);
    }

    #[test]
    fn no_success_is_infinite_and_flagged() {
        let est = bootstrap_tts(&all(100, 0, 5), 1.0, 0.5, 1.0, 200, 3).unwrap();
        assert!(est.infinite);
        assert_eq!(est.mean, f64::INFINITY);
        assert_eq!(est.infinite_fraction, 1.0);
    }

    #[test]
    fn partial_failure_gives_infinite_fraction() {
        let mut c = all(100, 50, 3);
        c.extend(all(100, 0, 2));
        let est = bootstrap_tts(&c, 1.0, 0.5, 1.0, 2000, 5).unwrap();
        assert!(est.infinite);
        // median of 5 draws is infinite iff at least 3 draws hit a zero-success instance
        let p: f64 = 0.4;
        let exact: f64 = (3..=5)
            .map(|k| {
                let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0][k];
                binom * p.powi(k as i32) * (1.0 - p).powi(5 - k as i32)
            })
            .sum();
        let sd = (exact * (1.0 - exact) / 2000.0).sqrt();
        assert!(
            (est.infinite_fraction - exact).abs() < 4.0 * sd,
            "{} vs {exact}",
            est.infinite_fraction
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let c: Vec<_> = (0..30).map(|i| SuccessPosterior::new(50, i).unwrap()).collect();
        let a = bootstrap_tts(&c, 3.0, 0.5, 1.0, 300, 9).unwrap();
        let b = bootstrap_tts(&c, 3.0, 0.5, 1.0, 300, 9).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
        assert_ne!(a, bootstrap_tts(&c, 3.0, 0.5, 1.0, 300, 10).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        let c = all(10, 5, 3);
        assert!(bootstrap_tts(&[], 1.0, 0.5, 1.0, 10, 0).is_err());
        assert!(bootstrap_tts(&c, 1.0, 0.0, 1.0, 10, 0).is_err());
        assert!(bootstrap_tts(&c, 1.0, 1.0, 1.0, 10, 0).is_err());
        assert!(bootstrap_tts(&c, 0.0, 0.5, 1.0, 10, 0).is_err());
        assert!(bootstrap_tts(&c, 1.0, 0.5, 0.0, 10, 0).is_err());
        assert!(bootstrap_tts(&c, 1.0, 0.5, 1.0, 0, 0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_WINDOW: usize = 3;

/// One size of the scaling data: `log10` of a TTS quantile and its 1σ error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: f64,
    pub log10_tts: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "policy")]
pub enum WindowPolicy {
    /// Grow outward from the two middle sizes while each added point moves
    /// `α` by at most its current 1σ.
    Auto,
    /// Sizes in `[min_n, max_n]`.
    Manual { min_n: f64, max_n: f64 },
}

/// `log10 TTS = α n + β`, with 2σ half-widths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub alpha: f64,
    pub alpha_2sigma: f64,
    pub beta: f64,
    pub beta_2sigma: f64,
    pub window: Vec<f64>,
    pub quantile: Option<f64>,
    pub chi2: f64,
    pub policy: WindowPolicy,
}

impl ScalingFit {
    pub fn alpha_ci(&self) -> (f64, f64) {
        (self.alpha - self.alpha_2sigma, self.alpha + self.alpha_2sigma)
    }

    pub fn beta_ci(&self) -> (f64, f64) {
        (self.beta - self.beta_2sigma, self.beta + self.beta_2sigma)
    }
}

#[derive(Clone, Copy, Debug)]
struct Line {
    alpha: f64,
    beta: f64,
    var_alpha: f64,
    var_beta: f64,
    chi2: f64,
}

/// Weighted least squares with weights `1/σ²`. The parameter covariance is
/// `(XᵀWX)⁻¹` scaled by the reduced chi-square when that exceeds one.
fn wls(points: &[ScalingPoint]) -> Line {
    let sw: f64 = points.iter().map(|p| p.sigma.powi(-2)).sum();
    let xm = points.iter().map(|p| p.n * p.sigma.powi(-2)).sum::<f64>() / sw;
    let ym = points.iter().map(|p| p.log10_tts * p.sigma.powi(-2)).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for p in points {
        let w = p.sigma.powi(-2);
        sxx += w * (p.n - xm) * (p.n - xm);
        sxy += w * (p.n - xm) * (p.log10_tts - ym);
    }
    let alpha = sxy / sxx;
    let beta = ym - alpha * xm;
    let chi2: f64 = points
        .iter()
        .map(|p| ((p.log10_tts - alpha * p.n - beta) / p.sigma).powi(2))
        .sum();
    let dof = points.len().saturating_sub(2);
    let scale = if dof > 0 { (chi2 / dof as f64).max(1.0) } else { 1.0 };
    let var_alpha = scale / sxx;
    Line {
        alpha,
        beta,
        var_alpha,
        var_beta: scale / sw + xm * xm * var_alpha,
        chi2,
    }
}

fn auto_window(points: &[ScalingPoint]) -> (usize, usize) {
    let k = points.len();
    let mut lo = (k - 1) / 2;
    let mut hi = lo + 1;
    let (mut down, mut up) = (lo > 0, hi + 1 < k);
    while down || up {
        if down {
            let cur = wls(&points[lo..=hi]);
            let ext = wls(&points[lo - 1..=hi]);
            if (ext.alpha - cur.alpha).abs() <= cur.var_alpha.sqrt() {
                lo -= 1;
                down = lo > 0;
            } else {
                down = false;
            }
        }
        if up {
            let cur = wls(&points[lo..=hi]);
            let ext = wls(&points[lo..=hi + 1]);
            if (ext.alpha - cur.alpha).abs() <= cur.var_alpha.sqrt() {
                hi += 1;
                up = hi + 1 < k;
            } else {
                up = false;
            }
        }
    }
    // a window below the minimum takes the neighbour that moves α least
    while hi - lo + 1 < MIN_WINDOW.min(k) {
        let cur = wls(&points[lo..=hi]).alpha;
        let shift = |a: usize, b: usize| (wls(&points[a..=b]).alpha - cur).abs();
        match (lo > 0, hi + 1 < k) {
            (true, true) if shift(lo - 1, hi) <= shift(lo, hi + 1) => lo -= 1,
            (true, false) => lo -= 1,
            _ => hi += 1,
        }
    }
    (lo, hi)
}

/// Exponential scaling fit of `log10 TTS` against `n` over a window chosen
/// by `policy`. Sizes must be distinct; points are sorted by size.
pub fn scaling_fit(points: &[ScalingPoint], policy: WindowPolicy) -> Result<ScalingFit> {
    if points.len() < MIN_WINDOW {
        return Err(Error::InsufficientData(format!(
            "{} scaling points, need {MIN_WINDOW}",
            points.len()
        )));
    }
    for p in points {
        if !(p.n.is_finite() && p.log10_tts.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite scaling point at n = {}",
                p.n
            )));
        }
        if !(p.sigma > 0.0 && p.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive at n = {}",
                p.n
            )));
        }
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.n.total_cmp(&b.n));
    if pts.windows(2).any(|w| w[0].n == w[1].n) {
        return Err(Error::InvalidParameter("duplicate sizes in scaling data".into()));
    }
    let window: Vec<ScalingPoint> = match policy {
        WindowPolicy::Auto => {
            let (lo, hi) = auto_window(&pts);
            pts[lo..=hi].to_vec()
        }
        WindowPolicy::Manual { min_n, max_n } => pts.iter().copied().filter(|p| p.n >= min_n && p.n <= max_n).collect(),
    };
    if window.len() < MIN_WINDOW {
        return Err(Error::InsufficientData(format!(
            "fit window holds {} points, need {MIN_WINDOW}",
            window.len()
        )));
    }
    let line = wls(&window);
    Ok(ScalingFit {
        alpha: line.alpha,
        alpha_2sigma: 2.0 * line.var_alpha.sqrt(),
        beta: line.beta,
        beta_2sigma: 2.0 * line.var_beta.sqrt(),
        window: window.iter().map(|p| p.n).collect(),
        quantile: None,
        chi2: line.chi2,
        policy,
    })
}

use crate::{Error, Result};

/// Probability of at least one success the repetition count targets.
pub const TARGET_PROBABILITY: f64 = 0.99;

/// Unclamped repetition count `ln(1 − 0.99) / ln(1 − p)`; `+∞` at `p = 0` and
/// `0` at `p = 1`.
pub fn repetitions(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    if p >= 1.0 {
        return 0.0;
    }
    // 1 − p is exact for p ≥ 0.5; ln_1p keeps precision for small p
    let log_fail = if p >= 0.5 { (1.0 - p).ln() } else { (-p).ln_1p() };
    (1.0 - TARGET_PROBABILITY).ln() / log_fail
}

/// Time to solution with 99% confidence for runs of length `t_f` that succeed
/// with probability `p`, on a device hosting `f_p` independent replicas. The
/// repetition count is not rounded but is clamped to at least one run before
/// dividing by `f_p`.
pub fn tts_point(t_f: f64, p: f64, f_p: f64) -> Result<f64> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_f must be positive, got {t_f}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    if !(f_p >= 1.0 && f_p.is_finite()) {
        return Err(Error::InvalidParameter(format!("f_p must be ≥ 1, got {f_p}")));
    }
    Ok(tts_unchecked(t_f, p, f_p))
}

#[inline]
pub(crate) fn tts_unchecked(t_f: f64, p: f64, f_p: f64) -> f64 {
    t_f * repetitions(p).max(1.0) / f_p
}

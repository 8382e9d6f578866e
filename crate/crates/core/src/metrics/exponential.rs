use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::empirical::FirstPassageEmpirical;
use super::tts::TARGET_PROBABILITY;
use crate::{Error, Result};

pub const MIN_UNCENSORED: usize = 10;

/// Exponential first-passage model `P[T > t] = exp(−t/τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub tau: f64,
    /// Two-sided 2σ interval from the chi-squared law of the estimator.
    pub tau_ci: (f64, f64),
    /// Largest distance between the Kaplan–Meier survival curve and
    /// `exp(−t/τ)` over the observed time range.
    pub ks_distance: f64,
    pub successes: usize,
    pub censored: usize,
}

impl ExponentialFit {
    /// Runtime after which a single run has succeeded with 99% probability,
    /// `τ ln 100`.
    pub fn tts(&self) -> f64 {
        -self.tau * (1.0 - TARGET_PROBABILITY).ln()
    }
}

/// Maximum-likelihood `τ` for right-censored exponential data: total
/// observed time over the number of successes.
pub fn exponential_tau(passages: &[f64], censored: &[f64]) -> Result<ExponentialFit> {
    let k = passages.len();
    if k == 0 {
        return Err(Error::ZeroSuccesses);
    }
    if k < MIN_UNCENSORED {
        return Err(Error::InsufficientData(format!(
            "{k} uncensored samples, need {MIN_UNCENSORED}"
        )));
    }
    let emp = FirstPassageEmpirical::new("", passages.to_vec(), censored.to_vec())?;
    let total: f64 = emp.passages.iter().chain(&emp.censored).sum();
    let tau = total / k as f64;
    let tail = Normal::standard().cdf(-2.0);
    let chi = ChiSquared::new(2.0 * k as f64).expect("positive degrees of freedom");
    let tau_ci = (
        2.0 * total / chi.inverse_cdf(1.0 - tail),
        2.0 * total / chi.inverse_cdf(tail),
    );
    Ok(ExponentialFit {
        tau,
        tau_ci,
        ks_distance: ks_distance(&emp, tau),
        successes: k,
        censored: emp.censored.len(),
    })
}

pub fn exponential_tau_empirical(emp: &FirstPassageEmpirical) -> Result<ExponentialFit> {
    exponential_tau(&emp.passages, &emp.censored)
}

/// Kaplan–Meier survival against `exp(−t/τ)`; runs censored at an event time
/// are still at risk at that time.
fn ks_distance(emp: &FirstPassageEmpirical, tau: f64) -> f64 {
    let model = |t: f64| (-t / tau).exp();
    let (ev, ce) = (&emp.passages, &emp.censored);
    let mut at_risk = (ev.len() + ce.len()) as f64;
    let mut surv = 1.0f64;
    let mut d = 0.0f64;
    let (mut i, mut j) = (0, 0);
    while i < ev.len() {
        let t = ev[i];
        while j < ce.len() && ce[j] < t {
            at_risk -= 1.0;
            j += 1;
        }
        let mut deaths = 0.0;
        while i < ev.len() && ev[i] == t {
            deaths += 1.0;
            i += 1;
        }
        let m = model(t);
        d = d.max((surv - m).abs());
        surv *= 1.0 - deaths / at_risk;
        d = d.max((surv - m).abs());
        at_risk -= deaths;
    }
    let last = ev.last().copied().unwrap_or(0.0).max(ce.last().copied().unwrap_or(0.0));
    d.max((surv - model(last)).abs())
}

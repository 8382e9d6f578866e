use rand_distr::Beta;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Jeffreys prior pseudo-count for both outcomes.
pub const JEFFREYS: f64 = 0.5;

/// Beta posterior of a per-instance success probability under the Jeffreys
/// prior: `Beta(0.5 + n_S, 0.5 + N − n_S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessPosterior {
    pub runs: u64,
    pub successes: u64,
}

impl SuccessPosterior {
    pub fn new(runs: u64, successes: u64) -> Result<Self> {
        if successes > runs {
            return Err(Error::InvalidParameter(format!(
                "{successes} successes out of {runs} runs"
            )));
        }
        Ok(SuccessPosterior { runs, successes })
    }

    pub fn prior() -> Self {
        SuccessPosterior { runs: 0, successes: 0 }
    }

    pub fn alpha(&self) -> f64 {
        JEFFREYS + self.successes as f64
    }

    pub fn beta(&self) -> f64 {
        JEFFREYS + (self.runs - self.successes) as f64
    }

    /// `(n_S + 0.5) / (N + 1)`.
    pub fn mean(&self) -> f64 {
        self.alpha() / (self.alpha() + self.beta())
    }

    pub fn distribution(&self) -> Beta<f64> {
        Beta::new(self.alpha(), self.beta()).expect("shape parameters are at least 0.5")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_mean_is_half() {
        assert_eq!(SuccessPosterior::prior().mean(), 0.5);
    }

    #[test]
    fn mean_matches_closed_form() {
        for runs in 0..40u64 {
            for s in 0..=runs {
                let p = SuccessPosterior::new(runs, s).unwrap();
                assert_eq!(p.mean(), (s as f64 + 0.5) / (runs as f64 + 1.0));
            }
        }
    }

    #[test]
    fn rejects_excess_successes() {
        assert!(SuccessPosterior::new(3, 4).is_err());
    }
}

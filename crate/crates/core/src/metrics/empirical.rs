use serde::{Deserialize, Serialize};

use super::posterior::SuccessPosterior;
use crate::solvers::FirstPassageRecord;
use crate::{Error, Result};

/// First-passage times of one instance: successful runs by their passage
/// time, failed runs by the cutoff they were censored at. Both ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstPassageEmpirical {
    pub instance_id: String,
    pub passages: Vec<f64>,
    pub censored: Vec<f64>,
}

fn sorted_checked(mut v: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if let Some(bad) = v.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{what} time {bad} is not a finite non-negative value"
        )));
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

impl FirstPassageEmpirical {
    pub fn new(instance_id: impl Into<String>, passages: Vec<f64>, censored: Vec<f64>) -> Result<Self> {
        Ok(FirstPassageEmpirical {
            instance_id: instance_id.into(),
            passages: sorted_checked(passages, "first-passage")?,
            censored: sorted_checked(censored, "censoring")?,
        })
    }

    /// Collects the records of one instance, measuring time in solver steps
    /// multiplied by `time_per_step`.
    pub fn from_records(records: &[FirstPassageRecord], time_per_step: f64) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::InsufficientData("no records for instance".into()))?;
        if !(time_per_step > 0.0 && time_per_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time per step must be positive, got {time_per_step}"
            )));
        }
        let mut passages = Vec::new();
        let mut censored = Vec::new();
        for r in records {
            if r.instance_id != first.instance_id {
                return Err(Error::InvalidParameter(format!(
                    "records mix instances {} and {}",
                    first.instance_id, r.instance_id
                )));
            }
            match (r.success, r.steps_to_solution) {
                (true, Some(s)) if s <= r.cutoff_steps => passages.push(s as f64 * time_per_step),
                (false, None) => censored.push(r.cutoff_steps as f64 * time_per_step),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "inconsistent record for seed {} of {}",
                        r.seed, r.instance_id
                    )))
                }
            }
        }
        Self::new(first.instance_id.clone(), passages, censored)
    }

    pub fn runs(&self) -> usize {
        self.passages.len() + self.censored.len()
    }

    /// Largest runtime at which every run carries information.
    pub fn min_cutoff(&self) -> Option<f64> {
        self.censored.first().copied()
    }

    /// Success counts at runtime `t_f`: a run succeeds if its first passage is
    /// at most `t_f`; failed runs censored below `t_f` are dropped.
    pub fn counts_at(&self, t_f: f64) -> Result<SuccessPosterior> {
        if !(t_f > 0.0) {
            return Err(Error::InvalidParameter(format!("t_f must be positive, got {t_f}")));
        }
        let succ = self.passages.partition_point(|&t| t <= t_f);
        let late = self.passages.len() - succ;
        let informative = self.censored.len() - self.censored.partition_point(|&c| c < t_f);
        SuccessPosterior::new((succ + late + informative) as u64, succ as u64)
    }
}

/// `(N, n_S)` for the records of one instance at runtime `t_f`, in steps.
pub fn success_counts_at(records: &[FirstPassageRecord], t_f: f64) -> Result<(u64, u64)> {
    let c = FirstPassageEmpirical::from_records(records, 1.0)?.counts_at(t_f)?;
    Ok((c.runs, c.successes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::SolverId;
    use rand::Rng;

    fn record(steps: Option<u64>, cutoff: u64) -> FirstPassageRecord {
        let mut r = FirstPassageRecord::new(SolverId::Pt, 0, cutoff);
        r.instance_id = "x".into();
        if let Some(s) = steps {
            r.success = true;
            r.steps_to_solution = Some(s);
        }
        r
    }

    #[test]
    fn direct_count() {
        let recs = [record(Some(3), 100), record(Some(7), 100), record(None, 100)];
        assert_eq!(success_counts_at(&recs, 5.0).unwrap(), (3, 1));
        assert_eq!(success_counts_at(&recs, 2.0).unwrap(), (3, 0));
        assert_eq!(success_counts_at(&recs, 7.0).unwrap(), (3, 2));
    }

    #[test]
    fn early_censoring_is_dropped() {
        let recs = [record(Some(3), 10), record(None, 4), record(None, 50)];
        assert_eq!(success_counts_at(&recs, 5.0).unwrap(), (2, 1));
        assert_eq!(success_counts_at(&recs, 4.0).unwrap(), (3, 1));
    }

    #[test]
    fn errors() {
        assert!(success_counts_at(&[], 5.0).is_err());
        let mut other = record(None, 9);
        other.instance_id = "y".into();
        assert!(success_counts_at(&[record(None, 9), other], 5.0).is_err());
        assert!(success_counts_at(&[record(None, 9)], 0.0).is_err());
    }

    #[test]
    fn law_of_large_numbers() {
        let p = 0.3;
        let n = 10_000usize;
        let mut rng = crate::rng::stream_rng(17, 0);
        let recs: Vec<_> = (0..n)
            .map(|_| {
                if rng.random_bool(p) {
                    record(Some(1), 2)
                } else {
                    record(None, 2)
                }
            })
            .collect();
        let (runs, s) = success_counts_at(&recs, 1.0).unwrap();
        assert_eq!(runs, n as u64);
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((s as f64 / n as f64 - p).abs() < 3.0 * sd);
    }
}

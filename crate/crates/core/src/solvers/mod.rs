//! Heuristic solvers behind a common first-passage interface.
//!
//! Every solver counts time in its own native step: PT steps (sweeps plus a
//! swap pass), rejection-free MC iterations, Euler steps, or single-variable
//! quasi-greedy moves. Converting steps to wall time is left to a per-step
//! cost model kept outside the records, so records stay reproducible.

pub mod acceptance;
pub mod dau;
pub mod pt;
pub mod quasigreedy;
pub mod sb;
pub mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::InstanceBundle;
use crate::{Error, Result};

pub use acceptance::{metropolis_flip_prob, swap_accept_prob};
pub use dau::{adapt_temperatures, dau_run, dau_step, DauParams, OffsetMode};
pub use pt::{pt_run, PtParams};
pub use quasigreedy::{quasigreedy_run, QgParams};
pub use sb::{sb_run, CouplingScale, SbParams};
pub use state::SpinState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Pt,
    Dau,
    Sb,
    Qg,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Pt => "pt",
            SolverId::Dau => "dau",
            SolverId::Sb => "sb",
            SolverId::Qg => "qg",
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pt" => Ok(SolverId::Pt),
            "dau" => Ok(SolverId::Dau),
            "sb" => Ok(SolverId::Sb),
            "qg" => Ok(SolverId::Qg),
            other => Err(Error::InvalidParameter(format!("unknown solver '{other}'"))),
        }
    }
}

/// Configuration found at the first passage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Spins(Vec<i8>),
    Bits(Vec<u8>),
}

/// Outcome of one solver execution.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstPassageRecord {
    pub solver_id: SolverId,
    /// Empty when the solver was called directly on an Ising/native instance;
    /// filled in by [`SolverConfig::run`].
    pub instance_id: String,
    pub seed: u64,
    /// Native steps until the target was first observed.
    pub steps_to_solution: Option<u64>,
    pub success: bool,
    pub cutoff_steps: u64,
    /// Native steps actually executed (for the per-step cost model).
    pub steps_run: u64,
    /// Measured wall time per step; only set when timing is requested.
    pub per_step_cost_ns: Option<f64>,
    pub flags: Vec<String>,
    pub solution: Option<Solution>,
}

impl FirstPassageRecord {
    pub(crate) fn new(solver_id: SolverId, seed: u64, cutoff_steps: u64) -> Self {
        FirstPassageRecord {
            solver_id,
            instance_id: String::new(),
            seed,
            steps_to_solution: None,
            success: false,
            cutoff_steps,
            steps_run: 0,
            per_step_cost_ns: None,
            flags: Vec::new(),
            solution: None,
        }
    }

    pub(crate) fn solved(&mut self, step: u64, solution: Solution) {
        self.steps_to_solution = Some(step);
        self.success = true;
        self.solution = Some(solution);
    }

    /// Re-evaluates the recorded configuration from scratch.
    pub fn verify(&self, bundle: &InstanceBundle) -> bool {
        if !self.success {
            return self.solution.is_none();
        }
        match &self.solution {
            Some(Solution::Spins(s)) => bundle.ising.energy(s).ok() == Some(bundle.ising.ground_energy),
            Some(Solution::Bits(b)) => b.len() == bundle.xorsat.m && bundle.xorsat.violated(b) == 0,
            None => false,
        }
    }
}

/// Parameters of any solver, tagged by solver id in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", content = "params", rename_all = "lowercase")]
pub enum SolverConfig {
    Pt(PtParams),
    Dau(DauParams),
    Sb(SbParams),
    Qg(QgParams),
}

impl SolverConfig {
    pub fn solver_id(&self) -> SolverId {
        match self {
            SolverConfig::Pt(_) => SolverId::Pt,
            SolverConfig::Dau(_) => SolverId::Dau,
            SolverConfig::Sb(_) => SolverId::Sb,
            SolverConfig::Qg(_) => SolverId::Qg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SolverConfig::Pt(p) => p.validate(),
            SolverConfig::Dau(p) => p.validate(),
            SolverConfig::Sb(p) => p.validate(),
            SolverConfig::Qg(p) => p.validate(),
        }
    }

    /// Native-step budget of one execution.
    pub fn cutoff(&self) -> u64 {
        match self {
            SolverConfig::Pt(p) => p.max_steps,
            SolverConfig::Dau(p) => p.max_steps,
            SolverConfig::Sb(p) => p.cutoff(),
            SolverConfig::Qg(p) => p.max_steps,
        }
    }

    /// Content hash of the full parameter set.
    pub fn params_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("params serialize");
        crate::hash::content_id(json.as_bytes())
    }

    /// Runs the configured solver on the appropriate form of `bundle`.
    pub fn run(&self, bundle: &InstanceBundle, seed: u64) -> Result<FirstPassageRecord> {
        let mut rec = match self {
            SolverConfig::Pt(p) => pt_run(&bundle.ising, p, seed)?,
            SolverConfig::Dau(p) => dau_run(&bundle.ising, p, seed)?,
            SolverConfig::Sb(p) => sb_run(&bundle.ising, p, seed)?,
            SolverConfig::Qg(p) => quasigreedy_run(&bundle.xorsat, p, seed)?,
        };
        rec.instance_id = bundle.xorsat.instance_id.clone();
        Ok(rec)
    }
}

/// Record of the earliest success among the first `f_p` independent
/// records of one instance; models `f_p` replicas hosted by one device.
pub fn best_of_replicas(records: &[FirstPassageRecord], f_p: usize) -> Result<FirstPassageRecord> {
    if f_p == 0 || records.is_empty() {
        return Err(Error::InsufficientData("no records to combine".into()));
    }
    if records.len() < f_p {
        return Err(Error::InsufficientData(format!(
            "{} records for f_p = {f_p}",
            records.len()
        )));
    }
    let group = &records[..f_p];
    let best = group
        .iter()
        .filter(|r| r.success)
        .min_by_key(|r| r.steps_to_solution)
        .unwrap_or(&group[0]);
    Ok(best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn rec(steps: Option<u64>) -> FirstPassageRecord {
        let mut r = FirstPassageRecord::new(SolverId::Pt, 0, 100);
        if let Some(s) = steps {
            r.solved(s, Solution::Spins(vec![]));
        }
        r
    }

    #[test]
    fn best_of_picks_minimum_success() {
        let rs = [rec(Some(5)), rec(None), rec(Some(9))];
        let b = best_of_replicas(&rs, 3).unwrap();
        assert_eq!(b.steps_to_solution, Some(5));
        assert!(b.success);
    }

    #[test]
    fn best_of_all_failures() {
        let rs = [rec(None), rec(None)];
        let b = best_of_replicas(&rs, 2).unwrap();
        assert!(!b.success);
        assert_eq!(b.steps_to_solution, None);
        assert!(best_of_replicas(&[], 1).is_err());
        assert!(best_of_replicas(&rs, 3).is_err());
    }

    #[test]
    fn best_of_matches_replica_amplification() {
        // synthetic records succeeding with probability p
        let (p, f_p, trials) = (0.2, 4usize, 20_000);
        let mut rng = stream_rng(17, 0);
        let hits = (0..trials)
            .filter(|_| {
                let rs: Vec<_> = (0..f_p).map(|_| rec(rng.random_bool(p).then_some(1))).collect();
                best_of_replicas(&rs, f_p).unwrap().success
            })
            .count();
        let empirical = hits as f64 / trials as f64;
        let expected = 1.0 - (1.0f64 - p).powi(f_p as i32);
        let sd = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((empirical - expected).abs() < 3.0 * sd, "{empirical} vs {expected}");
    }

    #[test]
    fn solver_ids_roundtrip() {
        for id in [SolverId::Pt, SolverId::Dau, SolverId::Sb, SolverId::Qg] {
            assert_eq!(id.as_str().parse::<SolverId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("xx".parse::<SolverId>().is_err());
    }

    #[test]
    fn params_hash_is_stable_and_distinguishing() {
        let a = SolverConfig::Pt(PtParams::default());
        let b = SolverConfig::Pt(PtParams {
            max_steps: 7,
            ..PtParams::default()
        });
        assert_eq!(a.params_hash(), a.clone().params_hash());
        assert_ne!(a.params_hash(), b.params_hash());
    }
}

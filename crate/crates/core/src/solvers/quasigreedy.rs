//! Quasi-greedy local search on the native parity clauses.
//!
//! At each step a uniformly random variable is flipped with probability
//! `flip_prob[k]`, where `k` is the number of its three clauses currently
//! violated. `flip_prob[0] = 0`, so a solved assignment is absorbing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FirstPassageRecord, Solution, SolverId};
use crate::instance::XorsatInstance;
use crate::rng::{stream_rng, ChaCha8Rng};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QgParams {
    /// Flip probability by number of violated incident clauses (0..=3).
    pub flip_prob: [f64; 4],
    /// Independent replicas; the run succeeds when any replica halts.
    pub num_replicas: usize,
    /// Cutoff in single-variable steps per replica.
    pub max_steps: u64,
}

impl Default for QgParams {
    fn default() -> Self {
        QgParams {
            flip_prob: [0.0, 0.25, 1.0, 1.0],
            num_replicas: 1,
            max_steps: 100_000,
        }
    }
}

impl QgParams {
    pub fn validate(&self) -> Result<()> {
        if self.flip_prob[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "flip_prob[0] must be 0 so that solutions are absorbing".into(),
            ));
        }
        if self.flip_prob.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!(
                "flip probabilities must lie in [0, 1]: {:?}",
                self.flip_prob
            )));
        }
        if self.num_replicas == 0 {
            return Err(Error::InvalidParameter("need at least one replica".into()));
        }
        Ok(())
    }
}

/// Assignment with incrementally maintained clause status.
#[derive(Clone, Debug)]
pub struct QgState<'a> {
    instance: &'a XorsatInstance,
    incidence: &'a [Vec<usize>],
    pub bits: Vec<u8>,
    violated: Vec<bool>,
    pub num_violated: usize,
}

impl<'a> QgState<'a> {
    pub fn new(instance: &'a XorsatInstance, incidence: &'a [Vec<usize>], bits: Vec<u8>) -> Self {
        let violated: Vec<bool> = instance.clauses.iter().map(|c| !c.satisfied_by(&bits)).collect();
        let num_violated = violated.iter().filter(|&&v| v).count();
        QgState {
            instance,
            incidence,
            bits,
            violated,
            num_violated,
        }
    }

    /// Violated clauses touching variable `v`.
    #[inline]
    pub fn violated_around(&self, v: usize) -> usize {
        self.incidence[v].iter().filter(|&&c| self.violated[c]).count()
    }

    #[inline]
    pub fn flip(&mut self, v: usize) {
        self.bits[v] ^= 1;
        for &c in &self.incidence[v] {
            let now = !self.violated[c];
            self.violated[c] = now;
            if now {
                self.num_violated += 1;
            } else {
                self.num_violated -= 1;
            }
        }
    }

    /// One quasi-greedy move; returns whether a flip happened.
    pub fn step(&mut self, flip_prob: &[f64; 4], rng: &mut ChaCha8Rng) -> bool {
        let v = rng.random_range(0..self.bits.len());
        let p = flip_prob[self.violated_around(v)];
        let flip = p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p);
        if flip {
            self.flip(v);
        }
        flip
    }

    pub fn is_consistent(&self) -> bool {
        self.num_violated == self.instance.violated(&self.bits)
    }
}

/// Runs replica `r` until it halts or exceeds `cap` steps; returns the
/// halting step.
fn run_replica(
    instance: &XorsatInstance,
    incidence: &[Vec<usize>],
    flip_prob: &[f64; 4],
    seed: u64,
    r: u64,
    cap: u64,
    initial: Option<&[u8]>,
) -> (Option<u64>, u64, Vec<u8>) {
    let mut rng = stream_rng(seed, r);
    let bits = match initial {
        Some(b) => b.to_vec(),
        None => (0..instance.m).map(|_| rng.random_range(0..2u8)).collect(),
    };
    let mut st = QgState::new(instance, incidence, bits);
    let mut t = 0;
    while st.num_violated > 0 {
        if t == cap {
            return (None, t, st.bits);
        }
        st.step(flip_prob, &mut rng);
        t += 1;
    }
    (Some(t), t, st.bits)
}

/// Runs the replicas; the first passage is the earliest halting step among
/// them. Replicas are evaluated one after another, each capped at the best
/// step found so far, which gives the same minimum as lock-step execution.
pub fn quasigreedy_run(instance: &XorsatInstance, params: &QgParams, seed: u64) -> Result<FirstPassageRecord> {
    run(instance, params, seed, None)
}

/// As [`quasigreedy_run`] with every replica starting from `initial`.
pub fn quasigreedy_run_from(
    instance: &XorsatInstance,
    params: &QgParams,
    seed: u64,
    initial: &[u8],
) -> Result<FirstPassageRecord> {
    if initial.len() != instance.m {
        return Err(Error::DimensionMismatch {
            expected: instance.m,
            actual: initial.len(),
        });
    }
    run(instance, params, seed, Some(initial))
}

fn run(instance: &XorsatInstance, params: &QgParams, seed: u64, initial: Option<&[u8]>) -> Result<FirstPassageRecord> {
    params.validate()?;
    let incidence = instance.incidence();
    let mut rec = FirstPassageRecord::new(SolverId::Qg, seed, params.max_steps);
    let mut best: Option<(u64, Vec<u8>)> = None;
    let mut total = 0;
    for r in 0..params.num_replicas as u64 {
        let cap = best.as_ref().map_or(params.max_steps, |b| b.0.min(params.max_steps));
        let (halt, used, bits) = run_replica(instance, &incidence, &params.flip_prob, seed, r, cap, initial);
        total += used;
        if let Some(t) = halt {
            if best.as_ref().is_none_or(|b| t < b.0) {
                best = Some((t, bits));
            }
        }
    }
    if let Some((t, bits)) = best {
        rec.solved(t, Solution::Bits(bits));
    }
    rec.steps_run = total;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, InstanceBundle};

    #[test]
    fn planted_start_never_moves() {
        let x = generate_instance(12, 4).unwrap();
        let r = quasigreedy_run_from(&x, &QgParams::default(), 1, &x.planted).unwrap();
        assert_eq!(r.steps_to_solution, Some(0));
        let inc = x.incidence();
        let mut st = QgState::new(&x, &inc, x.planted.clone());
        let mut rng = stream_rng(0, 0);
        for v in 0..x.m {
            assert_eq!(st.violated_around(v), 0);
        }
        for _ in 0..1000 {
            assert!(!st.step(&QgParams::default().flip_prob, &mut rng));
        }
        assert_eq!(st.bits, x.planted);
    }

    #[test]
    fn incremental_count_stays_exact() {
        let x = generate_instance(30, 2).unwrap();
        let inc = x.incidence();
        let mut rng = stream_rng(5, 0);
        let bits = (0..30).map(|_| rng.random_range(0..2u8)).collect();
        let mut st = QgState::new(&x, &inc, bits);
        for _ in 0..2000 {
            let v = rng.random_range(0..30);
            st.flip(v);
        }
        assert!(st.is_consistent());
    }

    #[test]
    fn small_instance_success_rate() {
        let b = InstanceBundle::from_xorsat(generate_instance(8, 0).unwrap());
        let params = QgParams::default();
        let mut ok = 0;
        for seed in 0..1000 {
            let r = quasigreedy_run(&b.xorsat, &params, seed).unwrap();
            if r.success {
                assert!(r.verify(&b));
                assert_eq!(r.solution, Some(Solution::Bits(b.xorsat.planted.clone())));
                ok += 1;
            }
        }
        assert!(ok > 990, "{ok}/1000");
    }

    #[test]
    fn more_replicas_never_hurt() {
        let x = generate_instance(20, 3).unwrap();
        let one = QgParams {
            max_steps: 1_000_000,
            ..QgParams::default()
        };
        let many = QgParams {
            num_replicas: 8,
            ..one.clone()
        };
        for seed in 0..10 {
            let a = quasigreedy_run(&x, &one, seed).unwrap();
            let b = quasigreedy_run(&x, &many, seed).unwrap();
            // replica 0 uses the same stream in both runs
            if let (Some(sa), Some(sb)) = (a.steps_to_solution, b.steps_to_solution) {
                assert!(sb <= sa);
            }
            assert_eq!(b, quasigreedy_run(&x, &many, seed).unwrap());
        }
    }

    #[test]
    fn invalid_tables() {
        let x = generate_instance(6, 0).unwrap();
        let bad0 = QgParams {
            flip_prob: [0.1, 0.25, 1.0, 1.0],
            ..QgParams::default()
        };
        let bad1 = QgParams {
            flip_prob: [0.0, 1.5, 1.0, 1.0],
            ..QgParams::default()
        };
        assert!(quasigreedy_run(&x, &bad0, 0).is_err());
        assert!(quasigreedy_run(&x, &bad1, 0).is_err());
        assert!(quasigreedy_run_from(&x, &QgParams::default(), 0, &[0; 5]).is_err());
    }
}

//! Rejection-free parallel tempering in the style of the Digital Annealer.
//!
//! Each MC iteration evaluates every single-flip acceptance at once, flips one
//! accepted variable chosen uniformly, and raises an energy offset after an
//! iteration with no accepted flip. Replica exchange happens every
//! `repex_interval` iterations, preceded by an adaptive update of the
//! temperature ladder that pushes adjacent exchange rates toward equality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::acceptance::swap_accept_prob;
use super::state::{log_uniform, SpinState};
use super::{FirstPassageRecord, Solution, SolverId};
use crate::instance::IsingInstance;
use crate::rng::{stream_rng, ChaCha8Rng};
use crate::{Error, Result};

/// Damping applied to each multiplicative spacing correction.
pub const ADAPT_DAMPING: f64 = 0.5;

/// Smoothing weight of the per-pair exchange acceptance average.
const ACCEPTANCE_SMOOTHING: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "increment")]
pub enum OffsetMode {
    /// Constant increment per consecutive rejected iteration.
    Fixed(f64),
    /// Increment = (largest |ΔE| seen during the first exchange interval) / 100,
    /// per replica; a running version of the same rule applies until then.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DauParams {
    pub num_replicas: usize,
    pub repex_interval: u64,
    pub offset: OffsetMode,
    /// Initial ladder bounds, in units of the largest |h_i|, |J_ij|.
    pub beta_min: f64,
    pub beta_max: f64,
    /// Adapt the interior of the ladder before each exchange pass.
    pub adapt: bool,
    /// Cutoff in MC iterations.
    pub max_steps: u64,
}

impl Default for DauParams {
    fn default() -> Self {
        DauParams {
            num_replicas: 26,
            repex_interval: 2500,
            offset: OffsetMode::Auto,
            beta_min: 0.1,
            beta_max: 20.0,
            adapt: true,
            max_steps: 1_000_000,
        }
    }
}

impl DauParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_replicas == 0 {
            return Err(Error::InvalidParameter("need at least one replica".into()));
        }
        if self.repex_interval == 0 {
            return Err(Error::InvalidParameter("repex_interval must be ≥ 1".into()));
        }
        if let OffsetMode::Fixed(inc) = self.offset {
            if !(inc >= 0.0 && inc.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "offset increment must be ≥ 0, got {inc}"
                )));
            }
        }
        let bounds_ok = self.beta_min > 0.0
            && self.beta_max.is_finite()
            && (self.beta_min < self.beta_max || (self.num_replicas == 1 && self.beta_min <= self.beta_max));
        if !bounds_ok {
            return Err(Error::InvalidParameter(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }
}

/// One rejection-free iteration at inverse temperature `beta`.
///
/// Every variable `j` is marked with probability `min(1, e^{-β(ΔE_j - offset)})`.
/// With at least one mark, a uniformly chosen marked variable is flipped and
/// the offset resets to zero; otherwise the offset grows by `increment`.
/// Returns whether a flip happened.
pub fn dau_step<R: Rng>(
    ising: &IsingInstance,
    state: &mut SpinState,
    beta: f64,
    offset: &mut f64,
    increment: f64,
    rng: &mut R,
    marked: &mut Vec<usize>,
) -> bool {
    marked.clear();
    for j in 0..state.spins.len() {
        let x = state.delta(j) as f64 - *offset;
        if x <= 0.0 || rng.random::<f64>() < (-beta * x).exp() {
            marked.push(j);
        }
    }
    if marked.is_empty() {
        *offset += increment;
        return false;
    }
    let j = marked[rng.random_range(0..marked.len())];
    state.flip(ising, j);
    *offset = 0.0;
    true
}

/// A single rejection-free chain with its offset bookkeeping.
#[derive(Clone, Debug)]
pub struct DauReplica {
    pub state: SpinState,
    pub offset: f64,
    pub increment: f64,
    auto: bool,
    max_seen: i64,
    marked: Vec<usize>,
}

impl DauReplica {
    pub fn new(state: SpinState, mode: OffsetMode) -> Self {
        let (increment, auto) = match mode {
            OffsetMode::Fixed(inc) => (inc, false),
            OffsetMode::Auto => (0.0, true),
        };
        DauReplica {
            state,
            offset: 0.0,
            increment,
            auto,
            max_seen: 0,
            marked: Vec::new(),
        }
    }

    /// Stops refreshing the automatic increment.
    pub fn freeze_increment(&mut self) {
        self.auto = false;
    }

    pub fn step<R: Rng>(&mut self, ising: &IsingInstance, beta: f64, rng: &mut R) -> bool {
        if self.auto {
            let seen = (0..self.state.spins.len())
                .map(|j| self.state.delta(j).abs())
                .max()
                .unwrap_or(0);
            self.max_seen = self.max_seen.max(seen);
            self.increment = self.max_seen as f64 / 100.0;
        }
        dau_step(
            ising,
            &mut self.state,
            beta,
            &mut self.offset,
            self.increment,
            rng,
            &mut self.marked,
        )
    }
}

/// Moves the interior of a strictly increasing ladder so that adjacent
/// exchange acceptances equalize.
///
/// Each spacing `d_k = β_{k+1} - β_k` is scaled by
/// `1 + ADAPT_DAMPING · (a_k - ā) / ā` (widened when its acceptance is above
/// the mean, narrowed below), then all spacings are rescaled so the endpoints
/// stay put. Equal acceptances are a fixed point.
pub fn adapt_temperatures(betas: &[f64], acceptances: &[f64]) -> Result<Vec<f64>> {
    if betas.len() < 2 {
        return Ok(betas.to_vec());
    }
    if acceptances.len() != betas.len() - 1 {
        return Err(Error::DimensionMismatch {
            expected: betas.len() - 1,
            actual: acceptances.len(),
        });
    }
    if betas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("ladder is not strictly increasing".into()));
    }
    let mean = acceptances.iter().sum::<f64>() / acceptances.len() as f64;
    if !(mean > 0.0) || acceptances.iter().all(|&a| a == mean) {
        return Ok(betas.to_vec());
    }
    let spacings: Vec<f64> = betas
        .windows(2)
        .zip(acceptances)
        .map(|(w, &a)| (w[1] - w[0]) * (1.0 + ADAPT_DAMPING * (a.clamp(0.0, 1.0) - mean) / mean))
        .collect();
    let span = betas[betas.len() - 1] - betas[0];
    let total: f64 = spacings.iter().sum();
    let mut out = Vec::with_capacity(betas.len());
    let mut acc = betas[0];
    out.push(acc);
    for d in &spacings[..spacings.len() - 1] {
        acc += d * span / total;
        out.push(acc);
    }
    out.push(betas[betas.len() - 1]);
    Ok(out)
}

/// Runs `num_replicas` rejection-free chains with periodic adaptation and
/// exchange, recording the first iteration at which any chain sits at the
/// ground energy.
pub fn dau_run(ising: &IsingInstance, params: &DauParams, seed: u64) -> Result<FirstPassageRecord> {
    params.validate()?;
    let r = params.num_replicas;
    let scale = ising.max_abs_term().max(1) as f64;
    let mut betas: Vec<f64> = log_uniform(params.beta_min, params.beta_max, r)
        .into_iter()
        .map(|b| b / scale)
        .collect();
    let mut rngs: Vec<ChaCha8Rng> = (0..r).map(|k| stream_rng(seed, k as u64)).collect();
    let mut replicas: Vec<DauReplica> = rngs
        .iter_mut()
        .map(|rng| DauReplica::new(SpinState::random(ising, rng), params.offset))
        .collect();
    let mut exchange_rng = stream_rng(seed, r as u64);
    let mut smoothed: Option<Vec<f64>> = None;

    let mut rec = FirstPassageRecord::new(SolverId::Dau, seed, params.max_steps);
    let mut step = 0u64;
    loop {
        if let Some(rep) = replicas.iter().find(|x| x.state.energy == ising.ground_energy) {
            rec.solved(step, Solution::Spins(rep.state.spins.clone()));
            break;
        }
        if step == params.max_steps {
            break;
        }
        for (k, rep) in replicas.iter_mut().enumerate() {
            rep.step(ising, betas[k], &mut rngs[k]);
        }
        step += 1;
        if step.is_multiple_of(params.repex_interval) {
            if step == params.repex_interval {
                replicas.iter_mut().for_each(DauReplica::freeze_increment);
            }
            if r > 1 {
                if params.adapt {
                    if let Some(acc) = &smoothed {
                        betas = adapt_temperatures(&betas, acc)?;
                    }
                }
                let mut probs = Vec::with_capacity(r - 1);
                for k in 0..r - 1 {
                    let de = (replicas[k].state.energy - replicas[k + 1].state.energy) as f64;
                    let a = swap_accept_prob(betas[k] - betas[k + 1], de);
                    probs.push(a);
                    if a >= 1.0 || exchange_rng.random::<f64>() < a {
                        replicas.swap(k, k + 1);
                    }
                }
                smoothed = Some(match smoothed {
                    None => probs,
                    Some(prev) => prev
                        .iter()
                        .zip(&probs)
                        .map(|(p, a)| (1.0 - ACCEPTANCE_SMOOTHING) * p + ACCEPTANCE_SMOOTHING * a)
                        .collect(),
                });
            }
        }
    }
    rec.steps_run = step;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, to_ising, InstanceBundle};

    #[test]
    fn full_rejection_accumulates_offset() {
        // one spin sitting in its minimum with a large gap
        let ising = IsingInstance::new(vec![-1000], [], -1000, vec![]).unwrap();
        let mut st = SpinState::new(&ising, vec![1]);
        let mut rng = stream_rng(0, 0);
        let mut offset = 0.0;
        let mut marked = Vec::new();
        for k in 1..=5 {
            let acc = dau_step(&ising, &mut st, 10.0, &mut offset, 0.5, &mut rng, &mut marked);
            assert!(!acc);
            assert_eq!(offset, 0.5 * k as f64);
        }
    }

    #[test]
    fn downhill_flip_dominates_at_large_beta() {
        // spin 0 is misaligned with its field, spin 1 is aligned
        let ising = IsingInstance::new(vec![-3, -3], [], -6, vec![]).unwrap();
        let mut rng = stream_rng(1, 0);
        let mut marked = Vec::new();
        for _ in 0..200 {
            let mut st = SpinState::new(&ising, vec![-1, 1]);
            let mut offset = 2.0;
            assert!(dau_step(&ising, &mut st, 50.0, &mut offset, 1.0, &mut rng, &mut marked));
            assert_eq!(st.spins, vec![1, 1]);
            assert_eq!(offset, 0.0);
        }
    }

    #[test]
    fn offset_threshold_after_k_rejections() {
        let mut rep = DauReplica::new(
            SpinState::new(&IsingInstance::new(vec![-1000], [], -1000, vec![]).unwrap(), vec![1]),
            OffsetMode::Fixed(3.0),
        );
        let ising = IsingInstance::new(vec![-1000], [], -1000, vec![]).unwrap();
        let mut rng = stream_rng(2, 0);
        for _ in 0..4 {
            rep.step(&ising, 10.0, &mut rng);
        }
        assert_eq!(rep.offset, 12.0);
    }

    #[test]
    fn fields_consistent_after_many_steps() {
        let ising = to_ising(&generate_instance(20, 4).unwrap());
        let mut rng = stream_rng(3, 0);
        let mut rep = DauReplica::new(SpinState::random(&ising, &mut rng), OffsetMode::Auto);
        for _ in 0..3000 {
            rep.step(&ising, 0.7, &mut rng);
        }
        assert!(rep.state.is_consistent(&ising));
        assert!(rep.increment > 0.0);
    }

    #[test]
    fn adapt_fixed_point_and_endpoints() {
        let betas = vec![0.1, 0.3, 0.8, 2.0];
        assert_eq!(adapt_temperatures(&betas, &[0.4, 0.4, 0.4]).unwrap(), betas);
        let out = adapt_temperatures(&betas, &[0.9, 0.1, 0.5]).unwrap();
        assert_eq!(out[0], 0.1);
        assert_eq!(out[3], 2.0);
        assert!(out.windows(2).all(|w| w[0] < w[1]));
        // high-acceptance gap widened
        assert!(out[1] - out[0] > 0.2);
        assert!(adapt_temperatures(&[0.1, 0.05, 1.0], &[0.5, 0.5]).is_err());
        assert!(adapt_temperatures(&betas, &[0.5]).is_err());
    }

    /// Exchange acceptance between independent two-level systems (energies 0
    /// and `gap`) in equilibrium at `ba < bb`.
    fn two_level_acceptance(ba: f64, bb: f64, gap: f64) -> f64 {
        let excited = |b: f64| (-b * gap).exp() / (1.0 + (-b * gap).exp());
        1.0 - excited(ba) * (1.0 - excited(bb)) * (1.0 - (-(bb - ba) * gap).exp())
    }

    #[test]
    fn adaptation_equalizes_two_level_acceptances() {
        let gap = 1.0;
        let mut betas = log_uniform(0.05, 6.0, 10);
        let acc = |b: &[f64]| -> Vec<f64> { b.windows(2).map(|w| two_level_acceptance(w[0], w[1], gap)).collect() };
        let mut rounds = 0;
        loop {
            let a = acc(&betas);
            let mean = a.iter().sum::<f64>() / a.len() as f64;
            let spread = a.iter().map(|x| (x - mean).abs() / mean).fold(0.0, f64::max);
            if spread < 0.01 {
                break;
            }
            rounds += 1;
            assert!(rounds <= 200, "no convergence, spread {spread}");
            betas = adapt_temperatures(&betas, &a).unwrap();
        }
    }

    #[test]
    fn small_instances_are_solved() {
        let b = InstanceBundle::from_xorsat(generate_instance(8, 2).unwrap());
        let params = DauParams {
            max_steps: 200_000,
            ..DauParams::default()
        };
        let r = dau_run(&b.ising, &params, 5).unwrap();
        assert!(r.success);
        assert!(r.verify(&b));
        assert_eq!(r, dau_run(&b.ising, &params, 5).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        let ising = IsingInstance::new(vec![1], [], -1, vec![]).unwrap();
        for p in [
            DauParams {
                repex_interval: 0,
                ..DauParams::default()
            },
            DauParams {
                offset: OffsetMode::Fixed(-1.0),
                ..DauParams::default()
            },
            DauParams {
                num_replicas: 0,
                ..DauParams::default()
            },
            DauParams {
                beta_min: 5.0,
                beta_max: 1.0,
                ..DauParams::default()
            },
        ] {
            assert!(dau_run(&ising, &p, 0).is_err());
        }
    }
}

//! Parallel tempering with a fixed log-uniform inverse-temperature ladder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::acceptance::swap_accept_prob;
use super::state::{log_uniform, max_flip_delta, SpinState};
use super::{FirstPassageRecord, Solution, SolverId};
use crate::instance::IsingInstance;
use crate::rng::{stream_rng, ChaCha8Rng};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PtParams {
    pub num_replicas: usize,
    /// Bounds of the ladder in units of the largest |h_i|, |J_ij|.
    pub beta_min: f64,
    pub beta_max: f64,
    pub sweeps_per_swap: usize,
    /// Cutoff in PT steps.
    pub max_steps: u64,
}

impl Default for PtParams {
    fn default() -> Self {
        PtParams {
            num_replicas: 32,
            beta_min: 0.1,
            beta_max: 20.0,
            sweeps_per_swap: 10,
            max_steps: 100_000,
        }
    }
}

impl PtParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_replicas < 2 {
            return Err(Error::InvalidParameter("PT needs at least 2 replicas".into()));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < beta_min < beta_max, got {} and {}",
                self.beta_min, self.beta_max
            )));
        }
        if self.sweeps_per_swap == 0 {
            return Err(Error::InvalidParameter("sweeps_per_swap must be positive".into()));
        }
        Ok(())
    }

    /// Ladder in absolute units for `ising`.
    pub fn betas(&self, ising: &IsingInstance) -> Vec<f64> {
        let scale = ising.max_abs_term().max(1) as f64;
        log_uniform(self.beta_min, self.beta_max, self.num_replicas)
            .into_iter()
            .map(|b| b / scale)
            .collect()
    }
}

/// Per-temperature replica: configuration plus its private random stream and
/// Boltzmann factor table `e^{-β d}` for every possible positive ΔE `d`.
struct Slot {
    beta: f64,
    boltzmann: Vec<f64>,
    rng: ChaCha8Rng,
}

impl Slot {
    fn sweep(&mut self, ising: &IsingInstance, st: &mut SpinState) {
        for i in 0..st.spins.len() {
            let d = st.delta(i);
            if d <= 0 || self.rng.random::<f64>() < self.boltzmann[d as usize] {
                st.flip(ising, i);
            }
        }
    }
}

pub(crate) struct PtEngine<'a> {
    ising: &'a IsingInstance,
    slots: Vec<Slot>,
    pub(crate) states: Vec<SpinState>,
    swap_rng: ChaCha8Rng,
    sweeps_per_swap: usize,
}

impl<'a> PtEngine<'a> {
    pub(crate) fn new(ising: &'a IsingInstance, params: &PtParams, seed: u64) -> Self {
        let max_delta = max_flip_delta(ising) as usize;
        let mut slots: Vec<Slot> = params
            .betas(ising)
            .into_iter()
            .enumerate()
            .map(|(k, beta)| Slot {
                beta,
                boltzmann: (0..=max_delta).map(|d| (-beta * d as f64).exp()).collect(),
                rng: stream_rng(seed, k as u64),
            })
            .collect();
        let states = slots.iter_mut().map(|s| SpinState::random(ising, &mut s.rng)).collect();
        PtEngine {
            ising,
            slots,
            states,
            swap_rng: stream_rng(seed, params.num_replicas as u64),
            sweeps_per_swap: params.sweeps_per_swap,
        }
    }

    pub(crate) fn step(&mut self) {
        for (slot, st) in self.slots.iter_mut().zip(self.states.iter_mut()) {
            for _ in 0..self.sweeps_per_swap {
                slot.sweep(self.ising, st);
            }
        }
        self.swap_pass();
    }

    #[cfg(test)]
    pub(crate) fn sweep_only(&mut self) {
        for (slot, st) in self.slots.iter_mut().zip(self.states.iter_mut()) {
            slot.sweep(self.ising, st);
        }
    }

    fn swap_pass(&mut self) {
        for k in 0..self.slots.len() - 1 {
            let db = self.slots[k].beta - self.slots[k + 1].beta;
            let de = (self.states[k].energy - self.states[k + 1].energy) as f64;
            let a = swap_accept_prob(db, de);
            if a >= 1.0 || self.swap_rng.random::<f64>() < a {
                self.states.swap(k, k + 1);
            }
        }
    }

    fn ground_replica(&self) -> Option<&SpinState> {
        self.states.iter().find(|s| s.energy == self.ising.ground_energy)
    }
}

/// Runs PT from independent uniform random configurations until some replica
/// reaches the ground energy or `max_steps` PT steps elapse.
pub fn pt_run(ising: &IsingInstance, params: &PtParams, seed: u64) -> Result<FirstPassageRecord> {
    params.validate()?;
    let engine = PtEngine::new(ising, params, seed);
    Ok(drive(engine, params, seed))
}

/// As [`pt_run`] but with every replica starting from `initial`.
pub fn pt_run_from(ising: &IsingInstance, params: &PtParams, seed: u64, initial: &[i8]) -> Result<FirstPassageRecord> {
    params.validate()?;
    ising.energy(initial)?;
    let mut engine = PtEngine::new(ising, params, seed);
    for st in engine.states.iter_mut() {
        *st = SpinState::new(ising, initial.to_vec());
    }
    Ok(drive(engine, params, seed))
}

fn drive(mut engine: PtEngine<'_>, params: &PtParams, seed: u64) -> FirstPassageRecord {
    let mut rec = FirstPassageRecord::new(SolverId::Pt, seed, params.max_steps);
    let mut step = 0;
    loop {
        if let Some(st) = engine.ground_replica() {
            rec.solved(step, Solution::Spins(st.spins.clone()));
            break;
        }
        if step == params.max_steps {
            break;
        }
        engine.step();
        step += 1;
    }
    rec.steps_run = step;
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, to_ising, InstanceBundle};

    fn ferromagnet() -> IsingInstance {
        IsingInstance::new(vec![0, 0], [(0, 1, -1)], -1, vec![]).unwrap()
    }

    #[test]
    fn two_spin_ferromagnet_aligns_quickly() {
        let ising = ferromagnet();
        let params = PtParams {
            max_steps: 5,
            ..PtParams::default()
        };
        let solved = (0..100)
            .filter(|&s| {
                let r = pt_run(&ising, &params, s).unwrap();
                if let Some(Solution::Spins(sp)) = &r.solution {
                    assert_eq!(sp[0], sp[1]);
                }
                r.success
            })
            .count();
        assert!(solved >= 99, "{solved}/100");
    }

    #[test]
    fn forced_planted_start_is_step_zero() {
        let x = generate_instance(10, 1).unwrap();
        let ising = to_ising(&x);
        let init = ising.extended_planted(&x);
        let r = pt_run_from(&ising, &PtParams::default(), 4, &init).unwrap();
        assert_eq!(r.steps_to_solution, Some(0));
        assert!(r.success);
    }

    #[test]
    fn deterministic_and_verifiable() {
        let b = InstanceBundle::from_xorsat(generate_instance(8, 3).unwrap());
        let params = PtParams {
            max_steps: 2000,
            ..PtParams::default()
        };
        let a = pt_run(&b.ising, &params, 11).unwrap();
        assert_eq!(a, pt_run(&b.ising, &params, 11).unwrap());
        assert!(a.success);
        assert!(a.verify(&b));
        assert!(a.steps_to_solution.unwrap() <= a.cutoff_steps);
    }

    #[test]
    fn cutoff_reports_failure() {
        let b = InstanceBundle::from_xorsat(generate_instance(40, 3).unwrap());
        let params = PtParams {
            max_steps: 1,
            num_replicas: 2,
            ..PtParams::default()
        };
        let r = pt_run(&b.ising, &params, 0).unwrap();
        assert!(!r.success);
        assert_eq!(r.steps_to_solution, None);
        assert_eq!(r.steps_run, 1);
    }

    #[test]
    fn fields_stay_consistent_through_swaps() {
        let ising = to_ising(&generate_instance(16, 5).unwrap());
        let mut e = PtEngine::new(&ising, &PtParams::default(), 2);
        for _ in 0..20 {
            e.step();
        }
        assert!(e.states.iter().all(|s| s.is_consistent(&ising)));
    }

    #[test]
    fn invalid_params() {
        let ising = ferromagnet();
        for p in [
            PtParams {
                num_replicas: 1,
                ..PtParams::default()
            },
            PtParams {
                beta_min: 0.0,
                ..PtParams::default()
            },
            PtParams {
                beta_min: 30.0,
                ..PtParams::default()
            },
            PtParams {
                sweeps_per_swap: 0,
                ..PtParams::default()
            },
        ] {
            assert!(pt_run(&ising, &p, 0).is_err());
        }
    }

    #[test]
    fn single_temperature_chain_is_boltzmann() {
        // 3-spin frustrated instance, swaps removed by sampling one slot only
        let ising = IsingInstance::new(vec![1, 0, -1], [(0, 1, 1), (1, 2, -1), (0, 2, 1)], 0, vec![]).unwrap();
        let params = PtParams {
            num_replicas: 2,
            beta_min: 0.3,
            beta_max: 0.6,
            ..PtParams::default()
        };
        let mut e = PtEngine::new(&ising, &params, 9);
        let beta = e.slots[0].beta;
        let mut counts = [0u64; 8];
        let sweeps = 400_000;
        for _ in 0..sweeps {
            e.sweep_only();
            let s = &e.states[0].spins;
            let idx = (0..3).map(|k| ((s[k] < 0) as usize) << k).sum::<usize>();
            counts[idx] += 1;
        }
        let mut z = 0.0;
        let mut w = [0.0; 8];
        for (idx, wi) in w.iter_mut().enumerate() {
            let s: Vec<i8> = (0..3).map(|k| if idx >> k & 1 == 1 { -1 } else { 1 }).collect();
            *wi = (-beta * ising.energy(&s).unwrap() as f64).exp();
            z += *wi;
        }
        let tv: f64 = (0..8)
            .map(|i| (counts[i] as f64 / sweeps as f64 - w[i] / z).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "total variation {tv}");
    }
}

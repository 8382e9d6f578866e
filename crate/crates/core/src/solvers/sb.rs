//! Adiabatic simulated bifurcation integrated with symplectic Euler steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::SpinState;
use super::{FirstPassageRecord, Solution, SolverId};
use crate::instance::IsingInstance;
use crate::rng::stream_rng;
use crate::{Error, Result};

/// Amplitude beyond which a trajectory is treated as numerically diverged.
pub const OVERFLOW_LIMIT: f64 = 1e6;

/// Half-width of the uniform initial position/momentum distribution.
pub const INITIAL_SPREAD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum CouplingScale {
    /// `0.5 / (σ_J √n)`.
    Auto,
    /// A multiple of the automatic value.
    Scaled(f64),
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SbParams {
    pub dt: f64,
    /// Euler steps per trajectory; the pump rises linearly to 1 over them.
    pub num_steps: u64,
    pub coupling: CouplingScale,
    /// Independent trajectories run back to back within one execution.
    pub loops: u64,
}

impl Default for SbParams {
    fn default() -> Self {
        SbParams {
            dt: 0.9,
            num_steps: 2000,
            coupling: CouplingScale::Auto,
            loops: 1,
        }
    }
}

impl SbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.num_steps == 0 || self.loops == 0 {
            return Err(Error::InvalidParameter("num_steps and loops must be ≥ 1".into()));
        }
        if let CouplingScale::Fixed(c) | CouplingScale::Scaled(c) = self.coupling {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!("coupling scale must be > 0, got {c}")));
            }
        }
        Ok(())
    }

    pub fn cutoff(&self) -> u64 {
        self.num_steps * self.loops
    }
}

/// `0.5 / (σ_J √n)` with `σ_J` the standard deviation of the nonzero
/// couplings. When all couplings are equal the root-mean-square is used.
pub fn auto_coupling_scale(ising: &IsingInstance) -> f64 {
    let vals: Vec<f64> = ising.couplings().iter().map(|c| c.2 as f64).collect();
    let n = ising.n().max(1) as f64;
    if vals.is_empty() {
        return 0.5 / n.sqrt();
    }
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    let sigma = if var > 0.0 {
        var.sqrt()
    } else {
        (vals.iter().map(|v| v * v).sum::<f64>() / k).sqrt()
    };
    0.5 / (sigma * n.sqrt())
}

fn resolve_scale(ising: &IsingInstance, params: &SbParams) -> f64 {
    match params.coupling {
        CouplingScale::Auto => auto_coupling_scale(ising),
        CouplingScale::Scaled(f) => f * auto_coupling_scale(ising),
        CouplingScale::Fixed(c) => c,
    }
}

/// Positions and momenta of the oscillator network.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillators {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Oscillators {
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut draw = || rng.random_range(-INITIAL_SPREAD..=INITIAL_SPREAD);
        let x = (0..n).map(|_| draw()).collect();
        let y = (0..n).map(|_| draw()).collect();
        Oscillators { x, y }
    }

    /// Sign readout with `sign(0) = +1`.
    pub fn signs(&self) -> Vec<i8> {
        self.x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
    }

    /// One symplectic Euler step at pump `p`: momenta from current
    /// positions, then positions from the new momenta. The coupling drive is
    /// the negative gradient of the Ising energy, so oscillators settle into
    /// low-energy sign patterns.
    pub fn euler_step(&mut self, ising: &IsingInstance, scale: f64, p: f64, dt: f64) {
        let n = self.x.len();
        for i in 0..n {
            let xi = self.x[i];
            let mut grad = ising.h()[i] as f64;
            for &(j, v) in ising.neighbors(i) {
                grad += v as f64 * self.x[j as usize];
            }
            self.y[i] += dt * (-(xi * xi - p + 1.0) * xi - scale * grad);
        }
        for i in 0..n {
            self.x[i] += dt * self.y[i];
        }
    }

    fn diverged(&self) -> bool {
        self.x.iter().any(|v| !(v.abs() <= OVERFLOW_LIMIT))
    }
}

/// Pump value at Euler step `k` (1-based) of `num_steps`.
#[inline]
fn pump(k: u64, num_steps: u64) -> f64 {
    k as f64 / num_steps as f64
}

/// Integrates one trajectory to the end of the pump schedule without any
/// ground-state check; returns the final oscillator state.
pub fn sb_integrate(ising: &IsingInstance, params: &SbParams, mut osc: Oscillators) -> Result<Oscillators> {
    params.validate()?;
    let scale = resolve_scale(ising, params);
    for k in 1..=params.num_steps {
        osc.euler_step(ising, scale, pump(k, params.num_steps), params.dt);
    }
    Ok(osc)
}

/// Runs `loops` trajectories from random initial states, reading out the sign
/// pattern after every Euler step; the first step whose readout has the
/// ground energy is the first passage (counted across loops). A trajectory
/// whose amplitude diverges is abandoned and flagged `overflow`; its
/// remaining steps still count towards the elapsed total.
pub fn sb_run(ising: &IsingInstance, params: &SbParams, seed: u64) -> Result<FirstPassageRecord> {
    params.validate()?;
    let scale = resolve_scale(ising, params);
    let mut rec = FirstPassageRecord::new(SolverId::Sb, seed, params.cutoff());
    let mut elapsed = 0u64;
    'loops: for l in 0..params.loops {
        let mut rng = stream_rng(seed, l);
        let mut osc = Oscillators::random(ising.n(), &mut rng);
        // readout tracked incrementally: only sign changes touch the energy
        let mut readout = SpinState::new(ising, osc.signs());
        for k in 1..=params.num_steps {
            osc.euler_step(ising, scale, pump(k, params.num_steps), params.dt);
            elapsed += 1;
            if osc.diverged() {
                if !rec.flags.iter().any(|f| f == "overflow") {
                    rec.flags.push("overflow".into());
                }
                elapsed += params.num_steps - k;
                continue 'loops;
            }
            for (i, &x) in osc.x.iter().enumerate() {
                if (x < 0.0) != (readout.spins[i] < 0) {
                    readout.flip(ising, i);
                }
            }
            if readout.energy == ising.ground_energy {
                rec.solved(elapsed, Solution::Spins(readout.spins.clone()));
                break 'loops;
            }
        }
    }
    rec.steps_run = elapsed;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, to_ising, InstanceBundle};

    fn ferromagnet() -> IsingInstance {
        IsingInstance::new(vec![0, 0], [(0, 1, -1)], -1, vec![]).unwrap()
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let ising = IsingInstance::new(vec![0; 4], [(0, 1, 1), (1, 2, -2), (2, 3, 1)], 0, vec![]).unwrap();
        let zero = Oscillators {
            x: vec![0.0; 4],
            y: vec![0.0; 4],
        };
        let out = sb_integrate(&ising, &SbParams::default(), zero.clone()).unwrap();
        assert_eq!(out, zero);
    }

    #[test]
    fn ferromagnet_aligns() {
        let ising = ferromagnet();
        let params = SbParams::default();
        let aligned = (0..100)
            .filter(|&s| {
                let osc = Oscillators::random(2, &mut stream_rng(s, 0));
                let out = sb_integrate(&ising, &params, osc).unwrap();
                let sg = out.signs();
                sg[0] == sg[1]
            })
            .count();
        assert!(aligned > 95, "{aligned}/100");
    }

    #[test]
    fn halved_step_agrees_on_final_signs() {
        // short horizon: over long horizons trajectories are chaotic and the
        // sign pattern is not a smooth function of dt
        let ising = to_ising(&generate_instance(8, 6).unwrap());
        let coarse = SbParams {
            dt: 0.05,
            num_steps: 200,
            ..SbParams::default()
        };
        let fine = SbParams {
            dt: coarse.dt / 2.0,
            num_steps: 2 * coarse.num_steps,
            ..coarse.clone()
        };
        let agree = (0..100)
            .filter(|&s| {
                let osc = Oscillators::random(ising.n(), &mut stream_rng(s, 0));
                let a = sb_integrate(&ising, &coarse, osc.clone()).unwrap();
                let b = sb_integrate(&ising, &fine, osc).unwrap();
                a.signs() == b.signs()
            })
            .count();
        assert!(agree >= 90, "{agree}/100");
    }

    #[test]
    fn run_is_deterministic_and_verifiable() {
        let b = InstanceBundle::from_xorsat(generate_instance(8, 1).unwrap());
        let params = SbParams {
            loops: 50,
            ..SbParams::default()
        };
        let r = sb_run(&b.ising, &params, 3).unwrap();
        assert_eq!(r, sb_run(&b.ising, &params, 3).unwrap());
        assert!(r.success);
        assert!(r.verify(&b));
    }

    #[test]
    fn divergence_is_flagged() {
        let ising = ferromagnet();
        let params = SbParams {
            dt: 50.0,
            coupling: CouplingScale::Fixed(1.0),
            ..SbParams::default()
        };
        let ising_hard = IsingInstance::new(vec![0, 0], [(0, 1, -1)], -100, vec![]).unwrap();
        let r = sb_run(&ising_hard, &params, 0).unwrap();
        assert!(!r.success);
        assert!(r.flags.iter().any(|f| f == "overflow"));
        let _ = ising;
    }

    #[test]
    fn auto_scale_uses_coupling_spread() {
        let ising = IsingInstance::new(vec![0; 4], [(0, 1, 1), (1, 2, 3)], 0, vec![]).unwrap();
        // σ = 1, n = 4
        assert!((auto_coupling_scale(&ising) - 0.25).abs() < 1e-15);
        // equal couplings fall back to RMS = 1
        assert!((auto_coupling_scale(&ferromagnet()) - 0.5 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        let ising = ferromagnet();
        assert!(sb_run(
            &ising,
            &SbParams {
                dt: 0.0,
                ..SbParams::default()
            },
            0
        )
        .is_err());
        assert!(sb_run(
            &ising,
            &SbParams {
                num_steps: 0,
                ..SbParams::default()
            },
            0
        )
        .is_err());
        assert!(sb_run(
            &ising,
            &SbParams {
                coupling: CouplingScale::Fixed(-1.0),
                ..SbParams::default()
            },
            0
        )
        .is_err());
    }
}

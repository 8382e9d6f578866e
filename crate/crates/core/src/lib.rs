//! Benchmark suite for heuristic Ising/QUBO solvers on planted 3-regular
//! 3-XORSAT instances.
//!
//! The crate is split the same way the benchmark pipeline runs:
//!
//! - [`instance`]: planted instance generation, GF(2) uniqueness checks and
//!   the reduction to two-body Ising / QUBO form.
//! - [`solvers`]: parallel tempering, the rejection-free digital-annealer
//!   style sampler, simulated bifurcation and the quasi-greedy native solver,
//!   all reporting first-passage records.
//! - [`metrics`]: success posteriors, time-to-solution curves with a Bayesian
//!   bootstrap, exponential first-passage fits and scaling fits.
//! - [`bench`]: plan execution, run ledger and analysis orchestration used by
//!   the `xorbench` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod hash;
pub mod instance;
pub mod metrics;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};

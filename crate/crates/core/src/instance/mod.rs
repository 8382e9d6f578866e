//! Planted 3-regular 3-XORSAT instances and their two-body reductions.

pub mod gadget;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod ising;
pub mod qubo;
pub mod validate;
pub mod xorsat;

pub use gadget::{clause_gadget, verify_gadget, GadgetTerms, GADGET_MIN};
pub use gf2::{eliminate, BitMatrix, Gf2Solution};
pub use graph::{sample_3regular, ClauseGraph};
pub use io::{InstanceBundle, InstanceFile};
pub use ising::{to_ising, IsingInstance};
pub use qubo::{bits_to_spins, ising_to_qubo, spins_to_bits, QuboInstance};
pub use validate::{validate_instance, InstanceReport};
pub use xorsat::{generate_instance, Clause, XorsatInstance};

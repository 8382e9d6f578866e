//! Seeded random streams.
//!
//! Every stochastic component draws from ChaCha8, a counter-based generator
//! whose 64-bit stream id gives each replica (or auxiliary consumer) an
//! independent sequence under a single seed. Runs therefore reproduce
//! regardless of thread scheduling.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Random 3-regular clause/variable incidence graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Default cap on resampling attempts.
pub const DEFAULT_ATTEMPT_CAP: usize = 10_000;

/// Clause/variable incidence with every clause holding 3 distinct variables
/// and every variable appearing in exactly 3 clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseGraph {
    pub m: usize,
    /// One sorted triple per clause.
    pub clauses: Vec<[usize; 3]>,
    /// Matchings discarded because a clause received the same variable twice.
    pub rejections: usize,
}

impl ClauseGraph {
    /// Number of clause pairs sharing two variables.
    pub fn shared_pairs(&self) -> usize {
        count_shared_pairs(&self.clauses)
    }
}

pub(crate) fn count_shared_pairs(clauses: &[[usize; 3]]) -> usize {
    let mut pairs: Vec<(usize, usize)> = clauses
        .iter()
        .flat_map(|c| [(c[0], c[1]), (c[0], c[2]), (c[1], c[2])])
        .collect();
    pairs.sort_unstable();
    pairs.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Configuration-model sampler: three stubs per variable are matched
/// uniformly to three slots per clause; any matching that puts a variable
/// twice into one clause is rejected and resampled.
pub fn sample_3regular(m: usize, rng_seed: u64) -> Result<ClauseGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_3regular_with(m, &mut rng, DEFAULT_ATTEMPT_CAP)
}

pub(crate) fn sample_3regular_with(m: usize, rng: &mut ChaCha8Rng, attempt_cap: usize) -> Result<ClauseGraph> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!(
            "3-regular instances need at least 4 variables, got {m}"
        )));
    }
    let mut stubs: Vec<usize> = (0..m).flat_map(|v| [v, v, v]).collect();
    for attempt in 0..attempt_cap {
        stubs.shuffle(rng);
        let mut clauses = Vec::with_capacity(m);
        let mut ok = true;
        for chunk in stubs.chunks_exact(3) {
            let mut c = [chunk[0], chunk[1], chunk[2]];
            c.sort_unstable();
            if c[0] == c[1] || c[1] == c[2] {
                ok = false;
                break;
            }
            clauses.push(c);
        }
        if ok {
            return Ok(ClauseGraph {
                m,
                clauses,
                rejections: attempt,
            });
        }
    }
    Err(Error::GenerationFailure {
        attempts: attempt_cap,
        reason: "no simple 3-regular matching found".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_regular(g: &ClauseGraph) {
        assert_eq!(g.clauses.len(), g.m);
        let mut deg = vec![0; g.m];
        for c in &g.clauses {
            assert!(c[0] < c[1] && c[1] < c[2] && c[2] < g.m);
            for &v in c {
                deg[v] += 1;
            }
        }
        assert!(deg.iter().all(|&d| d == 3));
    }

    #[test]
    fn smallest_size_is_regular() {
        for seed in 0..20 {
            let g = sample_3regular(4, seed).unwrap();
            assert_regular(&g);
            // m = 4 forces all four triples
            let mut cs = g.clauses.clone();
            cs.sort();
            assert_eq!(cs, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(sample_3regular(64, 1).unwrap(), sample_3regular(64, 1).unwrap());
        assert_ne!(sample_3regular(64, 1).unwrap(), sample_3regular(64, 2).unwrap());
    }

    #[test]
    fn rejections_occur_at_moderate_size() {
        let total: usize = (0..100)
            .map(|s| {
                let g = sample_3regular(64, s).unwrap();
                assert_regular(&g);
                g.rejections
            })
            .sum();
        // a simple matching survives with probability near e^-2
        assert!(total > 0);
        let fraction = total as f64 / (total + 100) as f64;
        assert!(fraction > 0.5, "rejected fraction {fraction}");
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(sample_3regular(3, 0).is_err());
    }

    #[test]
    fn attempt_cap_surfaces_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // zero attempts can never succeed
        assert!(matches!(
            sample_3regular_with(16, &mut rng, 0),
            Err(Error::GenerationFailure { .. })
        ));
    }
}

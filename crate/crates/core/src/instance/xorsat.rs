use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf2::{eliminate, BitMatrix, Gf2Solution};
use super::graph::{count_shared_pairs, sample_3regular_with, DEFAULT_ATTEMPT_CAP};
use crate::hash::content_id;
use crate::{Error, Result};

/// One parity constraint `x_a ⊕ x_b ⊕ x_c = sign`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clause {
    pub vars: [usize; 3],
    pub sign: u8,
}

impl Clause {
    pub fn satisfied_by(&self, x: &[u8]) -> bool {
        (x[self.vars[0]] ^ x[self.vars[1]] ^ x[self.vars[2]]) & 1 == self.sign
    }
}

/// Native cubic 3-regular 3-XORSAT instance with a planted unique solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorsatInstance {
    pub m: usize,
    pub clauses: Vec<Clause>,
    pub planted: Vec<u8>,
    pub seed: u64,
    pub instance_id: String,
}

impl XorsatInstance {
    /// Assembles an instance and computes its content id.
    pub fn new(m: usize, clauses: Vec<Clause>, planted: Vec<u8>, seed: u64) -> Self {
        let instance_id = instance_content_id(m, &clauses, &planted);
        XorsatInstance {
            m,
            clauses,
            planted,
            seed,
            instance_id,
        }
    }

    pub fn triples(&self) -> Vec<[usize; 3]> {
        self.clauses.iter().map(|c| c.vars).collect()
    }

    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_clauses(self.m, &self.triples())
    }

    pub fn rhs(&self) -> Vec<u8> {
        self.clauses.iter().map(|c| c.sign).collect()
    }

    pub fn violated(&self, x: &[u8]) -> usize {
        self.clauses.iter().filter(|c| !c.satisfied_by(x)).count()
    }

    /// Clause pairs sharing two variables (allowed by the generator, reported
    /// for auditing).
    pub fn shared_pairs(&self) -> usize {
        count_shared_pairs(&self.triples())
    }

    /// Clause indices touching each variable.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::with_capacity(3); self.m];
        for (c, clause) in self.clauses.iter().enumerate() {
            for &v in &clause.vars {
                inc[v].push(c);
            }
        }
        inc
    }
}

/// Stable hash over `(m, clauses, planted)`.
pub fn instance_content_id(m: usize, clauses: &[Clause], planted: &[u8]) -> String {
    let mut text = format!("3r3x;m={m};");
    for c in clauses {
        text.push_str(&format!("{},{},{},{};", c.vars[0], c.vars[1], c.vars[2], c.sign));
    }
    text.extend(planted.iter().map(|&b| if b == 1 { '1' } else { '0' }));
    content_id(text.as_bytes())
}

/// Samples graphs until the incidence matrix has full GF(2) rank, then plants
/// a uniform assignment and sets each clause sign to its parity.
pub fn generate_instance(m: usize, rng_seed: u64) -> Result<XorsatInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..DEFAULT_ATTEMPT_CAP {
        let graph = sample_3regular_with(m, &mut rng, DEFAULT_ATTEMPT_CAP)?;
        let a = BitMatrix::from_clauses(m, &graph.clauses);
        if let Gf2Solution::Singular { .. } = eliminate(&a, &vec![0; m])? {
            continue;
        }
        let planted: Vec<u8> = (0..m).map(|_| rng.random_range(0..2u8)).collect();
        let clauses = graph
            .clauses
            .iter()
            .map(|&vars| Clause {
                vars,
                sign: planted[vars[0]] ^ planted[vars[1]] ^ planted[vars[2]],
            })
            .collect();
        return Ok(XorsatInstance::new(m, clauses, planted, rng_seed));
    }
    Err(Error::GenerationFailure {
        attempts: DEFAULT_ATTEMPT_CAP,
        reason: format!("no full-rank system found for m={m}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_solutions(x: &XorsatInstance) -> Vec<Vec<u8>> {
        (0u32..1 << x.m)
            .map(|bits| (0..x.m).map(|k| (bits >> k & 1) as u8).collect::<Vec<u8>>())
            .filter(|a| x.violated(a) == 0)
            .collect()
    }

    #[test]
    fn eliminate_returns_stored_plant() {
        let x = generate_instance(4, 3).unwrap();
        assert_eq!(
            eliminate(&x.matrix(), &x.rhs()).unwrap(),
            Gf2Solution::Unique(x.planted.clone())
        );
    }

    #[test]
    fn planted_solution_is_unique_by_enumeration() {
        for seed in 0..10 {
            let x = generate_instance(8, seed).unwrap();
            assert_eq!(brute_force_solutions(&x), vec![x.planted.clone()]);
        }
    }

    #[test]
    fn every_generated_system_has_full_rank() {
        for seed in 0..100 {
            let x = generate_instance(32, seed).unwrap();
            assert_eq!(eliminate(&x.matrix(), &x.rhs()).unwrap().rank(), 32);
            assert_eq!(x.violated(&x.planted), 0);
        }
    }

    #[test]
    fn deterministic_and_content_addressed() {
        let a = generate_instance(20, 9).unwrap();
        let b = generate_instance(20, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.instance_id, instance_content_id(a.m, &a.clauses, &a.planted));
        assert_ne!(a.instance_id, generate_instance(20, 10).unwrap().instance_id);
    }

    #[test]
    fn plant_is_not_degenerate() {
        let x = generate_instance(64, 1).unwrap();
        let ones = x.planted.iter().filter(|&&b| b == 1).count();
        assert!(ones > 10 && ones < 54);
        assert!(x.clauses.iter().any(|c| c.sign == 1));
    }
}

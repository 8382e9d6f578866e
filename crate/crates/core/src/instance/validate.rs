//! Invariant checks over generated instances.

use rand::Rng;
use serde::Serialize;

use super::gadget::{verify_gadget, GADGET_MIN};
use super::gf2::{eliminate, Gf2Solution};
use super::io::InstanceBundle;
use super::qubo::bits_to_spins;
use crate::rng::stream_rng;

/// Inclusive range the QUBO coefficients of the 3R3X ensemble fall into.
pub const QUBO_RANGE: (i64, i64) = (-30, 16);

/// Random configurations used for the QUBO/Ising equivalence check.
pub const EQUIVALENCE_SAMPLES: usize = 1000;

/// Largest native size for exhaustive uniqueness enumeration.
pub const EXHAUSTIVE_UNIQUE_MAX_M: usize = 10;

/// Largest spin count for an exhaustive ground-state search.
pub const EXHAUSTIVE_GROUND_MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub instance_id: String,
    pub m: usize,
    pub n: usize,
    pub checks: Vec<CheckResult>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, passed: bool, detail: impl FnOnce() -> String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail: (!passed).then(detail),
    }
}

/// Runs every instance invariant on one bundle.
pub fn validate_instance(b: &InstanceBundle) -> InstanceReport {
    let x = &b.xorsat;
    let m = x.m;
    let mut checks = Vec::new();

    checks.push(check("content_id", b.id_matches_content(), || {
        format!("stored id {} does not match content", x.instance_id)
    }));

    let mut degree = vec![0usize; m];
    let mut distinct = x.clauses.len() == m;
    for c in &x.clauses {
        let [a, bb, cc] = c.vars;
        distinct &= a != bb && bb != cc && a != cc && a.max(bb).max(cc) < m;
        for &v in &c.vars {
            if v < m {
                degree[v] += 1;
            }
        }
    }
    let regular = distinct && degree.iter().all(|&d| d == 3);
    checks.push(check("regularity", regular, || {
        "clause or variable degree differs from 3".into()
    }));

    let rank_ok = match eliminate(&x.matrix(), &x.rhs()) {
        Ok(Gf2Solution::Unique(sol)) => Ok(sol == x.planted),
        Ok(Gf2Solution::Singular { rank }) => Err(format!("rank {rank} < {m}")),
        Err(e) => Err(e.to_string()),
    };
    checks.push(check("rank", matches!(rank_ok, Ok(true)), || match &rank_ok {
        Ok(_) => "unique solution differs from planted vector".into(),
        Err(e) => e.clone(),
    }));

    checks.push(check("planted_satisfies", x.violated(&x.planted) == 0, || {
        format!("{} clauses violated by the plant", x.violated(&x.planted))
    }));

    let gadgets = verify_gadget(0).unwrap_or(false) && verify_gadget(1).unwrap_or(false);
    checks.push(check("gadget_minima", gadgets, || "gadget minima incorrect".into()));

    let ground_ok = b.ising.ground_energy == GADGET_MIN * m as i64 && b.ising.n() == 2 * m;
    checks.push(check("ground_energy", ground_ok, || {
        format!("ground energy {} for m={m}", b.ising.ground_energy)
    }));

    let planted_spins = b.ising.extended_planted(x);
    let planted_energy = b.ising.energy(&planted_spins);
    checks.push(check(
        "planted_energy",
        matches!(planted_energy, Ok(e) if e == b.ising.ground_energy),
        || format!("extended plant has energy {planted_energy:?}"),
    ));

    let (lo, hi) = b.qubo.coefficient_range();
    checks.push(check("qubo_range", lo >= QUBO_RANGE.0 && hi <= QUBO_RANGE.1, || {
        format!("coefficients span [{lo}, {hi}]")
    }));

    let mut rng = stream_rng(x.seed, 0x5155_424f);
    let n = b.ising.n();
    let mut mismatch = None;
    if b.qubo.n != n {
        mismatch = Some(format!("qubo size {} vs ising size {n}", b.qubo.n));
    }
    for _ in 0..EQUIVALENCE_SAMPLES {
        if mismatch.is_some() {
            break;
        }
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let q = b.qubo.energy(&bits);
        let e = b.ising.energy(&bits_to_spins(&bits));
        if q.as_ref().ok() != e.as_ref().ok() || q.is_err() {
            mismatch = Some(format!("qubo {q:?} vs ising {e:?}"));
        }
    }
    checks.push(check("qubo_equivalence", mismatch.is_none(), || {
        mismatch.clone().unwrap_or_default()
    }));

    if m <= EXHAUSTIVE_UNIQUE_MAX_M {
        let solutions: Vec<u32> = (0u32..1 << m)
            .filter(|bits| {
                let a: Vec<u8> = (0..m).map(|k| (bits >> k & 1) as u8).collect();
                x.violated(&a) == 0
            })
            .collect();
        let plant_bits: u32 = x.planted.iter().enumerate().map(|(k, &v)| (v as u32) << k).sum();
        checks.push(check("exhaustive_uniqueness", solutions == [plant_bits], || {
            format!("{} satisfying assignments", solutions.len())
        }));
    }

    if n <= EXHAUSTIVE_GROUND_MAX_N {
        let mut s = vec![1i8; n];
        let mut best = i64::MAX;
        for bits in 0u32..1 << n {
            for (k, v) in s.iter_mut().enumerate() {
                *v = if bits >> k & 1 == 1 { -1 } else { 1 };
            }
            best = best.min(b.ising.energy_unchecked(&s));
        }
        checks.push(check("exhaustive_ground_state", best == b.ising.ground_energy, || {
            format!("brute-force minimum {best}")
        }));
    }

    InstanceReport {
        instance_id: x.instance_id.clone(),
        m,
        n,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::xorsat::generate_instance;

    #[test]
    fn fresh_instances_pass_everything() {
        for seed in 0..5 {
            let b = InstanceBundle::from_xorsat(generate_instance(8, seed).unwrap());
            let r = validate_instance(&b);
            assert!(r.passed(), "{r:?}");
            assert!(r.check("exhaustive_uniqueness").is_some());
            assert!(r.check("exhaustive_ground_state").is_some());
        }
        let big = InstanceBundle::from_xorsat(generate_instance(40, 1).unwrap());
        let r = validate_instance(&big);
        assert!(r.passed());
        assert!(r.check("exhaustive_uniqueness").is_none());
    }

    #[test]
    fn corrupted_coupling_breaks_planted_energy() {
        let b = InstanceBundle::from_xorsat(generate_instance(12, 2).unwrap());
        let mut file = b.to_file();
        file.ising.j[3].2 += 1;
        let bad = InstanceBundle::from_file(file).unwrap();
        let r = validate_instance(&bad);
        assert!(!r.check("planted_energy").unwrap().passed);
        assert!(!r.check("qubo_equivalence").unwrap().passed);
        assert!(r.check("regularity").unwrap().passed);
    }
}

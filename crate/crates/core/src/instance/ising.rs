use std::collections::BTreeMap;

use super::gadget::{clause_gadget, GADGET_MIN};
use super::xorsat::XorsatInstance;
use crate::{Error, Result};

/// Two-body Ising problem `E(s) = Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` with
/// integer terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingInstance {
    h: Vec<i64>,
    /// `(i, j, J_ij)` with `i < j`, sorted, no zero entries.
    couplings: Vec<(usize, usize, i64)>,
    /// Symmetric adjacency built from `couplings`.
    neighbors: Vec<Vec<(u32, i64)>>,
    pub ground_energy: i64,
    /// Clause index -> auxiliary spin index (empty for non-gadget instances).
    pub aux_map: Vec<usize>,
}

impl IsingInstance {
    /// Builds an instance from fields and an arbitrary list of couplings;
    /// duplicate pairs are summed and `(j, i)` is folded into `(i, j)`.
    pub fn new(
        h: Vec<i64>,
        couplings: impl IntoIterator<Item = (usize, usize, i64)>,
        ground_energy: i64,
        aux_map: Vec<usize>,
    ) -> Result<Self> {
        let n = h.len();
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (i, j, v) in couplings {
            if i == j {
                return Err(Error::InvalidParameter(format!("self-coupling on spin {i}")));
            }
            let bad = i.max(j);
            if bad >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: bad + 1,
                });
            }
            *acc.entry((i.min(j), i.max(j))).or_insert(0) += v;
        }
        let couplings: Vec<_> = acc
            .into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j, v) in &couplings {
            neighbors[i].push((j as u32, v));
            neighbors[j].push((i as u32, v));
        }
        Ok(IsingInstance {
            h,
            couplings,
            neighbors,
            ground_energy,
            aux_map,
        })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[i64] {
        &self.h
    }

    pub fn couplings(&self) -> &[(usize, usize, i64)] {
        &self.couplings
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(u32, i64)] {
        &self.neighbors[i]
    }

    /// Largest magnitude among all fields and couplings.
    pub fn max_abs_term(&self) -> i64 {
        let h = self.h.iter().map(|v| v.abs()).max().unwrap_or(0);
        let j = self.couplings.iter().map(|c| c.2.abs()).max().unwrap_or(0);
        h.max(j)
    }

    fn check(&self, spins: &[i8]) -> Result<()> {
        if spins.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: spins.len(),
            });
        }
        if let Some((index, &v)) = spins.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(Error::Domain { index, value: v as i64 });
        }
        Ok(())
    }

    /// Exact energy of a ±1 configuration.
    pub fn energy(&self, spins: &[i8]) -> Result<i64> {
        self.check(spins)?;
        Ok(self.energy_unchecked(spins))
    }

    pub(crate) fn energy_unchecked(&self, spins: &[i8]) -> i64 {
        let field: i64 = self.h.iter().zip(spins).map(|(h, &s)| h * s as i64).sum();
        let pair: i64 = self
            .couplings
            .iter()
            .map(|&(i, j, v)| v * (spins[i] * spins[j]) as i64)
            .sum();
        field + pair
    }

    /// `φ_i = h_i + Σ_j J_ij s_j` for every spin.
    pub fn local_fields(&self, spins: &[i8]) -> Result<Vec<i64>> {
        self.check(spins)?;
        Ok(self.local_fields_unchecked(spins))
    }

    pub(crate) fn local_fields_unchecked(&self, spins: &[i8]) -> Vec<i64> {
        (0..self.n())
            .map(|i| {
                self.h[i]
                    + self.neighbors[i]
                        .iter()
                        .map(|&(j, v)| v * spins[j as usize] as i64)
                        .sum::<i64>()
            })
            .collect()
    }

    /// Energy change from flipping spin `i`: `-2 s_i φ_i`.
    #[inline]
    pub fn flip_delta(spins: &[i8], fields: &[i64], i: usize) -> i64 {
        -2 * spins[i] as i64 * fields[i]
    }

    /// Planted assignment extended with the gadget-minimizing auxiliary spins.
    pub fn extended_planted(&self, xorsat: &XorsatInstance) -> Vec<i8> {
        let m = xorsat.m;
        let mut spins: Vec<i8> = xorsat.planted.iter().map(|&x| 1 - 2 * x as i8).collect();
        spins.resize(self.n().max(m), 1);
        for (c, clause) in xorsat.clauses.iter().enumerate() {
            let g = clause_gadget(clause.sign).expect("stored signs are 0/1");
            let t = clause.vars.map(|v| spins[v]);
            spins[self.aux_map[c]] = g.best_aux(t);
        }
        spins
    }
}

/// Reduces a native instance to `2m` spins: logical spins `0..m` followed by
/// one auxiliary spin per clause.
pub fn to_ising(xorsat: &XorsatInstance) -> IsingInstance {
    let m = xorsat.m;
    let mut h = vec![0i64; 2 * m];
    let mut couplings = Vec::with_capacity(6 * m);
    let mut aux_map = Vec::with_capacity(m);
    for (c, clause) in xorsat.clauses.iter().enumerate() {
        let aux = m + c;
        aux_map.push(aux);
        let g = clause_gadget(clause.sign).expect("stored signs are 0/1");
        let global = [clause.vars[0], clause.vars[1], clause.vars[2], aux];
        for (local, &field) in g.h.iter().enumerate() {
            h[global[local]] += field;
        }
        for &(a, b, v) in &g.j {
            couplings.push((global[a], global[b], v));
        }
    }
    IsingInstance::new(h, couplings, GADGET_MIN * m as i64, aux_map).expect("gadget indices are in range")
}

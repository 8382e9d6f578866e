use super::ising::IsingInstance;
use crate::{Error, Result};

/// Upper-triangular integer QUBO `f(x) = Σ_i Q_ii x_i + Σ_{i<j} Q_ij x_i x_j`.
///
/// `f(x) + offset` equals the Ising energy of `s = 1 - 2x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuboInstance {
    pub n: usize,
    /// `(i, j, Q_ij)` with `i <= j`, sorted, no zero entries.
    pub q: Vec<(usize, usize, i64)>,
    pub offset: i64,
    pub ground_value: i64,
}

/// Substitutes `s_i = 1 - 2x_i`:
/// `h s = h - 2h x` and `J s_i s_j = J - 2J x_i - 2J x_j + 4J x_i x_j`.
pub fn ising_to_qubo(ising: &IsingInstance) -> QuboInstance {
    let n = ising.n();
    let mut diag: Vec<i64> = ising.h().iter().map(|h| -2 * h).collect();
    let mut offset: i64 = ising.h().iter().sum();
    let mut q = Vec::with_capacity(n + ising.couplings().len());
    for &(i, j, v) in ising.couplings() {
        diag[i] -= 2 * v;
        diag[j] -= 2 * v;
        offset += v;
    }
    for (i, &d) in diag.iter().enumerate() {
        if d != 0 {
            q.push((i, i, d));
        }
    }
    q.extend(ising.couplings().iter().map(|&(i, j, v)| (i, j, 4 * v)));
    q.sort_unstable();
    QuboInstance {
        n,
        q,
        offset,
        ground_value: ising.ground_energy - offset,
    }
}

impl QuboInstance {
    /// `f_Q(x)` without the offset.
    pub fn value(&self, x: &[u8]) -> Result<i64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if let Some((index, &v)) = x.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::Domain { index, value: v as i64 });
        }
        Ok(self.q.iter().map(|&(i, j, v)| v * (x[i] * x[j]) as i64).sum())
    }

    /// Offset-adjusted value, directly comparable with Ising energies.
    pub fn energy(&self, x: &[u8]) -> Result<i64> {
        Ok(self.value(x)? + self.offset)
    }

    pub fn coefficient_range(&self) -> (i64, i64) {
        let lo = self.q.iter().map(|e| e.2).min().unwrap_or(0);
        let hi = self.q.iter().map(|e| e.2).max().unwrap_or(0);
        (lo, hi)
    }
}

/// `x = (1 - s) / 2`.
pub fn spins_to_bits(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| if s < 0 { 1 } else { 0 }).collect()
}

pub fn bits_to_spins(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| 1 - 2 * b as i8).collect()
}

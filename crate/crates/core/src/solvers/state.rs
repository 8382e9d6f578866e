use rand::Rng;

use crate::instance::IsingInstance;

/// Spin configuration with cached local fields and energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinState {
    pub spins: Vec<i8>,
    pub fields: Vec<i64>,
    pub energy: i64,
}

impl SpinState {
    pub fn new(ising: &IsingInstance, spins: Vec<i8>) -> Self {
        assert_eq!(spins.len(), ising.n(), "configuration length");
        let fields = ising.local_fields_unchecked(&spins);
        let energy = ising.energy_unchecked(&spins);
        SpinState { spins, fields, energy }
    }

    pub fn random<R: Rng>(ising: &IsingInstance, rng: &mut R) -> Self {
        let spins = (0..ising.n())
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect();
        Self::new(ising, spins)
    }

    #[inline]
    pub fn delta(&self, i: usize) -> i64 {
        -2 * self.spins[i] as i64 * self.fields[i]
    }

    /// Flips spin `i`, updating neighbor fields and the energy.
    #[inline]
    pub fn flip(&mut self, ising: &IsingInstance, i: usize) {
        self.energy += self.delta(i);
        let s = self.spins[i];
        self.spins[i] = -s;
        // φ_j changes by J_ij (s_i' - s_i) = -2 J_ij s_i
        let step = -2 * s as i64;
        for &(j, v) in ising.neighbors(i) {
            self.fields[j as usize] += v * step;
        }
    }

    /// Whether cached fields and energy equal a from-scratch evaluation.
    pub fn is_consistent(&self, ising: &IsingInstance) -> bool {
        self.fields == ising.local_fields_unchecked(&self.spins) && self.energy == ising.energy_unchecked(&self.spins)
    }
}

/// Largest possible |ΔE| of a single flip: `2 max_i (|h_i| + Σ_j |J_ij|)`.
pub(crate) fn max_flip_delta(ising: &IsingInstance) -> i64 {
    (0..ising.n())
        .map(|i| 2 * (ising.h()[i].abs() + ising.neighbors(i).iter().map(|e| e.1.abs()).sum::<i64>()))
        .max()
        .unwrap_or(0)
}

/// Log-uniform ladder from `lo` to `hi` (inclusive).
pub(crate) fn log_uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|k| lo * (ratio * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, to_ising};
    use crate::rng::stream_rng;

    #[test]
    fn incremental_fields_match_recomputation() {
        let ising = to_ising(&generate_instance(24, 8).unwrap());
        let mut rng = stream_rng(3, 0);
        let mut st = SpinState::random(&ising, &mut rng);
        for _ in 0..5000 {
            let i = rng.random_range(0..ising.n());
            st.flip(&ising, i);
        }
        assert!(st.is_consistent(&ising));
    }

    #[test]
    fn ladder_endpoints() {
        let l = log_uniform(0.1, 20.0, 32);
        assert_eq!(l.len(), 32);
        assert!((l[0] - 0.1).abs() < 1e-15);
        assert!((l[31] - 20.0).abs() < 1e-12);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        let ratios: Vec<f64> = l.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-12));
    }
}

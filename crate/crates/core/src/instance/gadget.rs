//! Two-body gadget that replaces one three-spin parity clause.
//!
//! A clause with parity bit `b` is satisfied when `s1·s2·s3 = (-1)^b`. For
//! `b = 0` the gadget is
//!
//! ```text
//! G = h(s1+s2+s3) + h_a·sa + J(s1s2 + s2s3 + s3s1) + J_a·sa(s1+s2+s3)
//! ```
//!
//! with `(h, h_a, J, J_a) = (-1, -2, 1, 2)`. Its minimum is -4, reached
//! exactly on the four product +1 triples. The `b = 1` gadget is the same
//! function of `(-s1, -s2, -s3)`, which flips the sign of the clause-spin
//! fields and of the auxiliary couplings.

use crate::{Error, Result};

/// Minimum energy of every clause gadget.
pub const GADGET_MIN: i64 = -4;

const H: i64 = -1;
const H_AUX: i64 = -2;
const J: i64 = 1;
const J_AUX: i64 = 2;

/// One- and two-body terms of a single clause gadget. Spins are indexed
/// locally: 0..3 are the clause spins, 3 is the auxiliary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetTerms {
    pub h: [i64; 4],
    /// `(i, j, J_ij)` with `i < j`.
    pub j: [(usize, usize, i64); 6],
}

pub fn clause_gadget(sign: u8) -> Result<GadgetTerms> {
    let flip = match sign {
        0 => 1,
        1 => -1,
        other => {
            return Err(Error::InvalidParameter(format!(
                "clause sign must be 0 or 1, got {other}"
            )))
        }
    };
    Ok(GadgetTerms {
        h: [flip * H, flip * H, flip * H, H_AUX],
        j: [
            (0, 1, J),
            (0, 2, J),
            (1, 2, J),
            (0, 3, flip * J_AUX),
            (1, 3, flip * J_AUX),
            (2, 3, flip * J_AUX),
        ],
    })
}

impl GadgetTerms {
    /// Energy of a local configuration `(s1, s2, s3, sa)`.
    pub fn energy(&self, s: [i8; 4]) -> i64 {
        let field: i64 = self.h.iter().zip(s).map(|(h, si)| h * si as i64).sum();
        let pair: i64 = self.j.iter().map(|&(a, b, v)| v * s[a] as i64 * s[b] as i64).sum();
        field + pair
    }

    /// Auxiliary spin value minimizing the gadget for a given clause triple.
    pub fn best_aux(&self, triple: [i8; 3]) -> i8 {
        let up = self.energy([triple[0], triple[1], triple[2], 1]);
        let down = self.energy([triple[0], triple[1], triple[2], -1]);
        if up <= down {
            1
        } else {
            -1
        }
    }
}

/// Exhaustive check of the gadget for `sign`: exactly four minima at
/// [`GADGET_MIN`], their triples are the satisfying triples, and every
/// violating triple stays at or above -2 for both auxiliary values.
pub fn verify_gadget(sign: u8) -> Result<bool> {
    let g = clause_gadget(sign)?;
    let want = if sign == 0 { 1 } else { -1 };
    let mut minima = Vec::new();
    let mut lowest = i64::MAX;
    let mut violated_floor = i64::MAX;
    for bits in 0..16u8 {
        let s: [i8; 4] = std::array::from_fn(|k| if bits >> k & 1 == 1 { -1 } else { 1 });
        let e = g.energy(s);
        lowest = lowest.min(e);
        if e == GADGET_MIN {
            minima.push(s);
        }
        if s[0] * s[1] * s[2] != want {
            violated_floor = violated_floor.min(e);
        }
    }
    let satisfying_minima = minima.iter().all(|s| s[0] * s[1] * s[2] == want);
    let mut triples: Vec<[i8; 3]> = minima.iter().map(|s| [s[0], s[1], s[2]]).collect();
    triples.sort();
    triples.dedup();
    Ok(lowest == GADGET_MIN && minima.len() == 4 && triples.len() == 4 && satisfying_minima && violated_floor >= -2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_zero_examples() {
        let g = clause_gadget(0).unwrap();
        assert_eq!(g.energy([1, 1, 1, -1]), -4);
        assert_eq!(g.energy([1, -1, -1, 1]), -4);
        let best_violating = g.energy([1, 1, -1, 1]).min(g.energy([1, 1, -1, -1]));
        assert_eq!(best_violating, -2);
    }

    #[test]
    fn both_signs_verify_exhaustively() {
        assert!(verify_gadget(0).unwrap());
        assert!(verify_gadget(1).unwrap());
    }

    #[test]
    fn sign_one_minima_are_odd_parity() {
        let g = clause_gadget(1).unwrap();
        for t in [[-1, -1, -1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]] {
            let a = g.best_aux(t);
            assert_eq!(g.energy([t[0], t[1], t[2], a]), -4);
        }
    }

    #[test]
    fn invalid_sign() {
        assert!(clause_gadget(2).is_err());
    }
}

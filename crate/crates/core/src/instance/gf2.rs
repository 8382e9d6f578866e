//! Bit-packed linear algebra over GF(2).

use crate::{Error, Result};

const WORD: usize = 64;

/// Dense GF(2) matrix with rows packed 64 columns per word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD).max(1);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Incidence matrix with one row per clause and a one in each variable column.
    pub fn from_clauses(m: usize, clauses: &[[usize; 3]]) -> Self {
        let mut a = Self::zeros(clauses.len(), m);
        for (r, c) in clauses.iter().enumerate() {
            for &v in c {
                a.toggle(r, v);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words_per_row + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words_per_row + c / WORD];
        let mask = 1u64 << (c % WORD);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.words_per_row + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn row_weight(&self, r: usize) -> u32 {
        self.row(r).iter().map(|w| w.count_ones()).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// `A·x` over GF(2).
    pub fn mul_vec(&self, x: &[u8]) -> Result<Vec<u8>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let packed = pack(x);
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self.row(r).iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
                (ones & 1) as u8
            })
            .collect())
    }
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(WORD).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / WORD] |= 1 << (i % WORD);
        }
    }
    out
}

/// Outcome of [`eliminate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gf2Solution {
    /// Full rank; the unique `x` with `A·x = b`.
    Unique(Vec<u8>),
    /// Rank-deficient system.
    Singular { rank: usize },
}

impl Gf2Solution {
    pub fn rank(&self) -> usize {
        match self {
            Gf2Solution::Unique(x) => x.len(),
            Gf2Solution::Singular { rank } => *rank,
        }
    }
}

/// Gauss-Jordan elimination of the square system `A·x = b` over GF(2).
///
/// The right-hand side is carried as an extra packed column so row
/// operations touch a single slice. Pivots are the first row (at or below the
/// current rank) with the column bit set.
pub fn eliminate(a: &BitMatrix, b: &[u8]) -> Result<Gf2Solution> {
    let m = a.rows;
    if a.cols != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: a.cols,
        });
    }
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: b.len(),
        });
    }

    // augmented rows: m columns + rhs
    let wpr = (m + 1).div_ceil(WORD);
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|r| {
            let mut row = vec![0u64; wpr];
            row[..a.words_per_row.min(wpr)].copy_from_slice(&a.row(r)[..a.words_per_row.min(wpr)]);
            if b[r] & 1 == 1 {
                row[m / WORD] |= 1 << (m % WORD);
            }
            row
        })
        .collect();

    let mut rank = 0;
    for col in 0..m {
        let (w, bit) = (col / WORD, 1u64 << (col % WORD));
        let Some(p) = (rank..m).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                // columns below `w` are already zero in the pivot row
                for (x, y) in row[w..].iter_mut().zip(&pivot[w..]) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }

    if rank < m {
        return Ok(Gf2Solution::Singular { rank });
    }
    let x = (0..m).map(|r| ((rows[r][m / WORD] >> (m % WORD)) & 1) as u8).collect();
    Ok(Gf2Solution::Unique(x))
}

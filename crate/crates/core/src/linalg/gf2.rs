//! Bit-packed elimination over GF(2).
//!
//! Rows are stored as little-endian `u64` words (column `c` lives in bit
//! `c % 64` of word `c / 64`), so a row operation is a run of word XORs.

use super::matrix::Matrix;
use super::field::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn from_matrix(m: &Matrix) -> Self {
        debug_assert!(m.field().is_binary());
        let stride = m.cols().div_ceil(64).max(1);
        let mut words = vec![0u64; stride * m.rows()];
        for r in 0..m.rows() {
            for (c, &x) in m.row(r).iter().enumerate() {
                if x != 0 {
                    words[r * stride + c / 64] |= 1 << (c % 64);
                }
            }
        }
        BitMatrix {
            rows: m.rows(),
            cols: m.cols(),
            stride,
            words,
        }
    }

    pub(crate) fn to_matrix(&self) -> Matrix {
        let mut data = vec![0u32; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[r * self.cols + c] = self.bit(r, c) as u32;
            }
        }
        Matrix::from_raw(FieldSpec::GF2, self.rows, self.cols, data)
    }

    #[inline]
    fn bit(&self, r: usize, c: usize) -> bool {
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.words.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`
    fn xor_row(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.stride, src * self.stride);
        for w in 0..self.stride {
            let v = self.words[s + w];
            self.words[d + w] ^= v;
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub(crate) fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let Some(found) = (pr..self.rows).find(|&r| self.bit(r, c)) else {
                continue;
            };
            self.swap_rows(pr, found);
            for r in 0..self.rows {
                if r != pr && self.bit(r, c) {
                    self.xor_row(r, pr);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }
}

/// Rank of a GF(2) matrix whose rows fit in one machine word.
pub(crate) fn rank_narrow(m: &Matrix) -> usize {
    debug_assert!(m.cols() <= 64);
    let mut rows: Vec<u64> = (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .enumerate()
                .fold(0u64, |acc, (c, &x)| acc | ((x as u64 & 1) << c))
        })
        .collect();
    rank_of_words(&mut rows)
}

/// Rank of a list of single-word GF(2) row vectors; clobbers the input.
pub(crate) fn rank_of_words(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let v = rows[i];
        if v == 0 {
            continue;
        }
        let low = v & v.wrapping_neg();
        rank += 1;
        for w in rows[i + 1..].iter_mut() {
            if *w & low != 0 {
                *w ^= v;
            }
        }
    }
    rank
}

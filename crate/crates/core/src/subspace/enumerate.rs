use super::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix};

/// Number of `k`-dimensional subspaces of GF(q)^n, or `None` on `u128` overflow.
///
/// Uses the q-Pascal rule `[n,k] = [n-1,k-1] + q^k [n-1,k]`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let q = q as u128;
    // row[j] = [m, j] for the current m
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            let qj = q.checked_pow(j as u32)?;
            row[j] = row[j - 1].checked_add(qj.checked_mul(row[j])?)?;
        }
    }
    Some(row[k])
}

/// Every `s`-dimensional subspace of GF(p)^n, each exactly once.
///
/// Order: pivot-column sets in lexicographic order, and within one pivot set
/// the free RREF entries (row-major) as an odometer with the last entry
/// fastest. Fails with `BudgetExceeded` when the Gaussian binomial exceeds `cap`.
pub fn enumerate_subspaces(field: FieldSpec, n: usize, s: usize, cap: u128) -> Result<SubspaceIter> {
    if s > n {
        return Err(Error::InvalidArgument(format!("subspace dimension {s} exceeds ambient {n}")));
    }
    let total = gaussian_binomial(n, s, field.modulus() as u64);
    match total {
        Some(count) if count <= cap => Ok(SubspaceIter::new(field, n, s, count)),
        _ => Err(Error::BudgetExceeded {
            stage: "subspace enumeration",
            required: total.map_or_else(|| "> 2^128".to_string(), |c| c.to_string()),
            cap,
        }),
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceIter {
    field: FieldSpec,
    n: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    digits: Vec<u32>,
    remaining: u128,
}

impl SubspaceIter {
    fn new(field: FieldSpec, n: usize, s: usize, count: u128) -> Self {
        let pivots: Vec<usize> = (0..s).collect();
        let free = free_positions(n, &pivots);
        SubspaceIter {
            field,
            n,
            digits: vec![0; free.len()],
            free,
            pivots,
            remaining: count,
        }
    }

    /// Number of subspaces not yet yielded.
    pub fn remaining(&self) -> u128 {
        self.remaining
    }

    fn current(&self) -> Subspace {
        let s = self.pivots.len();
        let mut data = vec![0u32; s * self.n];
        for (i, &c) in self.pivots.iter().enumerate() {
            data[i * self.n + c] = 1;
        }
        for (&(r, c), &d) in self.free.iter().zip(&self.digits) {
            data[r * self.n + c] = d;
        }
        Subspace::from_rref_unchecked(Matrix::from_raw(self.field, s, self.n, data))
    }

    fn advance(&mut self) {
        let p = self.field.modulus();
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < p {
                return;
            }
            *d = 0;
        }
        // odometer wrapped: next pivot set
        if next_combination(&mut self.pivots, self.n) {
            self.free = free_positions(self.n, &self.pivots);
            self.digits = vec![0; self.free.len()];
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current();
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, usize::try_from(self.remaining).ok())
    }
}

fn free_positions(n: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut is_pivot = vec![false; n];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for (r, &pc) in pivots.iter().enumerate() {
        for (c, &taken) in is_pivot.iter().enumerate().skip(pc + 1) {
            if !taken {
                out.push((r, c));
            }
        }
    }
    out
}

/// Next `k`-subset of `0..n` in lexicographic order; false when exhausted.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

use std::fmt;

use super::field::FieldSpec;
use super::gf2::{self, BitMatrix};
use crate::error::{Error, Result};
use crate::subspace::Subspace;

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    /// Trusted constructor: `data` must already be reduced and sized.
    pub(crate) fn from_raw(field: FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&x| x < field.modulus()));
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from a flat row-major vector, reducing every entry mod p.
    pub fn from_vec(field: FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let p = field.modulus();
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(Matrix::from_raw(field, rows, cols, data))
    }

    /// Builds a matrix from equal-length rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[u32]>>(field: FieldSpec, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::from_vec(field, rows.len(), cols, data)
    }

    /// Builds a matrix with `rows x cols` zero columns; used for empty spans.
    pub fn empty(field: FieldSpec, cols: usize) -> Self {
        Matrix::zeros(field, 0, cols)
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value % self.field.modulus();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Matrix product. Panics on shape or field mismatch.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in product");
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let f = self.field;
        let p = f.modulus() as u64;
        let mut out = vec![0u32; self.rows * rhs.cols];
        let mut acc = vec![0u64; rhs.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * rhs.data[k * rhs.cols + c] as u64) % p;
                }
            }
            for (c, a) in acc.iter().enumerate() {
                out[r * rhs.cols + c] = *a as u32;
            }
        }
        Matrix::from_raw(f, self.rows, rhs.cols, out)
    }

    /// Entry-wise sum. Panics on shape or field mismatch.
    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in sum");
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sum");
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix::from_raw(f, self.rows, self.cols, data)
    }

    pub fn scale(&self, k: u32) -> Matrix {
        let f = self.field;
        let k = k % f.modulus();
        let data = self.data.iter().map(|&a| f.mul(a, k)).collect();
        Matrix::from_raw(f, self.rows, self.cols, data)
    }

    /// Stacks `rhs` below `self`.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in vstack");
        assert_eq!(self.cols, rhs.cols, "column mismatch in vstack");
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Matrix::from_raw(self.field, self.rows + rhs.rows, self.cols, data)
    }

    /// Places `rhs` to the right of `self`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch in hstack");
        assert_eq!(self.rows, rhs.rows, "row mismatch in hstack");
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(rhs.row(r));
        }
        Matrix::from_raw(self.field, self.rows, cols, data)
    }

    /// Keeps the first `n` rows.
    pub(crate) fn truncate_rows(mut self, n: usize) -> Matrix {
        self.data.truncate(n * self.cols);
        self.rows = n;
        self
    }

    /// Row-major flattening as a single row vector.
    pub fn flatten(&self) -> Vec<u32> {
        self.data.clone()
    }

    /// Reduced row echelon form.
    ///
    /// Pivots are chosen as the first nonzero entry in column order, so the
    /// output is the unique RREF and is identical on the bit-packed and
    /// generic paths.
    pub fn rref(&self) -> Rref {
        if self.field.is_binary() {
            self.rref_gf2()
        } else {
            self.rref_generic()
        }
    }

    pub(crate) fn rref_gf2(&self) -> Rref {
        let mut bits = BitMatrix::from_matrix(self);
        let pivots = bits.rref_in_place();
        Rref {
            matrix: bits.to_matrix(),
            rank: pivots.len(),
            pivots,
        }
    }

    pub(crate) fn rref_generic(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let cols = m.cols;
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == m.rows {
                break;
            }
            let Some(found) = (pr..m.rows).find(|&r| m.data[r * cols + c] != 0) else {
                continue;
            };
            if found != pr {
                for k in 0..cols {
                    m.data.swap(pr * cols + k, found * cols + k);
                }
            }
            let inv = f.inv(m.data[pr * cols + c]);
            for k in c..cols {
                m.data[pr * cols + k] = f.mul(m.data[pr * cols + k], inv);
            }
            for r in 0..m.rows {
                if r == pr {
                    continue;
                }
                let factor = m.data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for k in c..cols {
                    let pv = m.data[pr * cols + k];
                    if pv != 0 {
                        m.data[r * cols + k] = f.mul_add(neg, pv, m.data[r * cols + k]);
                    }
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Rref {
            matrix: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        if self.field.is_binary() && self.cols <= 64 {
            gf2::rank_narrow(self)
        } else {
            self.rref().rank
        }
    }

    /// Right null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let f = self.field;
        let Rref {
            matrix: r, pivots, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(i, free));
            }
            basis.extend(v);
        }
        let rows = basis.len() / self.cols.max(1);
        let gens = Matrix::from_raw(f, rows, self.cols, basis);
        Subspace::span_of(&gens)
    }

    /// Solves `self * X = targets`; free variables are set to zero.
    pub fn solve(&self, targets: &Matrix) -> Result<Matrix> {
        self.field.ensure_same(targets.field)?;
        if self.rows != targets.rows {
            return Err(Error::DimensionMismatch(format!(
                "system has {} rows but targets have {}",
                self.rows, targets.rows
            )));
        }
        let Rref {
            matrix: r, pivots, ..
        } = self.hstack(targets).rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = Matrix::zeros(self.field, self.cols, targets.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..targets.cols {
                x.data[pc * targets.cols + j] = r.get(i, self.cols + j);
            }
        }
        Ok(x)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}>{}x{}[", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

//! Canonical subspaces of GF(p)^n and the Grassmannian.
//!
//! A [`Subspace`] stores the nonzero rows of its reduced row echelon basis,
//! so two subspaces are equal exactly when their stored bases are equal.

mod enumerate;
mod sample;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix};

pub use enumerate::{enumerate_subspaces, gaussian_binomial, SubspaceIter};
pub use sample::{sample_subspace, SubspaceSampler};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps a matrix already known to be a full-rank RREF basis.
    pub(crate) fn from_rref_unchecked(basis: Matrix) -> Self {
        debug_assert_eq!(basis.rref().matrix, basis);
        debug_assert_eq!(basis.rank(), basis.rows());
        Subspace { basis }
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        Subspace {
            basis: Matrix::empty(field, n),
        }
    }

    pub fn full(field: FieldSpec, n: usize) -> Self {
        Subspace {
            basis: Matrix::identity(field, n),
        }
    }

    /// Row space of `vectors`.
    pub fn span_of(vectors: &Matrix) -> Self {
        let r = vectors.rref();
        Subspace {
            basis: r.matrix.truncate_rows(r.rank),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// RREF basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        self.field().ensure_same(other.field())?;
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimensions {} and {}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace::span_of(&self.basis.vstack(&other.basis)))
    }

    /// Image `{m v : v in self}` under a matrix with `self.ambient()` columns.
    pub fn apply_map(&self, m: &Matrix) -> Result<Subspace> {
        self.field().ensure_same(m.field())?;
        if m.cols() != self.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} map applied to a subspace of GF(p)^{}",
                m.rows(),
                m.cols(),
                self.ambient()
            )));
        }
        if self.is_zero() {
            return Ok(Subspace::zero(self.field(), m.rows()));
        }
        Ok(Subspace::span_of(&self.basis.mul(&m.transpose())))
    }

    /// Vectors orthogonal to every vector of `self` under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.field(), self.ambient());
        }
        self.basis.kernel()
    }

    /// `self ∩ other`, computed as the common solution set of both annihilator systems.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let constraints = self.annihilator().basis.vstack(&other.annihilator().basis);
        if constraints.rows() == 0 {
            return Ok(Subspace::full(self.field(), self.ambient()));
        }
        Ok(constraints.kernel())
    }

    /// `self ⊆ other`
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        Ok(other.basis.vstack(&self.basis).rank() == other.dim())
    }

    pub fn contains_vector(&self, v: &[u32]) -> Result<bool> {
        let row = Matrix::from_rows(self.field(), &[v])?;
        Subspace::span_of(&row).is_subspace_of(self)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}^{}) {:?}", self.dim(), self.field(), self.ambient(), self.basis)
    }
}

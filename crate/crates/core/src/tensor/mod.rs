//! Three-way tensors, rank-one decompositions, and exact rank search.
//!
//! Slices are taken along the first index: slice `i` is the matrix
//! `T(i, *, *)`.

mod rank;

use crate::error::{Error, Result};
use crate::families::MapFamily;
use crate::linalg::{FieldSpec, Matrix};

pub use rank::{
    min_spanning_rank_ones, projective_points, reconstruct_decomposition, tensor_rank_bruteforce, SpanSearch,
    TensorRank,
};

/// A `d1 x d2 x d3` tensor, entries indexed `(i, j, k)` with `i` slowest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tensor3 {
    field: FieldSpec,
    dims: (usize, usize, usize),
    data: Vec<u32>,
}

impl Tensor3 {
    pub fn new(field: FieldSpec, dims: (usize, usize, usize), data: Vec<u32>) -> Result<Self> {
        let len = dims.0 * dims.1 * dims.2;
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{}x{} tensor",
                data.len(),
                dims.0,
                dims.1,
                dims.2
            )));
        }
        let p = field.modulus();
        Ok(Tensor3 {
            field,
            dims,
            data: data.into_iter().map(|x| x % p).collect(),
        })
    }

    pub fn zeros(field: FieldSpec, dims: (usize, usize, usize)) -> Self {
        Tensor3 {
            field,
            dims,
            data: vec![0; dims.0 * dims.1 * dims.2],
        }
    }

    /// The tensor whose `i`-th slice is the `i`-th map of the family.
    pub fn from_family(fam: &MapFamily) -> Self {
        let n = fam.n();
        let data = fam.maps().iter().flat_map(|m| m.entries().iter().copied()).collect();
        Tensor3 {
            field: fam.field(),
            dims: (fam.len(), n, n),
            data,
        }
    }

    /// Stacks equally-shaped matrices as slices.
    pub fn from_slices(field: FieldSpec, slices: &[Matrix]) -> Result<Self> {
        let (r, c) = slices.first().map_or((0, 0), |m| (m.rows(), m.cols()));
        let mut data = Vec::with_capacity(slices.len() * r * c);
        for m in slices {
            field.ensure_same(m.field())?;
            if (m.rows(), m.cols()) != (r, c) {
                return Err(Error::DimensionMismatch("slices differ in shape".into()));
            }
            data.extend_from_slice(m.entries());
        }
        Ok(Tensor3 {
            field,
            dims: (slices.len(), r, c),
            data,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        let (_, d2, d3) = self.dims;
        self.data[(i * d2 + j) * d3 + k]
    }

    pub fn slice(&self, i: usize) -> Matrix {
        let (_, d2, d3) = self.dims;
        let start = i * d2 * d3;
        Matrix::from_raw(self.field, d2, d3, self.data[start..start + d2 * d3].to_vec())
    }

    pub fn slices(&self) -> Vec<Matrix> {
        (0..self.dims.0).map(|i| self.slice(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Panics on shape or field mismatch.
    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.dims, other.dims, "shape mismatch");
        let f = self.field;
        Tensor3 {
            field: f,
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    /// Largest matrix rank among the slices; a lower bound on tensor rank.
    pub fn max_slice_rank(&self) -> usize {
        (0..self.dims.0).map(|i| self.slice(i).rank()).max().unwrap_or(0)
    }
}

/// `f ⊗ g ⊗ h`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankOneTerm {
    pub f: Vec<u32>,
    pub g: Vec<u32>,
    pub h: Vec<u32>,
}

impl RankOneTerm {
    pub fn new(f: Vec<u32>, g: Vec<u32>, h: Vec<u32>) -> Self {
        RankOneTerm { f, g, h }
    }

    /// `g hᵀ`
    pub fn matrix(&self, field: FieldSpec) -> Matrix {
        let mut data = Vec::with_capacity(self.g.len() * self.h.len());
        for &a in &self.g {
            data.extend(self.h.iter().map(|&b| field.mul(a, b)));
        }
        Matrix::from_raw(field, self.g.len(), self.h.len(), data)
    }
}

/// An explicit list of rank-one terms for a tensor of the given shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    field: FieldSpec,
    dims: (usize, usize, usize),
    terms: Vec<RankOneTerm>,
}

impl Decomposition {
    pub fn new(field: FieldSpec, dims: (usize, usize, usize), terms: Vec<RankOneTerm>) -> Result<Self> {
        let p = field.modulus();
        let mut clean = Vec::with_capacity(terms.len());
        for (l, t) in terms.into_iter().enumerate() {
            if (t.f.len(), t.g.len(), t.h.len()) != dims {
                return Err(Error::DimensionMismatch(format!(
                    "term {} has lengths ({}, {}, {}), expected {:?}",
                    l + 1,
                    t.f.len(),
                    t.g.len(),
                    t.h.len(),
                    dims
                )));
            }
            let red = |v: Vec<u32>| v.into_iter().map(|x| x % p).collect();
            clean.push(RankOneTerm::new(red(t.f), red(t.g), red(t.h)));
        }
        Ok(Decomposition {
            field,
            dims,
            terms: clean,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_ℓ f^ℓ ⊗ g^ℓ ⊗ h^ℓ`
    pub fn eval(&self) -> Tensor3 {
        let f = self.field;
        let (d1, d2, d3) = self.dims;
        let mut data = vec![0u32; d1 * d2 * d3];
        for t in &self.terms {
            for i in 0..d1 {
                if t.f[i] == 0 {
                    continue;
                }
                for j in 0..d2 {
                    let fg = f.mul(t.f[i], t.g[j]);
                    if fg == 0 {
                        continue;
                    }
                    for k in 0..d3 {
                        let idx = (i * d2 + j) * d3 + k;
                        data[idx] = f.mul_add(fg, t.h[k], data[idx]);
                    }
                }
            }
        }
        Tensor3 {
            field: f,
            dims: self.dims,
            data,
        }
    }

    /// The rank-one matrices `E_ℓ = g^ℓ (h^ℓ)ᵀ`, one per term, in order.
    pub fn rank_one_matrices(&self) -> Vec<Matrix> {
        self.terms.iter().map(|t| t.matrix(self.field)).collect()
    }
}

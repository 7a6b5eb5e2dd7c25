use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Subspace;
use crate::linalg::{FieldSpec, Matrix};

/// Stream of uniformly random `s`-dimensional subspaces.
///
/// Each draw fills an `s x n` matrix with independent uniform residues and
/// retries until it has full rank; every subspace has the same number of
/// ordered bases, so accepted draws are uniform over the Grassmannian.
#[derive(Debug, Clone)]
pub struct SubspaceSampler {
    field: FieldSpec,
    n: usize,
    s: usize,
    rng: ChaCha8Rng,
}

impl SubspaceSampler {
    /// Panics if `s > n`.
    pub fn new(field: FieldSpec, n: usize, s: usize, seed: u64) -> Self {
        assert!(s <= n, "subspace dimension {s} exceeds ambient {n}");
        SubspaceSampler {
            field,
            n,
            s,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn draw(&mut self) -> Subspace {
        let p = self.field.modulus();
        loop {
            let data = (0..self.s * self.n).map(|_| self.rng.gen_range(0..p)).collect();
            let m = Matrix::from_raw(self.field, self.s, self.n, data);
            let u = Subspace::span_of(&m);
            if u.dim() == self.s {
                return u;
            }
        }
    }
}

impl Iterator for SubspaceSampler {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        Some(self.draw())
    }
}

pub fn sample_subspace(field: FieldSpec, n: usize, s: usize, seed: u64) -> Subspace {
    SubspaceSampler::new(field, n, s, seed).draw()
}

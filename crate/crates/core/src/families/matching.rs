use super::MapFamily;
use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix};

/// A partial monotone matching on `[n] x [n]`, stored as 0-based
/// `(left, right)` pairs sorted by left index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidArgument(format!(
                "pair ({}, {}) outside [1, {n}]",
                i + 1,
                j + 1
            )));
        }
        let given = pairs.clone();
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            let ((i1, j1), (i2, j2)) = (w[0], w[1]);
            if i1 == i2 {
                return Err(Error::NotAMatching(format!("left vertex {} used twice", i1 + 1)));
            }
            if j1 == j2 {
                return Err(Error::NotAMatching(format!("right vertex {} used twice", j1 + 1)));
            }
            if j1 > j2 {
                // report in the order the caller wrote them
                let first = given.iter().position(|&p| p == (i1, j1)).unwrap_or(0);
                let second = given.iter().position(|&p| p == (i2, j2)).unwrap_or(0);
                let (a, b) = if first <= second { ((i1, j1), (i2, j2)) } else { ((i2, j2), (i1, j1)) };
                return Err(Error::NotMonotone { first: a, second: b });
            }
        }
        Ok(Matching { n, pairs })
    }

    pub fn identity(n: usize) -> Self {
        Matching {
            n,
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// `i -> i + offset` wherever the target stays inside `[n]`.
    pub fn shift(n: usize, offset: isize) -> Result<Self> {
        let pairs = (0..n)
            .filter_map(|i| {
                let j = i as isize + offset;
                (0..n as isize).contains(&j).then_some((i, j as usize))
            })
            .collect();
        Matching::new(n, pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The 0/1 map `e_i -> e_{f(i)}`, with undefined `f(i)` sent to zero.
    pub fn to_matrix(&self, field: FieldSpec) -> Matrix {
        let mut m = Matrix::zeros(field, self.n, self.n);
        for &(i, j) in &self.pairs {
            m.set(j, i, 1);
        }
        m
    }
}

pub fn matching_maps(field: FieldSpec, matchings: &[Matching]) -> Result<MapFamily> {
    let n = matchings
        .first()
        .ok_or_else(|| Error::InvalidArgument("no matchings given".into()))?
        .n;
    if let Some(m) = matchings.iter().find(|m| m.n != n) {
        return Err(Error::DimensionMismatch(format!(
            "matchings on [{}] and [{n}] mixed",
            m.n
        )));
    }
    MapFamily::new(field, n, matchings.iter().map(|m| m.to_matrix(field)).collect())
}

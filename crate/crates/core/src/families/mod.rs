//! Families of linear maps on GF(p)^n and the verifiers for dimension
//! expansion and dimension spreading.

mod matching;
mod verify;

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Budgets;
use crate::linalg::{FieldSpec, Matrix};
use crate::subspace::Subspace;
use crate::Rational;

pub use matching::{matching_maps, Matching};
pub use verify::{
    measure_expansion, spreading_profile, verify_expander, verify_large_expansion, verify_spreading,
    Confidence, Counterexample, ExpansionReport, LargeDimStats, LargeExpansionReport, SpreadingProfile, Verdict,
};


/// An ordered list `A_1, ..., A_D` of `n x n` matrices over one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MapFamily {
    field: FieldSpec,
    n: usize,
    maps: Vec<Matrix>,
}

impl MapFamily {
    pub fn new(field: FieldSpec, n: usize, maps: Vec<Matrix>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument("a map family needs at least one map".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            field.ensure_same(m.field())?;
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "map {} is {}x{}, expected {n}x{n}",
                    i + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(MapFamily { field, n, maps })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn into_maps(self) -> Vec<Matrix> {
        self.maps
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.maps.iter().any(|a| a == m)
    }

    /// `Σ_i A_i(u)`
    pub fn image_sum(&self, u: &Subspace) -> Result<Subspace> {
        let mut acc = Subspace::zero(self.field, self.n);
        for a in &self.maps {
            acc = acc.sum(&u.apply_map(a)?)?;
        }
        Ok(acc)
    }

    /// `D` uniformly random `n x n` matrices from a seeded ChaCha stream.
    pub fn random(field: FieldSpec, n: usize, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = field.modulus();
        let maps = (0..count)
            .map(|_| {
                let data = (0..n * n).map(|_| rng.gen_range(0..p)).collect();
                Matrix::from_vec(field, n, n, data)
            })
            .collect::<Result<Vec<_>>>()?;
        MapFamily::new(field, n, maps)
    }

    /// `{I, S+1, S-1}`: identity plus the non-cyclic partial shifts
    /// `e_i -> e_{i+1}` and `e_i -> e_{i-1}`.
    pub fn shifts(field: FieldSpec, n: usize) -> Result<Self> {
        let matchings = [
            Matching::identity(n),
            Matching::shift(n, 1)?,
            Matching::shift(n, -1)?,
        ];
        matching_maps(field, &matchings)
    }

    /// Identity plus partial shifts by `±2^k` for every `2^k < n`.
    pub fn dyadic_shifts(field: FieldSpec, n: usize) -> Result<Self> {
        let mut matchings = vec![Matching::identity(n)];
        let mut step = 1usize;
        while step < n.max(2) {
            matchings.push(Matching::shift(n, step as isize)?);
            matchings.push(Matching::shift(n, -(step as isize))?);
            step *= 2;
        }
        matching_maps(field, &matchings)
    }

    /// Closes the family under transpose and adjoins the identity.
    ///
    /// Output order: the original maps (first occurrences), then their
    /// transposes in order, then the identity, skipping exact duplicates.
    pub fn symmetrize(&self) -> MapFamily {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(2 * self.maps.len() + 1);
        let candidates = self
            .maps
            .iter()
            .cloned()
            .chain(self.maps.iter().map(Matrix::transpose))
            .chain(std::iter::once(Matrix::identity(self.field, self.n)));
        for m in candidates {
            if seen.insert(m.clone()) {
                out.push(m);
            }
        }
        MapFamily {
            field: self.field,
            n: self.n,
            maps: out,
        }
    }

    /// True when the family holds the identity and the transpose of every member.
    pub fn is_symmetric_closed(&self) -> bool {
        self.closure_defect().is_none()
    }

    pub(crate) fn closure_defect(&self) -> Option<String> {
        if !self.contains(&Matrix::identity(self.field, self.n)) {
            return Some("identity is missing".into());
        }
        self.maps
            .iter()
            .position(|a| !self.contains(&a.transpose()))
            .map(|i| format!("transpose of map {} is missing", i + 1))
    }

    /// All products `A_{i_1} A_{i_2} ... A_{i_t}`, deduplicated by exact
    /// equality, in lexicographic order of the index word (first occurrence
    /// kept). Fails when `D^t` exceeds the word budget.
    pub fn words(&self, t: usize, budgets: &Budgets) -> Result<MapFamily> {
        if t == 0 {
            return Err(Error::InvalidArgument("word length must be at least 1".into()));
        }
        let nominal = (self.maps.len() as u128).checked_pow(t as u32);
        match nominal {
            Some(count) if count <= budgets.word_cap => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    stage: "word power",
                    required: nominal.map_or_else(
                        || format!("{}^{}", self.maps.len(), t),
                        |c| c.to_string(),
                    ),
                    cap: budgets.word_cap,
                })
            }
        }
        // The lexicographically first word for any product has a prefix that
        // is itself a first occurrence, so extending the deduplicated level
        // list preserves first-occurrence order.
        let mut level = dedup(self.maps.clone());
        for _ in 1..t {
            let next = level
                .iter()
                .flat_map(|prefix| self.maps.iter().map(move |a| prefix.mul(a)));
            level = dedup(next);
        }
        Ok(MapFamily {
            field: self.field,
            n: self.n,
            maps: level,
        })
    }
}

fn dedup(items: impl IntoIterator<Item = Matrix>) -> Vec<Matrix> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|m| seen.insert(m.clone())).collect()
}

/// Dimensions `s` and `t` of an `(s,t)`-spreading claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpreadingParams {
    pub s: usize,
    pub t: usize,
}

impl SpreadingParams {
    pub fn new(s: usize, t: usize) -> Self {
        SpreadingParams { s, t }
    }

    /// `s = ⌈εn⌉`, `t = ⌈(1-ε)n⌉`.
    pub fn from_epsilon(epsilon: Rational, n: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        let n = Rational::from_integer(n as i64);
        let s = (epsilon * n).ceil().to_integer() as usize;
        let t = ((Rational::one() - epsilon) * n).ceil().to_integer() as usize;
        Ok(SpreadingParams { s, t })
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.s < 1 || self.s > n || self.t > n {
            return Err(Error::InvalidArgument(format!(
                "(s,t) = ({},{}) requires 1 <= s <= {n} and t <= {n}",
                self.s, self.t
            )));
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: Rational) -> Result<()> {
    if !(epsilon > Rational::zero() && epsilon < Rational::one()) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} is outside (0,1)")));
    }
    Ok(())
}

/// Least integer `t` with `t > 3 log2(1/ε) / τ`.
///
/// Decided exactly: with `τ = a/b` and `1/ε = d/c`, the condition is
/// `2^{t·a} · c^{3b} > d^{3b}`.
pub fn word_length_for(epsilon: Rational, tau: Rational) -> Result<u64> {
    check_epsilon(epsilon)?;
    if !tau.is_positive() {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be positive")));
    }
    let (a, b) = (*tau.numer() as u64, *tau.denom() as u64);
    let (c, d) = (*epsilon.numer() as u64, *epsilon.denom() as u64);
    let exp = u32::try_from(3 * b).map_err(|_| Error::InvalidArgument("tau denominator too large".into()))?;
    let lhs_base = BigUint::from(c).pow(exp);
    let rhs = BigUint::from(d).pow(exp);
    let exceeds = |t: u64| -> bool { (&lhs_base << (t * a)) > rhs };

    let approx = 3.0 * (d as f64 / c as f64).log2() / tau.to_f64().unwrap_or(f64::MAX);
    let mut t = (approx.floor().max(0.0) as u64).saturating_sub(1).max(1);
    while t > 1 && exceeds(t - 1) {
        t -= 1;
    }
    while !exceeds(t) {
        t += 1;
    }
    Ok(t)
}

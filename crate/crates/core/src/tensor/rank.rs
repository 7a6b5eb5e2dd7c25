//! Exact tensor rank through rank-one spans.
//!
//! A tensor has rank at most `r` iff some `r` rank-one matrices span all of
//! its slices. The search runs over projective classes of rank-one matrices
//! (scalars are irrelevant inside a span), deepening `r` one step at a time
//! and enumerating independent candidate sets in lexicographic order.

use rayon::prelude::*;

use super::{Decomposition, RankOneTerm, Tensor3};
use crate::error::{Error, Result};
use crate::exec::Config;
use crate::linalg::{FieldSpec, Matrix};

/// Nonzero vectors of GF(p)^m whose first nonzero coordinate is 1, in
/// lexicographic order.
pub fn projective_points(field: FieldSpec, m: usize) -> Vec<Vec<u32>> {
    let p = field.modulus();
    let mut out = Vec::new();
    // lead = index of the leading 1; coordinates after it are free
    for lead in (0..m).rev() {
        let free = m - lead - 1;
        let count = (p as u64).pow(free as u32);
        for code in 0..count {
            let mut v = vec![0u32; m];
            v[lead] = 1;
            let mut c = code;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (c % p as u64) as u32;
                c /= p as u64;
            }
            out.push(v);
        }
    }
    out
}

/// Outcome of [`min_spanning_rank_ones`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanSearch {
    Found { rank: usize, witnesses: Vec<Matrix> },
    /// No set of at most `r_max` rank-one matrices spans the slices.
    AboveMax { r_max: usize },
}

/// Outcome of [`tensor_rank_bruteforce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorRank {
    Exact { rank: usize, decomposition: Decomposition },
    /// Certified: the rank is strictly larger than `r_max`.
    AboveMax { r_max: usize },
}

/// Incrementally maintained echelon basis.
trait Echelon: Clone + Send + Sync {
    type V: Clone + Send + Sync;
    fn dim(&self) -> usize;
    /// Reduces `v` against the basis; `None` when it lies in the span.
    fn reduce(&self, v: &Self::V) -> Option<Self::V>;
    /// `v` must be the nonzero output of `reduce`.
    fn push(&mut self, v: Self::V);
}

/// GF(2) vectors of at most 64 coordinates as single words.
#[derive(Clone, Default)]
struct WordBasis {
    rows: Vec<u64>,
}

impl Echelon for WordBasis {
    type V = u64;

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &u64) -> Option<u64> {
        let mut v = *v;
        for &r in &self.rows {
            let low = r & r.wrapping_neg();
            if v & low != 0 {
                v ^= r;
            }
        }
        (v != 0).then_some(v)
    }

    fn push(&mut self, v: u64) {
        self.rows.push(v);
    }
}

/// Generic prime-field vectors; each stored row has its pivot normalised to 1.
#[derive(Clone)]
struct FpBasis {
    field: FieldSpec,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon for FpBasis {
    type V = Vec<u32>;

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &Vec<u32>) -> Option<Vec<u32>> {
        let f = self.field;
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                let neg = f.neg(c);
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.mul_add(neg, r, *x);
                }
            }
        }
        v.iter().any(|&x| x != 0).then_some(v)
    }

    fn push(&mut self, mut v: Vec<u32>) {
        let f = self.field;
        let pivot = v.iter().position(|&x| x != 0).expect("nonzero vector");
        let inv = f.inv(v[pivot]);
        v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        self.rows.push((pivot, v));
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Depth-first search for `r` independent candidates (indices increasing)
/// whose span contains the slice span. `combined` tracks slices + chosen;
/// its dimension can never exceed `r`.
fn search<B: Echelon>(
    cands: &[B::V],
    r: usize,
    start: usize,
    chosen: &B,
    combined: &B,
    picked: &mut Vec<usize>,
) -> bool {
    if picked.len() == r {
        return combined.dim() == r;
    }
    let needed = r - picked.len();
    for idx in start..cands.len() {
        if cands.len() - idx < needed {
            break;
        }
        let Some(rc) = chosen.reduce(&cands[idx]) else {
            continue;
        };
        let mut next_combined = combined.clone();
        if let Some(v) = combined.reduce(&cands[idx]) {
            if combined.dim() + 1 > r {
                continue;
            }
            next_combined.push(v);
        }
        let mut next_chosen = chosen.clone();
        next_chosen.push(rc);
        picked.push(idx);
        if search(cands, r, idx + 1, &next_chosen, &next_combined, picked) {
            return true;
        }
        picked.pop();
    }
    false
}

/// Lexicographically first `r`-subset of candidates spanning the slices.
fn search_level<B: Echelon>(cands: &[B::V], r: usize, empty: &B, slices: &B, cfg: &Config) -> Option<Vec<usize>> {
    if r == 0 {
        return (slices.dim() == 0).then(Vec::new);
    }
    cfg.install(|| {
        (0..cands.len()).into_par_iter().find_map_first(|first| {
            let chosen_v = empty.reduce(&cands[first])?;
            let mut chosen = empty.clone();
            chosen.push(chosen_v);
            let mut combined = slices.clone();
            if let Some(v) = slices.reduce(&cands[first]) {
                if slices.dim() + 1 > r {
                    return None;
                }
                combined.push(v);
            }
            let mut picked = vec![first];
            search(cands, r, first + 1, &chosen, &combined, &mut picked).then_some(picked)
        })
    })
}

fn run_search<B: Echelon>(
    cands: &[B::V],
    empty: B,
    slice_vectors: &[B::V],
    full: usize,
    lower: usize,
    r_max: usize,
    cfg: &Config,
) -> Result<Option<Vec<usize>>> {
    let mut slices = empty.clone();
    for v in slice_vectors {
        if let Some(rv) = slices.reduce(v) {
            slices.push(rv);
        }
    }
    let lower = lower.max(slices.dim());
    for r in lower..=r_max {
        let combos = binomial(cands.len() as u128, r as u128);
        match combos {
            // slices already span everything: the first branch never backtracks
            _ if r == full && slices.dim() == full => {}
            Some(c) if c <= cfg.budgets.combination_cap => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    stage: "rank-one span search",
                    required: combos.map_or_else(|| format!("C({}, {r})", cands.len()), |c| c.to_string()),
                    cap: cfg.budgets.combination_cap,
                })
            }
        }
        if let Some(found) = search_level(cands, r, &empty, &slices, cfg) {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Least `r <= r_max` such that `r` rank-one matrices span every slice.
pub fn min_spanning_rank_ones(slices: &[Matrix], r_max: usize, cfg: &Config) -> Result<SpanSearch> {
    let Some(first) = slices.first() else {
        return Ok(SpanSearch::Found {
            rank: 0,
            witnesses: vec![],
        });
    };
    let field = first.field();
    let (rows, cols) = (first.rows(), first.cols());
    for s in slices {
        field.ensure_same(s.field())?;
        if (s.rows(), s.cols()) != (rows, cols) {
            return Err(Error::DimensionMismatch("slices differ in shape".into()));
        }
    }

    let p = field.modulus() as u128;
    let classes = |m: usize| (p.pow(m as u32) - 1) / (p - 1);
    let pool_size = classes(rows).checked_mul(classes(cols));
    if pool_size.is_none_or(|s| s > cfg.budgets.pool_cap) || rows >= 32 || cols >= 32 {
        return Err(Error::BudgetExceeded {
            stage: "rank-one candidate pool",
            required: pool_size.map_or_else(|| "overflow".into(), |s| s.to_string()),
            cap: cfg.budgets.pool_cap,
        });
    }

    let gs = projective_points(field, rows);
    let hs = projective_points(field, cols);
    let pool: Vec<Matrix> = gs
        .iter()
        .flat_map(|g| hs.iter().map(move |h| RankOneTerm::new(vec![], g.clone(), h.clone()).matrix(field)))
        .collect();
    let lower = slices.iter().map(Matrix::rank).max().unwrap_or(0);

    let found = if field.is_binary() && rows * cols <= 64 {
        let word = |m: &Matrix| m.entries().iter().enumerate().fold(0u64, |w, (i, &x)| w | ((x as u64) << i));
        let cands: Vec<u64> = pool.iter().map(word).collect();
        let sv: Vec<u64> = slices.iter().map(word).collect();
        run_search(&cands, WordBasis::default(), &sv, rows * cols, lower, r_max, cfg)?
    } else {
        let cands: Vec<Vec<u32>> = pool.iter().map(Matrix::flatten).collect();
        let sv: Vec<Vec<u32>> = slices.iter().map(Matrix::flatten).collect();
        let empty = FpBasis { field, rows: vec![] };
        run_search(&cands, empty, &sv, rows * cols, lower, r_max, cfg)?
    };

    Ok(match found {
        Some(idx) => SpanSearch::Found {
            rank: idx.len(),
            witnesses: idx.into_iter().map(|i| pool[i].clone()).collect(),
        },
        None => SpanSearch::AboveMax { r_max },
    })
}

/// Splits a matrix of rank at most one as `g hᵀ`, with `g` normalised so
/// its first nonzero entry is 1.
fn factor_rank_one(m: &Matrix) -> Result<(Vec<u32>, Vec<u32>)> {
    let f = m.field();
    let Some(pos) = m.entries().iter().position(|&x| x != 0) else {
        return Ok((vec![0; m.rows()], vec![0; m.cols()]));
    };
    let rank = m.rank();
    if rank > 1 {
        return Err(Error::NotRankOne(rank));
    }
    let (j0, k0) = (pos / m.cols(), pos % m.cols());
    let inv = f.inv(m.get(j0, k0));
    let g = (0..m.rows()).map(|j| f.mul(m.get(j, k0), inv)).collect();
    let h = m.row(j0).to_vec();
    Ok((g, h))
}

/// Rebuilds an explicit decomposition from rank-one matrices spanning the
/// slices of `t`: each witness is factored as `g hᵀ` and the coefficients
/// `f^ℓ(i)` are solved slice by slice.
pub fn reconstruct_decomposition(t: &Tensor3, witnesses: &[Matrix]) -> Result<Decomposition> {
    let field = t.field();
    let (d1, d2, d3) = t.dims();
    let mut gh = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        field.ensure_same(w.field())?;
        if (w.rows(), w.cols()) != (d2, d3) {
            return Err(Error::DimensionMismatch(format!(
                "witness is {}x{}, slices are {d2}x{d3}",
                w.rows(),
                w.cols()
            )));
        }
        gh.push(factor_rank_one(w)?);
    }

    let cells = d2 * d3;
    let system = if witnesses.is_empty() {
        Matrix::zeros(field, cells, 0)
    } else {
        witnesses
            .iter()
            .map(|w| Matrix::from_raw(field, 1, cells, w.flatten()))
            .reduce(|a, b| a.vstack(&b))
            .expect("nonempty")
            .transpose()
    };

    let mut coeffs = vec![vec![0u32; d1]; witnesses.len()];
    for i in 0..d1 {
        let target = Matrix::from_raw(field, cells, 1, t.slice(i).flatten());
        let x = match system.solve(&target) {
            Ok(x) => x,
            Err(Error::NoSolution) => return Err(Error::SpanFailure(i)),
            Err(e) => return Err(e),
        };
        for (l, c) in coeffs.iter_mut().enumerate() {
            c[i] = x.get(l, 0);
        }
    }

    let terms = coeffs
        .into_iter()
        .zip(gh)
        .map(|(f, (g, h))| RankOneTerm::new(f, g, h))
        .collect();
    let d = Decomposition::new(field, t.dims(), terms)?;
    debug_assert_eq!(&d.eval(), t);
    Ok(d)
}

/// Exact rank when it is at most `r_max`, with a decomposition checked
/// against `t`; otherwise a certified `AboveMax`.
pub fn tensor_rank_bruteforce(t: &Tensor3, r_max: usize, cfg: &Config) -> Result<TensorRank> {
    match min_spanning_rank_ones(&t.slices(), r_max, cfg)? {
        SpanSearch::AboveMax { r_max } => Ok(TensorRank::AboveMax { r_max }),
        SpanSearch::Found { rank, witnesses } => {
            let decomposition = reconstruct_decomposition(t, &witnesses)?;
            if &decomposition.eval() != t {
                return Err(Error::DecompositionMismatch);
            }
            Ok(TensorRank::Exact { rank, decomposition })
        }
    }
}

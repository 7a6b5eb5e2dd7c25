use num_traits::{One, ToPrimitive};

use super::{MapFamily, SpreadingParams};
use crate::error::{Error, Result};
use crate::exec::{Config, Mode};
use crate::linalg::{rank_of_words, FieldSpec, Matrix};
use crate::subspace::{enumerate_subspaces, Subspace, SubspaceSampler};
use crate::Rational;

/// A subspace together with `dim(Σ A_i(U))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub subspace: Subspace,
    pub achieved: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Every subspace in range was checked.
    Exhaustive { checked: u128 },
    /// Only random samples were checked; absence of a counterexample proves nothing.
    RefutationOnly { samples: u64 },
}

impl Confidence {
    pub fn is_conclusive(self) -> bool {
        matches!(self, Confidence::Exhaustive { .. })
    }

    fn merge(self, other: Confidence) -> Confidence {
        use Confidence::*;
        match (self, other) {
            (Exhaustive { checked: a }, Exhaustive { checked: b }) => Exhaustive { checked: a + b },
            (RefutationOnly { samples: a }, RefutationOnly { samples: b }) => RefutationOnly { samples: a + b },
            (RefutationOnly { samples }, _) | (_, RefutationOnly { samples }) => RefutationOnly { samples },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(Confidence),
    Refuted(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Refuted(c) => Some(c),
            Verdict::Holds(_) => None,
        }
    }
}

/// Computes `dim(Σ_i A_i(U))` with the maps preprocessed once.
///
/// Over GF(2) with `n <= 64` every map is kept as its column words, so the
/// image of a basis vector is a XOR of columns.
pub(crate) struct ImageSummer {
    field: FieldSpec,
    transposed: Vec<Matrix>,
    columns: Option<Vec<Vec<u64>>>,
}

impl ImageSummer {
    pub(crate) fn new(fam: &MapFamily) -> Self {
        let columns = (fam.field().is_binary() && fam.n() <= 64).then(|| {
            fam.maps()
                .iter()
                .map(|a| {
                    (0..fam.n())
                        .map(|c| (0..fam.n()).fold(0u64, |w, r| w | ((a.get(r, c) as u64) << r)))
                        .collect()
                })
                .collect()
        });
        ImageSummer {
            field: fam.field(),
            transposed: fam.maps().iter().map(Matrix::transpose).collect(),
            columns,
        }
    }

    pub(crate) fn dim(&self, u: &Subspace) -> usize {
        if u.is_zero() {
            return 0;
        }
        let basis = u.basis();
        if let Some(columns) = &self.columns {
            let vectors: Vec<u64> = (0..basis.rows())
                .map(|r| basis.row(r).iter().enumerate().fold(0u64, |w, (c, &x)| w | ((x as u64) << c)))
                .collect();
            let mut images = Vec::with_capacity(vectors.len() * columns.len());
            for cols in columns {
                for &v in &vectors {
                    let mut bits = v;
                    let mut img = 0u64;
                    while bits != 0 {
                        img ^= cols[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    images.push(img);
                }
            }
            return rank_of_words(&mut images);
        }
        let mut stacked = Matrix::empty(self.field, basis.cols());
        for t in &self.transposed {
            stacked = stacked.vstack(&basis.mul(t));
        }
        stacked.rank()
    }
}

fn sampled_seed(seed: u64, dim: usize) -> u64 {
    seed.wrapping_add(dim as u64)
}

/// Runs `check` over the dimension-`dim` stream selected by `mode`.
fn first_failure<F>(fam: &MapFamily, dim: usize, mode: Mode, cfg: &Config, check: F) -> Result<(Option<Counterexample>, Confidence)>
where
    F: Fn(&Subspace) -> Option<usize> + Sync + Send,
{
    let (hit, confidence) = match mode {
        Mode::Exhaustive => {
            let it = enumerate_subspaces(fam.field(), fam.n(), dim, cfg.budgets.enumeration_cap)?;
            let total = it.remaining();
            (cfg.find_first(it, &check), Confidence::Exhaustive { checked: total })
        }
        Mode::Sampled { count, seed } => {
            let it = SubspaceSampler::new(fam.field(), fam.n(), dim, sampled_seed(seed, dim)).take(count as usize);
            (cfg.find_first(it, &check), Confidence::RefutationOnly { samples: count })
        }
    };
    Ok((hit.map(|(_, subspace, achieved)| Counterexample { subspace, achieved }), confidence))
}

/// Subspace of dimension `dim` with the smallest image sum (earliest on ties).
fn weakest(fam: &MapFamily, summer: &ImageSummer, dim: usize, mode: Mode, cfg: &Config) -> Result<(Counterexample, Confidence)> {
    let key = |u: &Subspace| summer.dim(u);
    let (best, confidence) = match mode {
        Mode::Exhaustive => {
            let it = enumerate_subspaces(fam.field(), fam.n(), dim, cfg.budgets.enumeration_cap)?;
            let total = it.remaining();
            (cfg.min_by_key(it, key), Confidence::Exhaustive { checked: total })
        }
        Mode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidArgument("sampled mode needs at least one sample".into()));
            }
            let it = SubspaceSampler::new(fam.field(), fam.n(), dim, sampled_seed(seed, dim)).take(count as usize);
            (cfg.min_by_key(it, key), Confidence::RefutationOnly { samples: count })
        }
    };
    let (_, subspace, achieved) = best.expect("nonempty subspace stream");
    Ok((Counterexample { subspace, achieved }, confidence))
}

/// Checks `dim(Σ A_i(U)) >= t` for every `U` of dimension exactly `s`.
///
/// Image sums are monotone in `U`, so dimension `s` is the binding case for
/// the "every `dim(U) >= s`" quantifier.
pub fn verify_spreading(fam: &MapFamily, params: SpreadingParams, mode: Mode, cfg: &Config) -> Result<Verdict> {
    params.check(fam.n())?;
    let summer = ImageSummer::new(fam);
    let (cx, confidence) = first_failure(fam, params.s, mode, cfg, |u| {
        let d = summer.dim(u);
        (d < params.t).then_some(d)
    })?;
    Ok(cx.map_or(Verdict::Holds(confidence), Verdict::Refuted))
}

/// `achieved >= (1 + tau) * dim`, exactly.
fn meets_expansion(achieved: usize, dim: usize, tau: Rational) -> bool {
    let (num, den) = (*tau.numer() as i128, *tau.denom() as i128);
    achieved as i128 * den >= (den + num) * dim as i128
}

/// Checks `dim(Σ A_i(U)) >= (1+τ) dim(U)` for every `U` with `1 <= dim(U) <= n/2`.
pub fn verify_expander(fam: &MapFamily, tau: Rational, mode: Mode, cfg: &Config) -> Result<Verdict> {
    let summer = ImageSummer::new(fam);
    let mut confidence: Option<Confidence> = None;
    for dim in 1..=fam.n() / 2 {
        let (cx, conf) = first_failure(fam, dim, mode, cfg, |u| {
            let d = summer.dim(u);
            (!meets_expansion(d, dim, tau)).then_some(d)
        })?;
        if let Some(cx) = cx {
            return Ok(Verdict::Refuted(cx));
        }
        confidence = Some(confidence.map_or(conf, |c| c.merge(conf)));
    }
    Ok(Verdict::Holds(confidence.unwrap_or(Confidence::Exhaustive { checked: 0 })))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    /// Largest τ for which the family is a τ-expander over the checked subspaces.
    pub tau_star: Rational,
    /// A subspace attaining the minimum ratio (smallest dimension, then earliest).
    pub witness: Counterexample,
    /// `(dim, minimum image-sum dimension)` for `dim = 1..=n/2`.
    pub per_dimension: Vec<(usize, usize)>,
    pub confidence: Confidence,
}

pub fn measure_expansion(fam: &MapFamily, mode: Mode, cfg: &Config) -> Result<ExpansionReport> {
    if fam.n() < 2 {
        return Err(Error::InvalidArgument("expansion needs n >= 2 (no subspace with 1 <= dim <= n/2)".into()));
    }
    let summer = ImageSummer::new(fam);
    let mut per_dimension = Vec::new();
    let mut best: Option<(Rational, Counterexample)> = None;
    let mut confidence: Option<Confidence> = None;
    for dim in 1..=fam.n() / 2 {
        let (cx, conf) = weakest(fam, &summer, dim, mode, cfg)?;
        per_dimension.push((dim, cx.achieved));
        let ratio = Rational::new(cx.achieved as i64, dim as i64);
        if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
            best = Some((ratio, cx));
        }
        confidence = Some(confidence.map_or(conf, |c| c.merge(conf)));
    }
    let (ratio, witness) = best.expect("at least one dimension");
    Ok(ExpansionReport {
        tau_star: ratio - Rational::one(),
        witness,
        per_dimension,
        confidence: confidence.expect("at least one dimension"),
    })
}

/// Per-dimension outcome of the large-subspace expansion check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeDimStats {
    pub dim: usize,
    /// `α = dim / n`
    pub alpha: Rational,
    /// `(1 + τ(1-α)/2) · dim`
    pub required: Rational,
    pub min_achieved: usize,
    /// `min_achieved / dim - 1`
    pub min_delta: Rational,
    /// `τ(1-α) / ((1+τ)α)`
    pub sharper_bound: Rational,
    pub sharper_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeExpansionReport {
    pub verdict: Verdict,
    /// Whether the τ-expander hypothesis itself was verified exhaustively
    /// (false when its enumeration exceeded the budget).
    pub expander_checked: bool,
    pub per_dimension: Vec<LargeDimStats>,
}

/// For a transpose-closed family containing the identity, checks
/// `dim(Σ A_i(U)) >= (1 + τ(1-α)/2) dim(U)` for every `U` with
/// `n/2 < dim(U) < n`, `α = dim(U)/n`.
pub fn verify_large_expansion(fam: &MapFamily, tau: Rational, cfg: &Config) -> Result<LargeExpansionReport> {
    if let Some(defect) = fam.closure_defect() {
        return Err(Error::ClosureViolation(defect));
    }
    let expander_checked = match verify_expander(fam, tau, Mode::Exhaustive, cfg) {
        Ok(Verdict::Holds(_)) => true,
        Ok(Verdict::Refuted(cx)) => return Err(Error::NotExpander(Box::new(cx))),
        Err(Error::BudgetExceeded { .. }) => false,
        Err(e) => return Err(e),
    };

    let n = fam.n();
    let summer = ImageSummer::new(fam);
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let mut per_dimension = Vec::new();
    let mut total = 0u128;
    for dim in n / 2 + 1..n {
        let d = Rational::from_integer(dim as i64);
        let alpha = Rational::new(dim as i64, n as i64);
        let required = (one + tau * (one - alpha) / two) * d;
        let (weak, conf) = weakest(fam, &summer, dim, Mode::Exhaustive, cfg)?;
        if let Confidence::Exhaustive { checked } = conf {
            total += checked;
        }
        let min_delta = Rational::from_integer(weak.achieved as i64) / d - one;
        let sharper_bound = tau * (one - alpha) / ((one + tau) * alpha);
        per_dimension.push(LargeDimStats {
            dim,
            alpha,
            required,
            min_achieved: weak.achieved,
            min_delta,
            sharper_bound,
            sharper_holds: min_delta >= sharper_bound,
        });
        if Rational::from_integer(weak.achieved as i64) < required {
            let (cx, _) = first_failure(fam, dim, Mode::Exhaustive, cfg, |u| {
                let a = summer.dim(u);
                (Rational::from_integer(a as i64) < required).then_some(a)
            })?;
            return Ok(LargeExpansionReport {
                verdict: Verdict::Refuted(cx.expect("a failing subspace exists")),
                expander_checked,
                per_dimension,
            });
        }
    }
    Ok(LargeExpansionReport {
        verdict: Verdict::Holds(Confidence::Exhaustive { checked: total }),
        expander_checked,
        per_dimension,
    })
}

/// Largest `t` with `(s,t)`-spreading, for every `s = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingProfile {
    /// `(s, min over dim-s subspaces of dim(Σ A_i(U)))`
    pub entries: Vec<(usize, usize)>,
    pub confidence: Confidence,
}

impl SpreadingProfile {
    /// Largest certified `t` for a given `s`.
    pub fn t_max(&self, s: usize) -> Option<usize> {
        self.entries.iter().find(|(k, _)| *k == s).map(|&(_, t)| t)
    }

    /// Rank bound `n + t - s` maximised over the entries with `t >= 1`.
    pub fn best_rank_bound(&self, n: usize) -> usize {
        self.entries
            .iter()
            .filter(|&&(_, t)| t >= 1)
            .map(|&(s, t)| n + t - s)
            .max()
            .unwrap_or(0)
    }
}

pub fn spreading_profile(fam: &MapFamily, mode: Mode, cfg: &Config) -> Result<SpreadingProfile> {
    let summer = ImageSummer::new(fam);
    let mut entries = Vec::new();
    let mut confidence: Option<Confidence> = None;
    for s in 1..=fam.n() {
        let (weak, conf) = weakest(fam, &summer, s, mode, cfg)?;
        entries.push((s, weak.achieved));
        confidence = Some(confidence.map_or(conf, |c| c.merge(conf)));
    }
    Ok(SpreadingProfile {
        entries,
        confidence: confidence.unwrap_or(Confidence::Exhaustive { checked: 0 }),
    })
}

impl ExpansionReport {
    pub fn tau_star_f64(&self) -> f64 {
        self.tau_star.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Budgets;

    fn gf2(rows: &[&[u32]]) -> Matrix {
        Matrix::from_rows(FieldSpec::GF2, rows).unwrap()
    }

    fn i_n_nt() -> MapFamily {
        let n = gf2(&[&[0, 1], &[0, 0]]);
        MapFamily::new(FieldSpec::GF2, 2, vec![Matrix::identity(FieldSpec::GF2, 2), n.clone(), n.transpose()]).unwrap()
    }

    fn i_c() -> MapFamily {
        let c = gf2(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        MapFamily::new(FieldSpec::GF2, 3, vec![Matrix::identity(FieldSpec::GF2, 3), c]).unwrap()
    }

    fn ones3() -> Subspace {
        Subspace::span_of(&gf2(&[&[1, 1, 1]]))
    }

    fn cfg() -> Config {
        Config::new(2)
    }

    #[test]
    fn summer_agrees_with_direct_image_sum() {
        for p in [2u64, 3] {
            let f = FieldSpec::new(p).unwrap();
            for seed in 0..10 {
                let fam = MapFamily::random(f, 3, 2, seed).unwrap();
                let summer = ImageSummer::new(&fam);
                for s in 0..=3 {
                    for u in enumerate_subspaces(f, 3, s, u128::MAX).unwrap() {
                        assert_eq!(summer.dim(&u), fam.image_sum(&u).unwrap().dim());
                    }
                }
            }
        }
    }

    #[test]
    fn spreading_examples() {
        let v = verify_spreading(&i_c(), SpreadingParams::new(1, 2), Mode::Exhaustive, &cfg()).unwrap();
        assert_eq!(
            v,
            Verdict::Refuted(Counterexample {
                subspace: ones3(),
                achieved: 1
            })
        );
        let v = verify_spreading(&i_n_nt(), SpreadingParams::new(1, 2), Mode::Exhaustive, &cfg()).unwrap();
        assert_eq!(v, Verdict::Holds(Confidence::Exhaustive { checked: 3 }));

        let id = MapFamily::new(FieldSpec::GF2, 3, vec![Matrix::identity(FieldSpec::GF2, 3)]).unwrap();
        assert!(verify_spreading(&id, SpreadingParams::new(1, 1), Mode::Exhaustive, &cfg()).unwrap().holds());
    }

    #[test]
    fn sampled_spreading_is_refutation_only() {
        let mode = Mode::Sampled { count: 50, seed: 3 };
        let v = verify_spreading(&i_n_nt(), SpreadingParams::new(1, 2), mode, &cfg()).unwrap();
        assert_eq!(v, Verdict::Holds(Confidence::RefutationOnly { samples: 50 }));
        assert!(!Confidence::RefutationOnly { samples: 50 }.is_conclusive());
        let v = verify_spreading(&i_c(), SpreadingParams::new(1, 2), mode, &cfg()).unwrap();
        assert_eq!(v.counterexample().unwrap().subspace, ones3());
    }

    #[test]
    fn spreading_budget() {
        let tight = Config::with_budgets(1, Budgets { enumeration_cap: 5, ..Budgets::default() });
        let err = verify_spreading(&i_c(), SpreadingParams::new(1, 2), Mode::Exhaustive, &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn expander_examples() {
        let one = Rational::one();
        assert!(verify_expander(&i_n_nt(), one, Mode::Exhaustive, &cfg()).unwrap().holds());
        let id = MapFamily::new(FieldSpec::GF2, 4, vec![Matrix::identity(FieldSpec::GF2, 4)]).unwrap();
        assert!(!verify_expander(&id, Rational::new(1, 10), Mode::Exhaustive, &cfg()).unwrap().holds());
        let v = verify_expander(&i_c(), one, Mode::Exhaustive, &cfg()).unwrap();
        assert_eq!(v.counterexample().unwrap().subspace, ones3());
    }

    #[test]
    fn measure_examples() {
        let r = measure_expansion(&i_n_nt(), Mode::Exhaustive, &cfg()).unwrap();
        assert_eq!(r.tau_star, Rational::one());
        assert_eq!(r.witness.subspace.dim(), 1);
        assert_eq!(r.per_dimension, vec![(1, 2)]);

        let id = MapFamily::new(FieldSpec::GF2, 4, vec![Matrix::identity(FieldSpec::GF2, 4)]).unwrap();
        assert_eq!(measure_expansion(&id, Mode::Exhaustive, &cfg()).unwrap().tau_star, Rational::from_integer(0));

        let r = measure_expansion(&i_c(), Mode::Exhaustive, &cfg()).unwrap();
        assert_eq!(r.tau_star, Rational::from_integer(0));
        assert_eq!(r.witness.subspace, ones3());

        let tiny = MapFamily::new(FieldSpec::GF2, 1, vec![Matrix::identity(FieldSpec::GF2, 1)]).unwrap();
        assert!(measure_expansion(&tiny, Mode::Exhaustive, &cfg()).is_err());
    }

    #[test]
    fn measure_is_consistent_with_verify() {
        for seed in 0..25 {
            let fam = MapFamily::random(FieldSpec::GF2, 4, 1 + seed as usize % 2, seed).unwrap().symmetrize();
            let r = measure_expansion(&fam, Mode::Exhaustive, &cfg()).unwrap();
            assert!(verify_expander(&fam, r.tau_star, Mode::Exhaustive, &cfg()).unwrap().holds());
            let above = r.tau_star + Rational::new(1, 12);
            assert!(!verify_expander(&fam, above, Mode::Exhaustive, &cfg()).unwrap().holds());
            let min_ratio = r
                .per_dimension
                .iter()
                .map(|&(d, a)| Rational::new(a as i64, d as i64))
                .min()
                .unwrap();
            assert_eq!(r.tau_star, min_ratio - Rational::one());
        }
    }

    #[test]
    fn expander_implies_small_spreading() {
        for seed in 0..20 {
            let fam = MapFamily::random(FieldSpec::GF2, 4, 2, 500 + seed).unwrap().symmetrize();
            let tau = measure_expansion(&fam, Mode::Exhaustive, &cfg()).unwrap().tau_star;
            for s in 1..=2usize {
                let t = ((Rational::one() + tau) * Rational::from_integer(s as i64)).ceil().to_integer() as usize;
                let v = verify_spreading(&fam, SpreadingParams::new(s, t), Mode::Exhaustive, &cfg()).unwrap();
                assert!(v.holds(), "seed {seed} s {s}");
            }
        }
    }

    #[test]
    fn spreading_is_monotone_in_params() {
        for seed in 0..20 {
            let fam = MapFamily::random(FieldSpec::GF2, 4, 1 + seed as usize % 3, 900 + seed).unwrap();
            for s in 1..=4 {
                for t in 0..=4 {
                    let v = verify_spreading(&fam, SpreadingParams::new(s, t), Mode::Exhaustive, &cfg()).unwrap();
                    if !v.holds() {
                        continue;
                    }
                    for s2 in s..=4 {
                        for t2 in 0..=t {
                            let v2 = verify_spreading(&fam, SpreadingParams::new(s2, t2), Mode::Exhaustive, &cfg()).unwrap();
                            assert!(v2.holds());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn large_expansion_requires_closure() {
        let n = MapFamily::new(FieldSpec::GF2, 2, vec![gf2(&[&[0, 1], &[0, 0]])]).unwrap();
        assert!(matches!(
            verify_large_expansion(&n, Rational::one(), &cfg()),
            Err(Error::ClosureViolation(_))
        ));
    }

    #[test]
    fn large_expansion_rejects_non_expander() {
        let fam = MapFamily::shifts(FieldSpec::GF2, 4).unwrap();
        assert!(matches!(
            verify_large_expansion(&fam, Rational::from_integer(5), &cfg()),
            Err(Error::NotExpander(_))
        ));
    }

    #[test]
    fn large_expansion_on_symmetrized_gf2_4() {
        let fam = MapFamily::shifts(FieldSpec::GF2, 4).unwrap();
        assert!(fam.is_symmetric_closed());
        let tau = measure_expansion(&fam, Mode::Exhaustive, &cfg()).unwrap().tau_star;
        let rep = verify_large_expansion(&fam, tau, &cfg()).unwrap();
        assert!(rep.verdict.holds());
        assert!(rep.expander_checked);
        assert_eq!(rep.per_dimension.len(), 1);
        assert_eq!(rep.per_dimension[0].dim, 3);
        assert_eq!(rep.per_dimension[0].alpha, Rational::new(3, 4));
        assert_eq!(rep.verdict, Verdict::Holds(Confidence::Exhaustive { checked: 15 }));
    }

    #[test]
    fn profile_matches_verify() {
        let fam = i_c();
        let prof = spreading_profile(&fam, Mode::Exhaustive, &cfg()).unwrap();
        for &(s, t) in &prof.entries {
            assert!(verify_spreading(&fam, SpreadingParams::new(s, t), Mode::Exhaustive, &cfg()).unwrap().holds());
            if t < 3 {
                assert!(!verify_spreading(&fam, SpreadingParams::new(s, t + 1), Mode::Exhaustive, &cfg()).unwrap().holds());
            }
        }
        assert_eq!(prof.t_max(1), Some(1));
    }
}

//! Rank lower bounds from spreading certificates, and the converse
//! refutation: a decomposition with too few terms is turned into an explicit
//! subspace on which the family fails to spread.

use crate::error::{Error, Result};
use crate::exec::{Config, Mode};
use crate::families::{verify_spreading, Confidence, MapFamily, SpreadingParams, Verdict};
use crate::linalg::{FieldSpec, Matrix};
use crate::subspace::Subspace;
use crate::tensor::{Decomposition, Tensor3};

/// `n + t - s`
pub fn rank_lower_bound(n: usize, params: SpreadingParams) -> usize {
    n + params.t - params.s
}

/// The family tensor has rank at least `bound = n + t - s`, provided the
/// spreading check behind `confidence` is conclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundCertificate {
    pub family: MapFamily,
    pub params: SpreadingParams,
    pub confidence: Confidence,
    pub bound: usize,
}

impl LowerBoundCertificate {
    /// Sampled spreading checks never certify.
    pub fn is_conclusive(&self) -> bool {
        self.confidence.is_conclusive()
    }
}

pub fn certify_lower_bound(
    fam: &MapFamily,
    params: SpreadingParams,
    mode: Mode,
    cfg: &Config,
) -> Result<LowerBoundCertificate> {
    require_positive_t(params)?;
    match verify_spreading(fam, params, mode, cfg)? {
        Verdict::Holds(confidence) => Ok(LowerBoundCertificate {
            family: fam.clone(),
            params,
            confidence,
            bound: rank_lower_bound(fam.n(), params),
        }),
        Verdict::Refuted(cx) => Err(Error::NotSpreading(Box::new(cx))),
    }
}

/// Every family is `(s,0)`-spreading, so `t = 0` yields no rank bound.
fn require_positive_t(params: SpreadingParams) -> Result<()> {
    if params.t == 0 {
        return Err(Error::InvalidArgument("the rank bound needs t >= 1".into()));
    }
    Ok(())
}

/// Witness that a family is not `(s,t)`-spreading, extracted from a
/// decomposition of its tensor with fewer than `n + t - s` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationTrace {
    /// Number of terms `r` in the decomposition.
    pub terms: usize,
    /// 0-based term indices `S = {0, ..., |S|-1}` with `|S| = min(n - s, r)`.
    pub s_indices: Vec<usize>,
    /// `∩_{ℓ∈S} Ker(E_ℓ)`
    pub k_s: Subspace,
    /// `Σ_{ℓ∉S} Im(E_ℓ)`
    pub i_sbar: Subspace,
    /// The subspace that fails to spread (equal to `k_s`).
    pub violating: Subspace,
    /// `dim(Σ_i A_i(violating))`
    pub achieved: usize,
}

impl RefutationTrace {
    pub fn complement_size(&self) -> usize {
        self.terms - self.s_indices.len()
    }
}

fn stack(field: FieldSpec, cols: usize, mats: impl Iterator<Item = Matrix>) -> Matrix {
    mats.fold(Matrix::zeros(field, 0, cols), |acc, m| acc.vstack(&m))
}

/// Replays the contradiction argument on a concrete decomposition.
///
/// With `E_ℓ = g^ℓ (h^ℓ)ᵀ` and `S` the first `n - s` terms, every slice maps
/// `K_S` into `I_S̄`, `dim K_S >= s` and `dim I_S̄ <= r - |S| < t`. All of these
/// are re-checked before the trace is returned.
pub fn refute_spreading(fam: &MapFamily, d: &Decomposition, params: SpreadingParams) -> Result<RefutationTrace> {
    params.check(fam.n())?;
    require_positive_t(params)?;
    let n = fam.n();
    let field = fam.field();
    let target = Tensor3::from_family(fam);
    if d.field() != field || d.dims() != target.dims() || d.eval() != target {
        return Err(Error::DecompositionMismatch);
    }
    let r = d.len();
    let bound = rank_lower_bound(n, params);
    if r >= bound {
        return Err(Error::TooManyTerms { terms: r, bound });
    }

    let es = d.rank_one_matrices();
    let s_len = (n - params.s).min(r);
    let s_indices: Vec<usize> = (0..s_len).collect();

    let k_s = if s_len == 0 {
        Subspace::full(field, n)
    } else {
        stack(field, n, es[..s_len].iter().cloned()).kernel()
    };
    let i_sbar = Subspace::span_of(&stack(field, n, es[s_len..].iter().map(Matrix::transpose)));

    let image = fam.image_sum(&k_s)?;
    let achieved = image.dim();

    let complement = r - s_len;
    let fail = |msg: String| Err(Error::TraceInvalid(msg));
    if k_s.dim() < n - s_len {
        return fail(format!("dim K_S = {} < n - |S| = {}", k_s.dim(), n - s_len));
    }
    if k_s.dim() < params.s {
        return fail(format!("dim K_S = {} < s = {}", k_s.dim(), params.s));
    }
    if i_sbar.dim() > complement {
        return fail(format!("dim I_Sbar = {} > |Sbar| = {complement}", i_sbar.dim()));
    }
    if !image.is_subspace_of(&i_sbar)? {
        return fail("slice images of K_S escape I_Sbar".into());
    }
    if complement >= params.t || achieved >= params.t {
        return fail(format!("achieved {achieved} with |Sbar| = {complement} is not below t = {}", params.t));
    }

    Ok(RefutationTrace {
        terms: r,
        s_indices,
        violating: k_s.clone(),
        k_s,
        i_sbar,
        achieved,
    })
}

/// Independent check of a trace: the violating subspace has dimension at
/// least `s` and its image sum has dimension below `t`.
pub fn check_trace(fam: &MapFamily, params: SpreadingParams, trace: &RefutationTrace) -> bool {
    let u = &trace.violating;
    if u.field() != fam.field() || u.ambient() != fam.n() || u.dim() < params.s {
        return false;
    }
    fam.image_sum(u).is_ok_and(|img| img.dim() < params.t)
}

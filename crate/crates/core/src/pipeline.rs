//! End-to-end chain from a seed family to a certified rank lower bound:
//! symmetrize, measure τ*, pick the word length, take words, verify
//! spreading at `(⌈εn⌉, ⌈(1-ε)n⌉)`, and optionally cross-check the bound
//! against an exact rank computation.

use std::fmt::Write as _;

use num_traits::Signed;

use crate::certify::{rank_lower_bound, LowerBoundCertificate};
use crate::error::{Error, Result};
use crate::exec::{Config, Mode};
use crate::families::{
    measure_expansion, verify_spreading, word_length_for, Confidence, Counterexample, ExpansionReport, MapFamily,
    SpreadingParams, Verdict,
};
use crate::linalg::FieldSpec;
use crate::report;
use crate::tensor::{tensor_rank_bruteforce, Tensor3, TensorRank};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub epsilon: Rational,
    pub mode: Mode,
    /// Run the brute-force rank cross-check when `n` is at most this.
    pub cross_check_max_n: usize,
}

impl PipelineOptions {
    pub fn new(epsilon: Rational, mode: Mode) -> Self {
        PipelineOptions {
            epsilon,
            mode,
            cross_check_max_n: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossCheck {
    Exact { rank: usize },
    AboveMax { r_max: usize },
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Certified,
    Refuted {
        stage: &'static str,
        counterexample: Counterexample,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub field: FieldSpec,
    pub n: usize,
    pub options: PipelineOptions,
    pub params: SpreadingParams,
    pub input_maps: usize,
    pub symmetrized_maps: usize,
    pub expansion: ExpansionReport,
    pub word_length: Option<u64>,
    pub word_maps: Option<usize>,
    pub spreading: Option<Confidence>,
    pub certificate: Option<LowerBoundCertificate>,
    pub cross_check: Option<CrossCheck>,
    pub outcome: Outcome,
}

pub fn run_pipeline(fam: &MapFamily, opts: PipelineOptions, cfg: &Config) -> Result<PipelineReport> {
    let n = fam.n();
    let params = SpreadingParams::from_epsilon(opts.epsilon, n)?;
    params.check(n)?;

    let sym = fam.symmetrize();
    let expansion = measure_expansion(&sym, opts.mode, cfg).map_err(Error::in_stage("measure tau*"))?;
    let mut rep = PipelineReport {
        field: fam.field(),
        n,
        options: opts,
        params,
        input_maps: fam.len(),
        symmetrized_maps: sym.len(),
        expansion,
        word_length: None,
        word_maps: None,
        spreading: None,
        certificate: None,
        cross_check: None,
        outcome: Outcome::Certified,
    };
    if !rep.expansion.tau_star.is_positive() {
        rep.outcome = Outcome::Refuted {
            stage: "measure tau*",
            counterexample: rep.expansion.witness.clone(),
        };
        return Ok(rep);
    }

    let t = word_length_for(opts.epsilon, rep.expansion.tau_star).map_err(Error::in_stage("word length"))?;
    rep.word_length = Some(t);
    let t = usize::try_from(t).map_err(|_| Error::InvalidArgument(format!("word length {t} too large")))?;
    let words = sym.words(t, &cfg.budgets).map_err(Error::in_stage("words"))?;
    rep.word_maps = Some(words.len());

    match verify_spreading(&words, params, opts.mode, cfg).map_err(Error::in_stage("verify spreading"))? {
        Verdict::Refuted(cx) => {
            rep.outcome = Outcome::Refuted {
                stage: "verify spreading",
                counterexample: cx,
            };
            return Ok(rep);
        }
        Verdict::Holds(confidence) => {
            rep.spreading = Some(confidence);
            rep.certificate = Some(LowerBoundCertificate {
                params,
                confidence,
                bound: rank_lower_bound(n, params),
                family: words.clone(),
            });
        }
    }

    if n <= opts.cross_check_max_n {
        let tensor = Tensor3::from_family(&words);
        rep.cross_check = Some(match tensor_rank_bruteforce(&tensor, n * n, cfg) {
            Ok(TensorRank::Exact { rank, .. }) => CrossCheck::Exact { rank },
            Ok(TensorRank::AboveMax { r_max }) => CrossCheck::AboveMax { r_max },
            Err(e @ Error::BudgetExceeded { .. }) => CrossCheck::Skipped(e.to_string()),
            Err(e) => return Err(Error::in_stage("rank cross-check")(e)),
        });
    }
    Ok(rep)
}

impl PipelineReport {
    pub fn certified(&self) -> bool {
        self.outcome == Outcome::Certified
    }

    /// `None` when no exact rank was computed.
    pub fn cross_check_consistent(&self) -> Option<bool> {
        match (&self.cross_check, &self.certificate) {
            (Some(CrossCheck::Exact { rank }), Some(c)) => Some(!c.is_conclusive() || *rank >= c.bound),
            (Some(CrossCheck::AboveMax { .. }), Some(_)) => Some(true),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "field: {}", self.field);
        let _ = writeln!(w, "n: {}", self.n);
        let _ = writeln!(w, "epsilon: {}", self.options.epsilon);
        let _ = writeln!(w, "mode: {}", self.options.mode);
        let _ = writeln!(w, "s: {}", self.params.s);
        let _ = writeln!(w, "t: {}", self.params.t);
        let _ = writeln!(w, "input-maps: {}", self.input_maps);
        let _ = writeln!(w, "symmetrized-maps: {}", self.symmetrized_maps);
        let _ = writeln!(w, "tau-star: {}", self.expansion.tau_star);
        let _ = writeln!(w, "tau-confidence: {}", report::confidence(self.expansion.confidence));
        if let Some(t) = self.word_length {
            let _ = writeln!(w, "word-length: {t}");
        }
        if let Some(k) = self.word_maps {
            let _ = writeln!(w, "word-maps: {k}");
        }
        if let Some(c) = self.spreading {
            let _ = writeln!(w, "spreading: holds, {}", report::confidence(c));
        }
        if let Some(c) = &self.certificate {
            let _ = writeln!(w, "certified-bound: {}", c.bound);
            let _ = writeln!(w, "conclusive: {}", c.is_conclusive());
        }
        if let Some(x) = &self.cross_check {
            let theory = self.certificate.as_ref().map_or(0, |c| c.bound);
            match x {
                CrossCheck::Exact { rank } => {
                    let _ = writeln!(w, "bruteforce-rank: {rank} (theoretical bound {theory})");
                }
                CrossCheck::AboveMax { r_max } => {
                    let _ = writeln!(w, "bruteforce-rank: > {r_max} (theoretical bound {theory})");
                }
                CrossCheck::Skipped(why) => {
                    let _ = writeln!(w, "bruteforce-rank: skipped, {why} (theoretical bound {theory})");
                }
            }
            if let Some(ok) = self.cross_check_consistent() {
                let _ = writeln!(w, "bruteforce-consistent: {ok}");
            }
        }
        match &self.outcome {
            Outcome::Certified => {
                let _ = writeln!(w, "outcome: certified");
            }
            Outcome::Refuted { stage, counterexample } => {
                let _ = writeln!(w, "outcome: refuted at {stage}");
                w.push_str(&report::counterexample(counterexample));
            }
        }
        out
    }
}

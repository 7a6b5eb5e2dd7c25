use thiserror::Error;

use crate::families::Counterexample;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 65536)")]
    NotPrime(u64),

    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{stage}: {required} exceeds budget cap {cap}")]
    BudgetExceeded {
        stage: &'static str,
        required: String,
        cap: u128,
    },

    #[error("linear system has no solution")]
    NoSolution,

    #[error("matching is not monotone: pairs ({}, {}) and ({}, {})", .first.0 + 1, .first.1 + 1, .second.0 + 1, .second.1 + 1)]
    NotMonotone {
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("matching reuses vertex: {0}")]
    NotAMatching(String),

    #[error("family is not closed: {0}")]
    ClosureViolation(String),

    #[error("family is not (s,t)-spreading; counterexample of dimension {} reaches {}", .0.subspace.dim(), .0.achieved)]
    NotSpreading(Box<Counterexample>),

    #[error("family is not a tau-expander; counterexample of dimension {} reaches {}", .0.subspace.dim(), .0.achieved)]
    NotExpander(Box<Counterexample>),

    #[error("matrix has rank {0}, expected at most 1")]
    NotRankOne(usize),

    #[error("slice {0} lies outside the span of the witnesses")]
    SpanFailure(usize),

    #[error("decomposition does not evaluate to the family tensor")]
    DecompositionMismatch,

    #[error("decomposition has {terms} terms but n + t - s = {bound}; no contradiction available")]
    TooManyTerms { terms: usize, bound: usize },

    #[error("refutation trace failed its own check: {0}")]
    TraceInvalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    /// Strips [`Error::Stage`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Finite-field linear algebra, dimension expanders and spreading families,
//! and rank lower bounds for the three-way tensors they define.

pub mod certify;
pub mod error;
pub mod exec;
pub mod families;
pub mod format;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod subspace;
pub mod tensor;

/// Exact rational used for expansion factors and `ε`.
pub type Rational = num_rational::Ratio<i64>;

pub use error::{Error, Result};
pub use exec::{Budgets, Config, Mode};
pub use linalg::{FieldSpec, Matrix};
pub use subspace::Subspace;

//! Exact dense linear algebra over prime fields.

mod field;
mod gf2;
mod matrix;

pub use field::{FieldSpec, MODULUS_LIMIT};
pub use matrix::{Matrix, Rref};

pub(crate) use gf2::rank_of_words;

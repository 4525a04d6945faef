//! Expression trees, homogeneous terms and truncated classical symbol series.

mod diffeo;
mod expr;
mod multi_index;
pub mod sampling;
mod symbol;
mod term;

use thiserror::Error;

pub use diffeo::Diffeo;
pub use expr::{DomainError, Expr, Node, Var, VarKind, DENOMINATOR_FLOOR};
pub use multi_index::MultiIndex;
pub use symbol::{binomial, make_lambda_s, xi_norm_pow, ClassicalSymbol, DEGREE_TOL};
pub use term::{HomogeneityReport, HomogeneousTerm, SEMANTIC_TOL};

#[cfg(test)]
pub(crate) use term::is_zero_expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("term of degree {degree} fails Euler's relation (residual {residual:e})")]
    NotHomogeneous { degree: f64, residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("term degree {degree} exceeds symbol order {order}")]
    DegreeAboveOrder { degree: f64, order: f64 },
    #[error("truncation order must be positive")]
    InvalidTruncation,
    #[error("invalid diffeomorphism: {0}")]
    InvalidDiffeo(String),
}

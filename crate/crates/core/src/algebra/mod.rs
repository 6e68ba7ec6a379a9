//! Exact field arithmetic and sparse multivariate polynomials.

mod field;
mod monomial;
mod poly;
pub mod prime;
mod series;
pub(crate) mod text;

pub use field::{Field, FieldElem};
pub use monomial::Monomial;
pub use poly::{HomMode, SparsePolynomial};
pub use prime::{bertrand_prime, bertrand_prime_big, is_prime_big, is_prime_u64};
pub use series::{
    deriv_order_at_root, esym, esym_by_subsets, esym_upto, root_lift, series_inverse,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: Field, right: Field },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable {var} out of range for {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("derivative of order {order} unsupported in characteristic {p}")]
    UnsupportedCharacteristic { p: u64, order: u32 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dP/dY vanishes at the start point (root is not simple)")]
    NonSimpleRoot,
    #[error("no prime in ({lo}, {hi}]")]
    NoPrimeInRange { lo: String, hi: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl AlgebraError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        AlgebraError::Parse {
            line,
            message: message.into(),
        }
    }

    /// Re-anchors a parse error at `line`; other errors become parse errors
    /// at that line.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            AlgebraError::Parse { message, .. } => AlgebraError::Parse { line, message },
            other => AlgebraError::Parse {
                line,
                message: other.to_string(),
            },
        }
    }
}

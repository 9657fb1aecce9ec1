//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("determinant is not a nonzero rational multiple of h")]
    NotProportional,
    #[error("no Euler complement: divisor is not linear free with these fields")]
    NoEulerComplement,
    #[error("Lie bracket does not close in the given basis")]
    BracketNotClosed,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("computation budget exceeded")]
    BudgetExceeded,
    #[error("unknown catalog id `{0}`")]
    UnknownCatalogId(String),
}

pub type Result<T> = std::result::Result<T, Error>;

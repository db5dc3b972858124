use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is singular (zero pivot at column {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("numerical failure in {what} at iteration {iteration}")]
    NumericalFailure { what: &'static str, iteration: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("right-hand side is not in the range of the eigenvectors (unexplained residual {residual:e} of norm {norm:e})")]
    RhsNotInRange { residual: f64, norm: f64 },

    #[error("bound not applicable: {0}")]
    Inapplicable(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

/// Errors raised by the numerical kernels and the state file reader.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("grid of {n_points} points is too small (need a power of two >= {required})")]
    GridSize { n_points: usize, required: usize },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("tail tolerance {tail_tol:e} not reached with l_max = {l_max}")]
    TailUnreachable { tail_tol: f64, l_max: i64 },

    #[error("covariance matrix is singular (det = {det:e}) while the mean vector is nonzero")]
    SingularCovariance { det: f64 },

    #[error("covariance matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("ladder weight e^{{-l}} overflows for l = {l}")]
    Overflow { l: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed state file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// Input and I/O problems, as opposed to numeric-domain failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::Parse(_) | Error::InvalidState(_) | Error::NotNormalized { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

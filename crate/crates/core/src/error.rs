use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("dimension {dim} exceeds the configured maximum of {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("operator is not Hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not unitary (max |U^dag U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("matrix function undefined at eigenvalue {0:e}")]
    Domain(f64),

    #[error("unitary does not conserve energy (residual {0:e})")]
    NotEnergyConserving(f64),

    #[error("map does not preserve the thermal state (trace-norm deviation {0:e})")]
    NotGibbsPreserving(f64),

    #[error("channel does not realize the requested transition (max deviation {0:e})")]
    TransitionMismatch(f64),

    #[error("support condition violated: {0}")]
    Support(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSquare { .. } => "not_square",
            Error::NonFinite => "non_finite",
            Error::TooLarge { .. } => "too_large",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotPositive(_) => "not_positive",
            Error::BadTrace(_) => "bad_trace",
            Error::NotUnitary(_) => "not_unitary",
            Error::Domain(_) => "domain",
            Error::NotEnergyConserving(_) => "not_energy_conserving",
            Error::NotGibbsPreserving(_) => "not_gibbs_preserving",
            Error::TransitionMismatch(_) => "transition_mismatch",
            Error::Support(_) => "support",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::BoundViolation(_) => "bound_violation",
            Error::Inconsistent(_) => "inconsistent",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

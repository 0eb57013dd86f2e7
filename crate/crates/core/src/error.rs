use thiserror::Error;

use crate::matrixcore::CMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("asymmetry residual {residual:e} exceeds tolerance {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// The eigensolver did not converge. Carries the offending input for diagnosis.
    #[error("eigensolver failed to converge on a {}x{} input", .input.nrows(), .input.ncols())]
    EigenFailure { input: Box<CMatrix> },

    #[error("spectral function undefined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPositive { eigenvalue: f64, tol: f64 },

    #[error("spectrum [{min:e}, {max:e}] is outside the unit interval")]
    NotInUnitInterval { min: f64, max: f64 },

    #[error("not a projection: idempotence residual {residual:e}")]
    NotProjection { residual: f64 },

    #[error("projection family is not a resolution of the identity: residual {residual:e}")]
    NotResolution { residual: f64 },

    #[error("{what} do not commute: commutator norm {residual:e}")]
    NonCommuting { what: String, residual: f64 },

    #[error("{which} is not strict")]
    NotStrict { which: String },

    #[error("{which} has eigenvalue {eigenvalue:e} too close to 0 or 1")]
    NearDegenerate { which: String, eigenvalue: f64 },

    #[error("pair is not absolutely compatible: residual {residual:e}")]
    NotCompatible { residual: f64 },

    #[error("dimension {dim} is odd")]
    OddDimension { dim: usize },

    #[error("{what} has rank {rank}, expected {expected}")]
    RankMismatch { what: String, rank: usize, expected: usize },

    #[error("a^2 + b^2 exceeds the identity: largest eigenvalue {max_eigenvalue}")]
    SumBound { max_eigenvalue: f64 },

    #[error("1 - a^2 - b^2 is not strict")]
    ComplementNotStrict,

    #[error("projections are not in generic position")]
    NotGeneric,

    #[error("input integrity failure: {0}")]
    InputIntegrity(String),

    #[error("post-condition failed: {0}")]
    PostCondition(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable reason code, used by the CLI.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSquare { .. } => "not_square",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::EigenFailure { .. } => "eigen_failure",
            Error::Domain { .. } => "domain",
            Error::NotPositive { .. } => "not_positive",
            Error::NotInUnitInterval { .. } => "not_in_unit_interval",
            Error::NotProjection { .. } => "not_projection",
            Error::NotResolution { .. } => "not_resolution",
            Error::NonCommuting { .. } => "non_commuting",
            Error::NotStrict { .. } => "not_strict",
            Error::NearDegenerate { .. } => "near_degenerate",
            Error::NotCompatible { .. } => "not_compatible",
            Error::OddDimension { .. } => "odd_dimension",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::SumBound { .. } => "sum_bound",
            Error::ComplementNotStrict => "complement_not_strict",
            Error::NotGeneric => "not_generic",
            Error::InputIntegrity(_) => "input_integrity",
            Error::PostCondition(_) => "post_condition",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Format(_) => "format",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }

    /// True for errors caused by inputs violating an operation's preconditions.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Json(_) | Error::Io(_) | Error::Format(_))
    }
}

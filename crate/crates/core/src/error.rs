use thiserror::Error;

/// Errors raised by the library. [`Error::code`] gives a stable
/// machine-readable name and [`Error::is_exhaustion`] separates resource
/// exhaustion from precondition failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("indices must all share one parity: {0}")]
    ParityMismatch(String),
    #[error("word is not block shaped: {0}")]
    NotBlockShaped(String),
    #[error("path hits the lattice point ({x}, {y})")]
    SingularHit { x: String, y: String },
    #[error("flow meets the vertex ({x}, {y}) at step {step}")]
    VertexHit { step: u64, x: String, y: String },
    #[error("clearance violated: {0}")]
    ClearanceViolated(String),
    #[error("invalid growth function: {0}")]
    InvalidGrowthFunction(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("horizontal direction is a cylinder decomposition")]
    CylinderDecomposition,
    #[error("flow reached boundary edge {0}")]
    BoundaryHit(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("depth insufficient: {0}")]
    DepthInsufficient(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse-error",
            Error::InvalidSlope(_) => "invalid-slope",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::IndexOutOfRange(_) => "index-out-of-range",
            Error::ParityMismatch(_) => "parity-mismatch",
            Error::NotBlockShaped(_) => "not-block-shaped",
            Error::SingularHit { .. } | Error::VertexHit { .. } => "singular-hit",
            Error::ClearanceViolated(_) => "clearance-violated",
            Error::InvalidGrowthFunction(_) => "invalid-growth-function",
            Error::InvalidSurface(_) => "invalid-surface",
            Error::CylinderDecomposition => "cylinder-decomposition-detected",
            Error::BoundaryHit(_) => "boundary-hit",
            Error::PrecisionExhausted(_) => "precision-exhausted",
            Error::DepthInsufficient(_) => "depth-insufficient",
            Error::BudgetExhausted(_) => "budget-exhausted",
        }
    }

    /// Precision, depth and budget exhaustion: retrying with a larger
    /// allowance may succeed.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::DepthInsufficient(_) | Error::BudgetExhausted(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

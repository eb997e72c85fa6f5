use thiserror::Error;

/// Everything that can go wrong while describing a space or estimating its constants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dim: dimension must be at least 2 (got {0})")]
    DimensionTooSmall(usize),

    #[error("p: exponent must be a finite real >= 1 (got {0})")]
    BadExponent(f64),

    #[error("weights: {0}")]
    BadWeights(String),

    #[error("vertices: vertex {0:?} has no negation in the vertex set")]
    AsymmetricPolytope(Vec<f64>),

    #[error("vertices: convex hull has empty interior")]
    DegeneratePolytope,

    /// Malformed field in a norm spec file, carrying the field path.
    #[error("{path}: {message}")]
    InvalidField { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in input vector")]
    NonFinite,

    #[error("{axiom} violated by {excess:e} (relative) at u={u:?}, v={v:?}, alpha={alpha}")]
    AxiomViolation { axiom: &'static str, u: Vec<f64>, v: Vec<f64>, alpha: f64, excess: f64 },

    #[error("degenerate direction in section at angle {0}")]
    DegenerateDirection(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible y found for x={x:?} on a grid of {grid} (grid or tolerance too coarse)")]
    NoSolution { x: Vec<f64>, grid: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Errors caused by a bad description of the space or its inputs, as opposed
    /// to failures during estimation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionTooSmall(_)
                | Error::BadExponent(_)
                | Error::BadWeights(_)
                | Error::AsymmetricPolytope(_)
                | Error::DegeneratePolytope
                | Error::InvalidField { .. }
                | Error::DimensionMismatch { .. }
                | Error::NonFinite
                | Error::InvalidParameter(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

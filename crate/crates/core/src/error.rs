use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("grid mismatch: function is not sampled on the system quadrature")]
    GridMismatch,

    #[error("unknown basis index {0:?}")]
    UnknownIndex(Vec<usize>),

    #[error("multiplier is not finite at spectral point {lambda:?}")]
    NonFinite { lambda: Vec<f64> },

    #[error("multiplier arity {multiplier} does not match system dimension {system}")]
    Arity { multiplier: usize, system: usize },

    #[error("ATL violation: {0}")]
    Atl(String),

    #[error("tensor product has {size} indices, above the cap {cap}")]
    Capacity { size: usize, cap: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("differentiation failed: {0}")]
    Differentiation(String),

    #[error("integrability: tail mass {tail:e} exceeds tolerance {tol:e}")]
    Integrability { tail: f64, tol: f64 },

    #[error("window too small: transform tail {tail:e} exceeds tolerance {tol:e}")]
    Window { tail: f64, tol: f64 },

    #[error("missing capability: {0}")]
    Capability(&'static str),

    #[error("indeterminate value: {0}")]
    Indeterminate(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("level {level} outside [{min}, {max}]")]
    Level { level: usize, min: usize, max: usize },

    #[error("invalid atom: {}", .0.join(", "))]
    InvalidAtom(Vec<&'static str>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}

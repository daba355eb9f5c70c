use thiserror::Error;

/// Errors raised by the polar-map library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed description: {0}")]
    Malformed(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid coefficient {0:?}")]
    InvalidCoefficient(String),

    #[error("mixed scalar modes: {0}")]
    MixedMode(String),

    #[error("polynomial is not homogeneous{}", match .expected {
        Some(d) => format!(" of degree {d}"),
        None => String::new(),
    })]
    NotHomogeneous { expected: Option<u32> },

    #[error("wrong number of arguments: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("singular linear system{}", .0.as_ref().map(|s| format!(" ({s})")).unwrap_or_default())]
    Singular(Option<String>),

    #[error("structure matrix is not antisymmetric")]
    NotAntisymmetric,

    #[error("structure matrix is not invertible; symplectic form unavailable")]
    NoSymplecticForm,

    #[error("density undefined: det(I - cKS) = 0")]
    DensityUndefined,

    #[error("k must be even, got {0}")]
    OddK(usize),

    #[error("reference stepper overflow at substep {0}")]
    Overflow(usize),

    #[error("operation not supported in this scalar mode: {0}")]
    Unsupported(&'static str),

    #[error("trajectory too short: need at least {needed} samples, have {have}")]
    ShortTrajectory { needed: usize, have: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

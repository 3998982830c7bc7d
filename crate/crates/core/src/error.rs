use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The support set in the requested direction is a face with more than
    /// one point.
    #[error("body is not strictly convex in this direction; face has {} vertices", face.len())]
    NotStrictlyConvex { face: Vec<Vec<f64>> },

    #[error("truncation depth {eps} is not below the width {width} of the body")]
    EmptyResult { eps: f64, width: f64 },

    #[error("unsupported representation: {0}")]
    Representation(String),

    #[error("budget {budget} is infeasible; smallest displacement found was {minimal_displacement}")]
    InfeasibleBudget {
        budget: f64,
        minimal_displacement: f64,
    },

    /// Schema violation while parsing a body document.
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },

    /// A node parsed correctly but violates one of its invariants.
    #[error("validation error at {node}: {message}")]
    Validation { node: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

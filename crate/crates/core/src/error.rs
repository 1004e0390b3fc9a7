use thiserror::Error;

/// Errors produced by the model and its verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis is not unit-norm (|axis| = {norm})")]
    InvalidAxis { norm: f64 },

    #[error("directions are parallel; rotation axis is undefined")]
    DegenerateParallel,

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown {what} `{name}`")]
    UnknownTag { what: &'static str, name: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the numerical routines and the certification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the admissible domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    #[error("quadrature on [{lo}, {hi}] did not reach tolerance within depth {max_depth}")]
    NoConvergence { lo: f64, hi: f64, max_depth: u32 },

    #[error("non-finite evaluation at parameter {param}")]
    NonFinite { param: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },

    /// Writing or serializing a result failed.
    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, domain: impl Into<String>) -> Error {
    Error::Domain {
        name,
        value,
        domain: domain.into(),
    }
}

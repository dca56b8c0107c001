use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the link simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("target entropy {target} bit/symbol outside achievable range ({min}, {max}]")]
    EntropyRange { target: f64, min: f64, max: f64 },

    #[error("infeasible rate plan: required entropy {required:.6} bit/symbol exceeds {max} bit-levels")]
    InfeasiblePlan { required: f64, max: f64 },

    #[error("length error: {0}")]
    Length(String),

    #[error("BER curve `{label}` never crosses threshold {threshold:e} ({detail})")]
    NoCrossing { label: String, threshold: f64, detail: &'static str },

    #[error("timing loop failed to converge: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("at ROP {rop_dbm} dBm: {source}")]
    AtRop {
        rop_dbm: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

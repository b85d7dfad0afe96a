use thiserror::Error;

use crate::dpp::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or workflow received parameters violating a precondition.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// An operation was applied to a point or region where it is undefined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("solver did not converge after {} iterations (residual {:.3e})", .0.iterations, .0.final_residual)]
    NonConvergence(SolveReport),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("runaway: exceeded {cap} rounds (seed {seed:#018x})")]
    Runaway { cap: u64, seed: u64 },

    #[error("trial {trial} (seed {seed:#018x}) failed: {source}")]
    Trial {
        trial: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

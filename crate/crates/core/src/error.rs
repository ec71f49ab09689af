use thiserror::Error;

/// Errors raised anywhere in the model, the analyses and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("inadmissible state: {0}")]
    Domain(String),

    #[error("eigenvalue iteration did not converge (residual {residual:.3e})")]
    EigenNoConvergence { residual: f64 },

    #[error("solver aborted in cell {cell} at t = {time:.6e} s: {reason}")]
    SolverAbort {
        cell: usize,
        time: f64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams { .. } | Error::Config(_) => 2,
            Error::Io(_) => 2,
            Error::Domain(_) | Error::EigenNoConvergence { .. } | Error::SolverAbort { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

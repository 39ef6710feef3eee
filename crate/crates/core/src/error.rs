use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("tolerance not met: residual {residual:e} > {tolerance:e}")]
    ToleranceNotMet { residual: f64, tolerance: f64 },

    #[error("step-size search diverged: M = {m:e} exceeds cap {cap:e}")]
    Divergence { m: f64, cap: f64 },

    #[error("no convergence after {iterations} iterations (last certified gap {last_gap:e})")]
    NonConvergence { iterations: usize, last_gap: f64 },

    #[error("iterate left the ball of radius {radius}: norm {norm}; increase the radius")]
    OutsideBall { norm: f64, radius: f64 },

    #[error("worker {worker} failed: {msg}")]
    WorkerFailed { worker: usize, msg: String },

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

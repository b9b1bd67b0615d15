use thiserror::Error;

use crate::nashmoser::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("infeasible schedule: P = {p} must exceed P_min = {p_min}")]
    Infeasible { p: f64, p_min: f64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("depth violation ({context}): min depth {min_depth:.6e} below floor {h0}")]
    Domain {
        context: String,
        min_depth: f64,
        h0: f64,
    },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("iteration diverged at k = {iteration}: residual {residual:.3e}")]
    Divergence {
        iteration: usize,
        residual: f64,
        trace: Box<IterationTrace>,
    },

    #[error("step size too large: norm grew by {growth:.2e} in one step at t = {time}")]
    StepSize { time: f64, growth: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(context: impl Into<String>, min_depth: f64, h0: f64) -> Self {
        Error::Domain {
            context: context.into(),
            min_depth,
            h0,
        }
    }
}

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("({tau}, {delta}) is outside S_{{tau,delta}} for M = {m}")]
    Infeasible { tau: f64, delta: f64, m: f64 },

    #[error("magnetization unreachable: {0}")]
    MagnetizationUnreachable(String),

    #[error("negative projection weight w[{index}] = {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("time step too large for current field: implicit diagonal {value:.3e} at point {point} of component {component}")]
    NonPositiveDiagonal {
        component: usize,
        point: usize,
        value: f64,
    },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    LinearSolver { iterations: usize, residual: f64 },

    #[error("variant parameters violate {0}")]
    InvalidVariant(String),

    #[error("SMA diagnosis impossible: {0}")]
    SmaReference(String),
}

pub type Result<T> = std::result::Result<T, Error>;

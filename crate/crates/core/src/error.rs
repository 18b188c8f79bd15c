use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has full numerical rank; no kernel vector")]
    NoKernel,

    #[error("kernel has dimension {dim}; steady state is not unique")]
    DegenerateKernel { dim: usize },

    #[error("invalid temperature for {bath} bath: {reason}")]
    InvalidTemperature { bath: &'static str, reason: String },

    #[error("invalid machine parameters: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not of X form (forbidden entry magnitude {magnitude:.3e})")]
    NonXState { magnitude: f64 },

    #[error("analytic model {model} does not apply: {reason}")]
    ModelMismatch { model: &'static str, reason: String },

    #[error("time integration failed: {0}")]
    StepUnderflow(String),

    #[error("{count} deterministic strategies exceed the resource guard of {limit}")]
    SizeExceeded { count: u128, limit: u64 },

    #[error("conic solver stalled after {iterations} iterations (gap {gap:.3e}, residual {residual:.3e})")]
    SolverStalled {
        iterations: usize,
        gap: f64,
        residual: f64,
    },

    #[error("invalid measurement set: {0}")]
    InvalidMeasurement(String),

    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),

    #[error("filter annihilates the state (p_suc = {p_suc:.3e})")]
    DegenerateHerald { p_suc: f64 },

    #[error("filter coefficients must lie in [0, 1]: {0}")]
    InvalidFilter(String),

    #[error("state is not within trace distance {tolerance} of a pure entangled state")]
    NotNearPure { tolerance: f64 },

    #[error("no parameters reach heralding efficiency {p_target}")]
    InfeasibleTarget { p_target: f64 },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {0} out of range (expected 1, 2 or 3)")]
    InvalidQubit(usize),
    #[error("qubit index {0} used twice in a double contraction")]
    RepeatedQubit(usize),
    #[error("vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("partial contraction for qubit {qubit} vanished")]
    ZeroContraction { qubit: usize },
    #[error("no restart converged ({attempted} attempted)")]
    NoConvergence { attempted: usize },
    #[error("triple is not stationary: coefficient of {ket} has magnitude {magnitude:.3e}")]
    NotStationary { ket: &'static str, magnitude: f64 },
    #[error("|λ4| = {lambda4_abs} exceeds λ0 = {lambda0}; the triple is not the nearest product state")]
    Lambda4ExceedsLambda0 { lambda0: f64, lambda4_abs: f64 },
    #[error("λ0 must be positive, got {0}")]
    NonPositiveLambda0(f64),
    #[error("invalid W-family parameters: {0}")]
    InvalidWParams(String),
    #[error("parameters a, b, c do not form an acute triangle")]
    NoTriangle,
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("unknown named state `{0}` (expected ghz, w or psi_contr)")]
    UnknownState(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("malformed state file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

use crate::exprdsl::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid order m = {0}: the order must be at least 1")]
    InvalidOrder(usize),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation failed at {point:?}: {message}")]
    Evaluation { point: Vec<f64>, message: String },

    #[error("quadrature tolerance not met: last two values {coarse:e} and {fine:e}")]
    ToleranceNotMet { coarse: f64, fine: f64 },

    #[error("problem size {required} exceeds the cap {cap}")]
    SizeLimit { required: u128, cap: u128 },

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("invalid flag: {0}")]
    InvalidFlag(String),

    #[error("order m0 = {m0} exceeds order m = {m}")]
    OrderMismatch { m0: usize, m: usize },

    #[error("unsupported polytope: {0}")]
    UnsupportedPolytope(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no generic direction found after {0} attempts")]
    GenericityExhausted(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

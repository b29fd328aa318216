use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value {value} from `{label}` at node {node} (x = {x})")]
    NonFinite {
        label: String,
        node: usize,
        x: f64,
        value: String,
    },

    #[error("grid of {size} nodes is too small for degree {degree}: need at least {required}")]
    GridTooSmall {
        size: usize,
        degree: usize,
        required: usize,
    },

    #[error("scale {t} is at or below the smallest step {h_min} of the h-grid; use a finer grid")]
    ScaleBelowGrid { t: f64, h_min: f64 },

    #[error("exponent p = {0} must satisfy 0 < p <= inf")]
    InvalidExponent(f64),

    #[error(
        "Hölder exponent alpha = {alpha} must satisfy 0 < alpha <= r = {r}; \
         for alpha > r the best approximation in H_p^(r,alpha) is not well defined"
    )]
    AlphaOutOfRange { alpha: f64, r: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown kernel `{0}` (expected dirichlet, fejer or vp)")]
    UnknownKernel(String),

    #[error("unknown catalog function `{0}`")]
    UnknownFunction(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("empty sample vector")]
    EmptySamples,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

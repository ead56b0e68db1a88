use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported accuracy order ({interior},{boundary}); supported: (2,1), (4,2), (6,3)")]
    UnsupportedOrder { interior: u32, boundary: u32 },

    #[error("grid of {n} points is too small: order ({interior},{boundary}) needs at least {min} points")]
    GridTooSmall {
        n: usize,
        min: usize,
        interior: u32,
        boundary: u32,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("inadmissible penalty {name} = {value}: requires {condition}")]
    InadmissiblePenalty {
        name: &'static str,
        value: f64,
        condition: &'static str,
    },

    #[error("coefficient a(x) = {value} is not positive at node {node}")]
    NonpositiveCoefficient { node: usize, value: f64 },

    #[error("coordinate mapping is singular at node {node} (xi_x = {value})")]
    SingularMapping { node: usize, value: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear system is singular (zero pivot in column {column})")]
    SingularSystem { column: usize },

    #[error("solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualCheck { residual: f64, tolerance: f64 },

    #[error("state became non-finite at step {step} (t = {time})")]
    NonFiniteState { step: usize, time: f64 },

    #[error("power iteration did not converge in {iterations} iterations (last estimate {estimate:e})")]
    PowerIterationNoConverge { iterations: usize, estimate: f64 },

    #[error("energy {value:e} at sample {index} is not positive")]
    NonPositiveEnergy { index: usize, value: f64 },

    #[error("malformed operator document: {0}")]
    Document(String),
}

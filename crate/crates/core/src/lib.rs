//! Summation-by-parts (SBP) finite-difference operators with simultaneous
//! approximation term (SAT) boundary and interface treatment.
//!
//! The crate builds diagonal-norm SBP operators, assembles energy-stable
//! semi-discretizations of scalar and system model problems, integrates them
//! in time and measures what the energy method predicts: exact discrete
//! energy identities, convergence rates and functional superconvergence.

// `!(a > b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model_problems;
pub mod sbp_ops;
pub mod scalar;
pub mod time_integration;

pub use error::{Error, Result};
pub use sbp_ops::AccuracyOrder;
pub use scalar::{Field, Real, Scalar};

/// Exact rational scalar used for algebraic certification of the tables.
pub type Exact = num_rational::BigRational;

pub type FirstDerivative = sbp_ops::FirstDerivativeOperator<f64>;
pub type SecondDerivative = sbp_ops::SecondDerivativeOperator<f64>;
pub type ExactFirstDerivative = sbp_ops::FirstDerivativeOperator<Exact>;
pub type ExactSecondDerivative = sbp_ops::SecondDerivativeOperator<Exact>;
pub type FirstDerivative32 = sbp_ops::FirstDerivativeOperator<f32>;
pub type Trajectory = time_integration::TrajectoryRecord<f64>;
pub type TimeStepGrid = time_integration::TimeGrid<f64>;
pub type Grid = model_problems::Grid1D<f64>;
pub type Grid2d = model_problems::Grid2D<f64>;
pub type Penalties = model_problems::PenaltyConfig<f64>;
pub type Level = analysis::LevelSetup<f64>;

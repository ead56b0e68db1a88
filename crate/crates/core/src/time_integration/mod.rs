//! Explicit RK4 time stepping, spectral time-step estimation, steady solves
//! and the global SBP-SAT discretization in time.

mod cfl;
mod rk4;
mod sbp_time;

use crate::error::Result;
use crate::linalg::{solve_checked, DenseMatrix};
use crate::scalar::{Field, Real};

pub use cfl::{cfl_timestep, spectral_radius, CflEstimate, RK4_STABILITY_EXTENT};
pub use rk4::{rk4_final, rk4_integrate, TimeGrid, TrajectoryRecord};
pub use sbp_time::{sbp_time_solve, SbpTimeProblem, SbpTimeSolution};

/// Relative residual accepted by [`solve_steady`].
pub const STEADY_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Dense LU solve with a verified residual `‖Ax − b‖ ≤ 1e−10‖b‖`.
pub fn solve_steady<T: Field>(matrix: &DenseMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    solve_checked(matrix, rhs, STEADY_RESIDUAL_TOLERANCE)
}

pub(crate) fn all_finite<T: Real>(u: &[T]) -> bool {
    u.iter().all(|v| v.is_finite())
}

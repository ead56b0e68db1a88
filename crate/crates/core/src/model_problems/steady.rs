use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, Grid1D};

/// Dense linear system `A u = b` of a steady problem.
#[derive(Clone, Debug)]
pub struct SteadySystem<T> {
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
}

/// `u_x = F` with `u(x₀) = g₀` imposed by the dual-consistent penalty
/// `σ = −1`: `(D + [P⁻¹]₀E₀)u = F + [P⁻¹]₀g₀e₀`.
pub fn assemble_steady_transport<T: Real>(
    grid: &Grid1D<T>,
    op: &FirstDerivativeOperator<T>,
    forcing: impl Fn(T) -> T,
    inflow: T,
) -> Result<SteadySystem<T>> {
    grid.check_operator(op.n_points(), *op.h())?;
    let sigma = -T::one();
    let p0 = inv_first(op.norm_weights());
    let mut matrix = op.dense_d();
    matrix[(0, 0)] = matrix[(0, 0)] - sigma * p0;
    let mut rhs = grid.sample(forcing);
    rhs[0] = rhs[0] - sigma * p0 * inflow;
    Ok(SteadySystem { matrix, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_checked;
    use crate::sbp_ops::AccuracyOrder;

    #[test]
    fn constant_inflow_gives_constant_solution() {
        for order in AccuracyOrder::ALL {
            let grid = Grid1D::unit(33).unwrap();
            let op = grid.first_derivative(order).unwrap();
            let sys = assemble_steady_transport(&grid, &op, |_| 0.0f64, 2.5).unwrap();
            let u = solve_checked(&sys.matrix, &sys.rhs, 1e-10).unwrap();
            assert!(u.iter().all(|v| (v - 2.5).abs() < 1e-12), "{order}");
        }
    }

    #[test]
    fn cosine_forcing_gives_sine() {
        let grid = Grid1D::unit(65).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let sys = assemble_steady_transport(&grid, &op, f64::cos, 0.0).unwrap();
        let u = solve_checked(&sys.matrix, &sys.rhs, 1e-10).unwrap();
        for (v, x) in u.iter().zip(grid.nodes()) {
            assert!((v - x.sin()).abs() < 1e-5);
        }
    }
}

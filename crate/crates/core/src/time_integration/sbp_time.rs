use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{solve_checked, DenseMatrix};
use crate::sbp_ops::{AccuracyOrder, FirstDerivativeOperator};
use crate::scalar::Real;

/// `u_t = λu`, `u(0) = f` on `[0, T]`, discretized in time by an SBP
/// operator with the initial condition imposed weakly (`σ = −1`).
#[derive(Clone, Debug, PartialEq)]
pub struct SbpTimeProblem<T> {
    pub lambda: Complex<T>,
    pub initial: Complex<T>,
    pub t_final: T,
    pub order: AccuracyOrder,
    pub nodes: usize,
}

/// Discrete solution with the energy-identity diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SbpTimeSolution<T> {
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
    /// `‖U‖²_P`.
    pub norm_squared: T,
    /// `|U₀ − f|`, the weak-imposition mismatch.
    pub initial_mismatch: T,
    /// `|U_N|² − 2Re(λ)‖U‖²_P`.
    pub identity_lhs: T,
    /// `|f|² − |U₀ − f|²`.
    pub identity_rhs: T,
    /// `|lhs − rhs|`.
    pub identity_residual: T,
    /// Residual divided by the sum of the magnitudes of the four identity terms.
    pub relative_residual: T,
    pub warnings: Vec<String>,
}

impl<T: Real> SbpTimeSolution<T> {
    pub fn final_value(&self) -> Complex<T> {
        self.values[self.values.len() - 1]
    }
}

impl<T: Real> SbpTimeProblem<T> {
    pub fn new(
        lambda: Complex<T>,
        initial: Complex<T>,
        t_final: T,
        order: AccuracyOrder,
        nodes: usize,
    ) -> Result<Self> {
        if !(t_final > T::zero() && t_final.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: format!("final time must be positive, got {t_final}"),
            });
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "must be finite".into(),
            });
        }
        order.check_grid(nodes)?;
        Ok(Self {
            lambda,
            initial,
            t_final,
            order,
            nodes,
        })
    }

    pub fn sigma(&self) -> T {
        -T::one()
    }
}

/// Solves `(Q − λP − σE₀)U = −σf e₀` by dense complex LU.
pub fn sbp_time_solve<T: Real>(problem: &SbpTimeProblem<T>) -> Result<SbpTimeSolution<T>> {
    let op = FirstDerivativeOperator::on_interval(problem.order, problem.nodes, T::zero(), problem.t_final)?;
    let n = problem.nodes;
    let sigma = Complex::new(problem.sigma(), T::zero());
    let lambda = problem.lambda;
    let f = problem.initial;
    let p = op.norm_weights();

    let mut matrix = DenseMatrix::<Complex<T>>::zeros(n, n);
    for i in 0..n {
        for (j, q) in op.q().row(i) {
            matrix[(i, *j)] = Complex::new(*q, T::zero());
        }
        matrix[(i, i)] = matrix[(i, i)] - lambda * p[i];
    }
    matrix[(0, 0)] = matrix[(0, 0)] - sigma;
    let mut rhs = vec![Complex::new(T::zero(), T::zero()); n];
    rhs[0] = -sigma * f;
    let values = solve_checked(&matrix, &rhs, 1e-10)?;

    let norm_squared = values.iter().zip(p).fold(T::zero(), |s, (u, w)| s + *w * u.norm_sqr());
    let two = T::lit(2.0);
    let un = values[n - 1].norm_sqr();
    let mismatch = (values[0] - f).norm();
    let dissipation = two * lambda.re * norm_squared;
    let identity_lhs = un - dissipation;
    let identity_rhs = f.norm_sqr() - mismatch * mismatch;
    let identity_residual = (identity_lhs - identity_rhs).abs();
    let scale = un + dissipation.abs() + f.norm_sqr() + mismatch * mismatch;
    let relative_residual = if scale > T::zero() {
        identity_residual / scale
    } else {
        T::zero()
    };
    let mut warnings = Vec::new();
    if lambda.re >= T::zero() {
        warnings.push(format!(
            "Re(lambda) = {} is not negative; the solution may grow",
            lambda.re
        ));
    }
    Ok(SbpTimeSolution {
        times: op.nodes(T::zero()),
        values,
        norm_squared,
        initial_mismatch: mismatch,
        identity_lhs,
        identity_rhs,
        identity_residual,
        relative_residual,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_lambda_reproduces_constant() {
        let pb = SbpTimeProblem::new(c(0.0, 0.0), c(2.0, -1.0), 1.0, AccuracyOrder::FOURTH, 21).unwrap();
        let sol = sbp_time_solve(&pb).unwrap();
        assert!(sol.values.iter().all(|u| (u - c(2.0, -1.0)).norm() < 1e-13));
        assert_eq!(sol.warnings.len(), 1);
    }

    #[test]
    fn decay_to_inverse_e() {
        let pb = SbpTimeProblem::new(c(-1.0, 0.0), c(1.0, 0.0), 1.0, AccuracyOrder::FOURTH, 21).unwrap();
        let sol = sbp_time_solve(&pb).unwrap();
        assert!((sol.final_value() - c((-1.0f64).exp(), 0.0)).norm() < 1e-3);
        assert!(sol.relative_residual < 1e-12);
    }

    #[test]
    fn stiff_coarse_is_bounded() {
        let pb = SbpTimeProblem::new(c(-1e4, 0.0), c(1.0, 0.0), 1.0, AccuracyOrder::SECOND, 11).unwrap();
        let sol = sbp_time_solve(&pb).unwrap();
        assert!(sol.final_value().norm() <= 1.0);
        assert!(sol.identity_residual <= 1e-10 * (1.0 + sol.norm_squared));
    }

    #[test]
    fn too_few_nodes() {
        assert!(SbpTimeProblem::new(c(-1.0, 0.0), c(1.0, 0.0), 1.0, AccuracyOrder::SIXTH, 11).is_err());
    }
}

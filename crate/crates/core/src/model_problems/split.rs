use crate::error::{Error, Result};
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, weighted_dot, BoundarySignal, Grid1D, PenaltyConfig, SemiDiscrete};

pub(crate) fn check_positive_speed<T: Real>(a: T) -> Result<()> {
    if a > T::zero() && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "a",
            reason: format!("wave speed must be positive and finite, got {a}"),
        })
    }
}

/// `u_t + (a(x)u)_x = 0` in skew-symmetric form,
/// `u_t + ½D(Au) + ½ADu + ½A_x u = σa₀[P⁻¹]₀(u₀ − g)e₀`, with
/// `A_x = diag(D a)`.
#[derive(Debug, Clone)]
pub struct SplitAdvectionSystem<T: Real> {
    coefficient: Vec<T>,
    coefficient_derivative: Vec<T>,
    sigma: T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
    label: String,
    warnings: Vec<String>,
}

pub fn assemble_split_variable_advection<T: Real>(
    coefficient: impl Fn(T) -> T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    penalty: &PenaltyConfig<T>,
    inflow: BoundarySignal<T>,
) -> Result<SplitAdvectionSystem<T>> {
    grid.check_operator(op.n_points(), *op.h())?;
    let a = grid.sample(coefficient);
    if let Some((node, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > T::zero() && v.is_finite())) {
        return Err(Error::NonpositiveCoefficient {
            node,
            value: value.to_f64_lossy(),
        });
    }
    let mut warnings = Vec::new();
    penalty.check_boundary(&mut warnings)?;
    let ax = op.apply(&a);
    let label = format!("split variable advection {} n={}", op.order(), op.n_points());
    Ok(SplitAdvectionSystem {
        coefficient: a,
        coefficient_derivative: ax,
        sigma: penalty.boundary,
        grid,
        op,
        inflow,
        label,
        warnings,
    })
}

impl<T: Real> SplitAdvectionSystem<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    /// Sampled `a(x_j)`.
    pub fn coefficient(&self) -> &[T] {
        &self.coefficient
    }

    /// `D a`, the discrete `a_x`.
    pub fn coefficient_derivative(&self) -> &[T] {
        &self.coefficient_derivative
    }

    /// `uᵀP A_x u`, the volume term of the energy rate.
    pub fn volume_term(&self, u: &[T]) -> T {
        let au: Vec<T> = u
            .iter()
            .zip(&self.coefficient_derivative)
            .map(|(v, d)| *v * *d)
            .collect();
        weighted_dot(self.op.norm_weights(), u, &au)
    }

    /// `max_j |(Da)_j|`, the bound on the energy growth rate.
    pub fn max_growth(&self) -> T {
        self.coefficient_derivative
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T: Real> SemiDiscrete<T> for SplitAdvectionSystem<T> {
    fn label(&self) -> &str {
        &self.label
    }

    fn state_dim(&self) -> usize {
        self.grid.n_points()
    }

    fn norm_weights(&self) -> &[T] {
        self.op.norm_weights()
    }

    fn rhs_into(&self, u: &[T], t: T, out: &mut [T]) {
        let half = T::lit(0.5);
        let au: Vec<T> = u.iter().zip(&self.coefficient).map(|(v, a)| *v * *a).collect();
        let d_au = self.op.apply(&au);
        self.op.apply_into(u, out);
        for j in 0..u.len() {
            let a_du = self.coefficient[j] * out[j];
            out[j] = -half * (d_au[j] + a_du + self.coefficient_derivative[j] * u[j]);
        }
        let sat = self.sigma * self.coefficient[0] * (u[0] - self.inflow.at(t));
        out[0] = out[0] + inv_first(self.op.norm_weights()) * sat;
    }

    /// `−(a_N u_N² − a₀u₀²) − uᵀP A_x u + 2σa₀u₀(u₀ − g)`.
    fn boundary_rate(&self, u: &[T], t: T) -> T {
        let n = u.len() - 1;
        let a = &self.coefficient;
        let two = T::lit(2.0);
        let outflow = -(a[n] * u[n] * u[n] - a[0] * u[0] * u[0]);
        let sat = two * self.sigma * a[0] * u[0] * (u[0] - self.inflow.at(t));
        outflow - self.volume_term(u) + sat
    }

    fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_problems::assemble_advection;
    use crate::sbp_ops::AccuracyOrder;

    #[test]
    fn constant_coefficient_reduces_to_advection() {
        for order in AccuracyOrder::ALL {
            let grid = Grid1D::unit(41).unwrap();
            let op = grid.first_derivative(order).unwrap();
            let pen = PenaltyConfig::default().with_boundary(-0.8);
            let g = BoundarySignal::new("sin t", |t: f64| t.sin());
            let split = assemble_split_variable_advection(|_| 1.0, grid.clone(), op.clone(), &pen, g.clone()).unwrap();
            let plain = assemble_advection(1.0, grid.clone(), op, &pen, g).unwrap();
            let u = grid.sample(|x| (3.0 * x).cos() + x * x);
            for (a, b) in split.rhs(&u, 0.4).iter().zip(plain.rhs(&u, 0.4)) {
                assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{order}");
            }
        }
    }

    #[test]
    fn volume_term_is_quadrature_of_derivative() {
        let grid = Grid1D::unit(65).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let sys = assemble_split_variable_advection(
            |x: f64| 1.0 + x / 2.0,
            grid,
            op,
            &PenaltyConfig::default(),
            BoundarySignal::constant(1.0),
        )
        .unwrap();
        assert!((sys.volume_term(&vec![1.0; 65]) - 0.5).abs() < 1e-12);
        assert!((sys.max_growth() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_coefficient_rejected() {
        let grid = Grid1D::unit(17).unwrap();
        let op = grid.first_derivative(AccuracyOrder::SECOND).unwrap();
        let r = assemble_split_variable_advection(
            |x: f64| x - 0.5,
            grid,
            op,
            &PenaltyConfig::default(),
            BoundarySignal::zero(),
        );
        assert!(matches!(r, Err(Error::NonpositiveCoefficient { node: 0, .. })));
    }
}

use crate::error::{Error, Result};
use crate::sbp_ops::{FirstDerivativeOperator, SecondDerivativeOperator};
use crate::scalar::Real;

use super::{inv_first, inv_last, weighted_dot, BoundarySignal, Forcing, Grid1D, SemiDiscrete};

/// How `ε u_xx` is discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondDerivativeMode {
    /// `D(εDu)`, the first derivative applied twice.
    Wide,
    /// The dedicated narrow-stencil `εD2u`.
    Narrow,
}

#[derive(Debug, Clone)]
enum Diffusion<T> {
    Wide,
    Narrow(SecondDerivativeOperator<T>),
}

/// `u_t + a u_x = ε u_xx + F` with `a u − ε u_x = g₀` at the left and
/// `ε u_x = g₁` at the right, both imposed with unit penalties
/// (`σ₀ = σ₁ = −1`).
#[derive(Debug, Clone)]
pub struct AdvectionDiffusionSystem<T: Real> {
    speed: T,
    epsilon: T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    diffusion: Diffusion<T>,
    left: BoundarySignal<T>,
    right: BoundarySignal<T>,
    forcing: Option<Forcing<T>>,
    label: String,
}

pub fn assemble_advection_diffusion<T: Real>(
    speed: T,
    epsilon: T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    mode: SecondDerivativeMode,
    left: BoundarySignal<T>,
    right: BoundarySignal<T>,
) -> Result<AdvectionDiffusionSystem<T>> {
    super::split::check_positive_speed(speed)?;
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("viscosity must be positive, got {epsilon}"),
        });
    }
    grid.check_operator(op.n_points(), *op.h())?;
    let diffusion = match mode {
        SecondDerivativeMode::Wide => Diffusion::Wide,
        SecondDerivativeMode::Narrow => Diffusion::Narrow(grid.second_derivative(op.order())?),
    };
    let label = format!(
        "advection-diffusion {} {} n={}",
        match mode {
            SecondDerivativeMode::Wide => "wide",
            SecondDerivativeMode::Narrow => "narrow",
        },
        op.order(),
        op.n_points()
    );
    Ok(AdvectionDiffusionSystem {
        speed,
        epsilon,
        grid,
        op,
        diffusion,
        left,
        right,
        forcing: None,
        label,
    })
}

impl<T: Real> AdvectionDiffusionSystem<T> {
    pub fn with_forcing(mut self, forcing: Forcing<T>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn mode(&self) -> SecondDerivativeMode {
        match self.diffusion {
            Diffusion::Wide => SecondDerivativeMode::Wide,
            Diffusion::Narrow(_) => SecondDerivativeMode::Narrow,
        }
    }

    /// Boundary derivatives `(u_x)₀, (u_x)_N` as seen by the SATs.
    fn boundary_derivatives(&self, u: &[T], du: &[T]) -> (T, T) {
        match &self.diffusion {
            Diffusion::Wide => (du[0], du[du.len() - 1]),
            Diffusion::Narrow(d2) => (d2.left_derivative(u), d2.right_derivative(u)),
        }
    }

    /// Dissipation `ε‖u_x‖²` in the form the discretization sees it.
    pub fn dissipation(&self, u: &[T]) -> T {
        match &self.diffusion {
            Diffusion::Wide => {
                let du = self.op.apply(u);
                self.epsilon * weighted_dot(self.op.norm_weights(), &du, &du)
            }
            Diffusion::Narrow(d2) => self.epsilon * d2.dissipation(u),
        }
    }
}

impl<T: Real> SemiDiscrete<T> for AdvectionDiffusionSystem<T> {
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
        let n = u.len();
        let a = self.speed;
        let eps = self.epsilon;
        let du = self.op.apply(u);
        match &self.diffusion {
            Diffusion::Wide => {
                let flux: Vec<T> = du.iter().map(|&d| eps * d).collect();
                self.op.apply_into(&flux, out);
            }
            Diffusion::Narrow(d2) => {
                d2.apply_into(u, out);
                for o in out.iter_mut() {
                    *o = eps * *o;
                }
            }
        }
        for (o, d) in out.iter_mut().zip(&du) {
            *o = *o - a * *d;
        }
        if let Some(f) = &self.forcing {
            for (o, &x) in out.iter_mut().zip(self.grid.nodes()) {
                *o = *o + f.at(x, t);
            }
        }
        let (dl, dr) = self.boundary_derivatives(u, &du);
        let w = self.op.norm_weights();
        out[0] = out[0] - inv_first(w) * (a * u[0] - eps * dl - self.left.at(t));
        out[n - 1] = out[n - 1] - inv_last(w) * (eps * dr - self.right.at(t));
    }

    /// `a⁻¹[g₀² − (au₀−g₀)²] − a⁻¹[(au_N−g₁)² − g₁²] − 2ε‖u_x‖² + 2uᵀPF`.
    fn boundary_rate(&self, u: &[T], t: T) -> T {
        let a = self.speed;
        let two = T::lit(2.0);
        let n = u.len() - 1;
        let g0 = self.left.at(t);
        let g1 = self.right.at(t);
        let left = (g0 * g0 - (a * u[0] - g0).powi(2)) / a;
        let right = ((a * u[n] - g1).powi(2) - g1 * g1) / a;
        let mut rate = left - right - two * self.dissipation(u);
        if let Some(f) = &self.forcing {
            let fv = f.sample(self.grid.nodes(), t);
            rate = rate + two * weighted_dot(self.op.norm_weights(), u, &fv);
        }
        rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp_ops::AccuracyOrder;

    fn system(mode: SecondDerivativeMode, g0: BoundarySignal<f64>) -> AdvectionDiffusionSystem<f64> {
        let grid = Grid1D::unit(33).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        assemble_advection_diffusion(1.5, 0.1, grid, op, mode, g0, BoundarySignal::zero()).unwrap()
    }

    #[test]
    fn constants_with_matching_data_are_steady() {
        for mode in [SecondDerivativeMode::Wide, SecondDerivativeMode::Narrow] {
            let c = 0.7;
            let sys = system(mode, BoundarySignal::constant(1.5 * c));
            let r = sys.rhs(&vec![c; 33], 0.0);
            assert!(r.iter().all(|v| v.abs() < 1e-11), "{mode:?}: {r:?}");
        }
    }

    #[test]
    fn zero_state_zero_data() {
        let sys = system(SecondDerivativeMode::Narrow, BoundarySignal::zero());
        assert!(sys.rhs(&vec![0.0; 33], 1.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_nonpositive_viscosity() {
        let grid = Grid1D::<f64>::unit(17).unwrap();
        let op = grid.first_derivative(AccuracyOrder::SECOND).unwrap();
        let r = assemble_advection_diffusion(
            1.0,
            0.0,
            grid,
            op,
            SecondDerivativeMode::Wide,
            BoundarySignal::zero(),
            BoundarySignal::zero(),
        );
        assert!(r.is_err());
    }
}

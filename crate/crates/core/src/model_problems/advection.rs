use crate::error::Result;
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, weighted_dot, BoundarySignal, Forcing, Grid1D, PenaltyConfig, SemiDiscrete};

/// `u_t + a u_x = F` with inflow data at the left end:
/// `u_t = −aDu + F + σa[P⁻¹]₀(u₀ − g₀)e₀`.
#[derive(Debug, Clone)]
pub struct AdvectionSystem<T: Real> {
    speed: T,
    sigma: T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
    forcing: Option<Forcing<T>>,
    label: String,
    warnings: Vec<String>,
}

pub fn assemble_advection<T: Real>(
    speed: T,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    penalty: &PenaltyConfig<T>,
    inflow: BoundarySignal<T>,
) -> Result<AdvectionSystem<T>> {
    super::split::check_positive_speed(speed)?;
    grid.check_operator(op.n_points(), *op.h())?;
    let mut warnings = Vec::new();
    penalty.check_boundary(&mut warnings)?;
    let label = format!("advection {} n={}", op.order(), op.n_points());
    Ok(AdvectionSystem {
        speed,
        sigma: penalty.boundary,
        grid,
        op,
        inflow,
        forcing: None,
        label,
        warnings,
    })
}

impl<T: Real> AdvectionSystem<T> {
    pub fn with_forcing(mut self, forcing: Forcing<T>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn speed(&self) -> T {
        self.speed
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn operator(&self) -> &FirstDerivativeOperator<T> {
        &self.op
    }

    /// The SAT vector `σa(u₀ − g₀)` before scaling by `[P⁻¹]₀`.
    pub fn boundary_penalty(&self, u: &[T], t: T) -> T {
        self.sigma * self.speed * (u[0] - self.inflow.at(t))
    }
}

impl<T: Real> SemiDiscrete<T> for AdvectionSystem<T> {
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
        self.op.apply_into(u, out);
        for o in out.iter_mut() {
            *o = -self.speed * *o;
        }
        if let Some(f) = &self.forcing {
            for (o, &x) in out.iter_mut().zip(self.grid.nodes()) {
                *o = *o + f.at(x, t);
            }
        }
        out[0] = out[0] + inv_first(self.op.norm_weights()) * self.boundary_penalty(u, t);
    }

    fn boundary_rate(&self, u: &[T], t: T) -> T {
        let a = self.speed;
        let s = self.sigma;
        let two = T::lit(2.0);
        let n = u.len() - 1;
        let g = self.inflow.at(t);
        let mut rate = a * (T::one() + two * s) * u[0] * u[0] - a * u[n] * u[n] - two * a * s * u[0] * g;
        if let Some(f) = &self.forcing {
            let fv = f.sample(self.grid.nodes(), t);
            rate = rate + two * weighted_dot(self.op.norm_weights(), u, &fv);
        }
        rate
    }

    fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

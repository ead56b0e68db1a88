use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, BoundarySignal, Grid1D, SemiDiscrete};

/// Monotone map `x(ξ)` of `[0, 1]` onto itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MappingSpec {
    Identity,
    /// `x(ξ) = ξ + amplitude·sin(πξ)/π`; non-singular for `|amplitude| < 1`.
    SineStretch {
        amplitude: f64,
    },
}

impl Default for MappingSpec {
    fn default() -> Self {
        MappingSpec::SineStretch { amplitude: 0.2 }
    }
}

impl MappingSpec {
    pub fn x_of_xi<T: Real>(&self, xi: T) -> T {
        match *self {
            MappingSpec::Identity => xi,
            MappingSpec::SineStretch { amplitude } => xi + T::lit(amplitude) * (T::PI() * xi).sin() / T::PI(),
        }
    }

    /// `dx/dξ`.
    pub fn dx_dxi<T: Real>(&self, xi: T) -> T {
        match *self {
            MappingSpec::Identity => T::one(),
            MappingSpec::SineStretch { amplitude } => T::one() + T::lit(amplitude) * (T::PI() * xi).cos(),
        }
    }

    /// The metric `ξ_x = 1/(dx/dξ)` at computational coordinate `ξ`.
    pub fn xi_x<T: Real>(&self, xi: T) -> T {
        T::one() / self.dx_dxi(xi)
    }
}

/// `u_t + u_x = 0`, `x ∈ [0,1]`, on a mapped grid:
/// `u_t + A D u = −½ A₀₀[P⁻¹]₀(u₀ − g)` with `A = diag(ξ_x)`.
/// Stable in the weighted norm `‖u‖²_ξ = uᵀA⁻¹Pu`.
#[derive(Debug, Clone)]
pub struct StretchedAdvectionSystem<T: Real> {
    mapping: MappingSpec,
    metric: Vec<T>,
    weights: Vec<T>,
    physical_nodes: Vec<T>,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
    label: String,
}

/// `grid` is the uniform computational grid on `[0, 1]`.
pub fn assemble_stretched_advection<T: Real>(
    mapping: MappingSpec,
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
) -> Result<StretchedAdvectionSystem<T>> {
    grid.check_operator(op.n_points(), *op.h())?;
    let mut metric = Vec::with_capacity(grid.n_points());
    for (node, &xi) in grid.nodes().iter().enumerate() {
        let dx = mapping.dx_dxi(xi);
        if !(dx > T::zero() && dx.is_finite()) {
            return Err(Error::SingularMapping {
                node,
                value: (T::one() / dx).to_f64_lossy(),
            });
        }
        metric.push(T::one() / dx);
    }
    let weights = op.norm_weights().iter().zip(&metric).map(|(p, a)| *p / *a).collect();
    let physical_nodes = grid.nodes().iter().map(|&xi| mapping.x_of_xi(xi)).collect();
    let label = format!("stretched advection {} n={}", op.order(), op.n_points());
    Ok(StretchedAdvectionSystem {
        mapping,
        metric,
        weights,
        physical_nodes,
        grid,
        op,
        inflow,
        label,
    })
}

impl<T: Real> StretchedAdvectionSystem<T> {
    pub fn mapping(&self) -> MappingSpec {
        self.mapping
    }

    /// `ξ_x` at the nodes.
    pub fn metric(&self) -> &[T] {
        &self.metric
    }

    /// Physical coordinates `x(ξ_j)`.
    pub fn physical_nodes(&self) -> &[T] {
        &self.physical_nodes
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }
}

impl<T: Real> SemiDiscrete<T> for StretchedAdvectionSystem<T> {
    fn label(&self) -> &str {
        &self.label
    }

    fn state_dim(&self) -> usize {
        self.grid.n_points()
    }

    fn norm_weights(&self) -> &[T] {
        &self.weights
    }

    fn rhs_into(&self, u: &[T], t: T, out: &mut [T]) {
        self.op.apply_into(u, out);
        for (o, a) in out.iter_mut().zip(&self.metric) {
            *o = -*a * *o;
        }
        let sat = T::lit(0.5) * self.metric[0] * inv_first(self.op.norm_weights()) * (u[0] - self.inflow.at(t));
        out[0] = out[0] - sat;
    }

    /// `−u_N² + u₀g`; `−u_N²` for homogeneous inflow.
    fn boundary_rate(&self, u: &[T], t: T) -> T {
        let n = u.len() - 1;
        -u[n] * u[n] + u[0] * self.inflow.at(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_problems::{assemble_advection, PenaltyConfig};
    use crate::sbp_ops::AccuracyOrder;

    #[test]
    fn identity_map_is_plain_advection() {
        let grid = Grid1D::unit(33).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let g = BoundarySignal::new("cos t", |t: f64| t.cos());
        let st = assemble_stretched_advection(MappingSpec::Identity, grid.clone(), op.clone(), g.clone()).unwrap();
        let pen = PenaltyConfig::default().with_boundary(-0.5).allowing_unstable();
        let adv = assemble_advection(1.0, grid.clone(), op, &pen, g).unwrap();
        let u = grid.sample(|x| (4.0 * x).sin() + 0.3);
        assert_eq!(st.rhs(&u, 0.2), adv.rhs(&u, 0.2));
        assert_eq!(st.norm_weights(), adv.norm_weights());
    }

    #[test]
    fn sine_stretch_metric_bounds() {
        let m = MappingSpec::default();
        for k in 0..=100 {
            let xi = k as f64 / 100.0;
            let d = m.dx_dxi(xi);
            assert!((0.8 - 1e-15..=1.2 + 1e-15).contains(&d));
        }
        assert!((m.x_of_xi(1.0f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_map_rejected() {
        let grid = Grid1D::unit(17).unwrap();
        let op = grid.first_derivative(AccuracyOrder::SECOND).unwrap();
        let r = assemble_stretched_advection(
            MappingSpec::SineStretch { amplitude: 1.5 },
            grid,
            op,
            BoundarySignal::<f64>::zero(),
        );
        assert!(matches!(r, Err(Error::SingularMapping { .. })));
    }

    #[test]
    fn constant_state_rate() {
        let grid = Grid1D::unit(17).unwrap();
        let op = grid.first_derivative(AccuracyOrder::SECOND).unwrap();
        let sys = assemble_stretched_advection(MappingSpec::default(), grid, op, BoundarySignal::zero()).unwrap();
        assert_eq!(sys.boundary_rate(&[0.5; 17], 0.0), -0.25);
    }
}

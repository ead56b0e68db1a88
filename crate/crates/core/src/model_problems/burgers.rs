use crate::error::Result;
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, BoundarySignal, Grid1D, SemiDiscrete};

/// Inviscid Burgers in split form, `u_t + ⅓(u²)_x + ⅓u u_x = 0`:
/// `u_t = −⅓D(u∘u) − ⅓u∘Du − ⅔max(u₀,0)[P⁻¹]₀(u₀ − g)e₀`.
///
/// The inflow penalty scales with the local wave speed and switches off when
/// the left boundary is an outflow.
#[derive(Debug, Clone)]
pub struct BurgersSystem<T: Real> {
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
    label: String,
}

pub fn assemble_burgers_split<T: Real>(
    grid: Grid1D<T>,
    op: FirstDerivativeOperator<T>,
    inflow: BoundarySignal<T>,
) -> Result<BurgersSystem<T>> {
    grid.check_operator(op.n_points(), *op.h())?;
    let label = format!("burgers split {} n={}", op.order(), op.n_points());
    Ok(BurgersSystem {
        grid,
        op,
        inflow,
        label,
    })
}

impl<T: Real> BurgersSystem<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    /// `−⅔max(u₀,0)(u₀ − g)`, before scaling by `[P⁻¹]₀`.
    pub fn inflow_penalty(&self, u: &[T], t: T) -> T {
        let speed = u[0].max(T::zero());
        -T::lit(2.0) / T::lit(3.0) * speed * (u[0] - self.inflow.at(t))
    }
}

impl<T: Real> SemiDiscrete<T> for BurgersSystem<T> {
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
        let third = T::one() / T::lit(3.0);
        let sq: Vec<T> = u.iter().map(|v| *v * *v).collect();
        let d_sq = self.op.apply(&sq);
        self.op.apply_into(u, out);
        for j in 0..u.len() {
            out[j] = -third * (d_sq[j] + u[j] * out[j]);
        }
        out[0] = out[0] + inv_first(self.op.norm_weights()) * self.inflow_penalty(u, t);
    }

    /// `−⅔(u_N³ − u₀³) + 2u₀·SAT`.
    fn boundary_rate(&self, u: &[T], t: T) -> T {
        let n = u.len() - 1;
        let two_thirds = T::lit(2.0) / T::lit(3.0);
        -two_thirds * (u[n].powi(3) - u[0].powi(3)) + T::lit(2.0) * u[0] * self.inflow_penalty(u, t)
    }

    fn is_linear(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp_ops::AccuracyOrder;

    fn system() -> BurgersSystem<f64> {
        let grid = Grid1D::unit(33).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        assemble_burgers_split(grid, op, BoundarySignal::zero()).unwrap()
    }

    #[test]
    fn zero_state_is_steady() {
        assert!(system().rhs(&vec![0.0; 33], 0.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_state_has_no_outflow_imbalance() {
        let sys = system();
        let u = vec![-0.4; 33];
        assert_eq!(sys.inflow_penalty(&u, 0.0), 0.0);
        assert!(sys.boundary_rate(&u, 0.0).abs() < 1e-16);
    }
}

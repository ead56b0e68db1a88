use crate::error::{Error, Result};
use crate::sbp_ops::FirstDerivativeOperator;
use crate::scalar::Real;

use super::{inv_first, inv_last, BoundarySignal, Grid1D, PenaltyConfig, SemiDiscrete};

/// Interface penalties of a two-block coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceTerms<T> {
    pub sigma_left: T,
    pub sigma_right: T,
    /// `σ_R = σ_L − a` holds, so the coupling telescopes in the weak form.
    pub conservative: bool,
}

/// `u_t + a u_x = 0` on two abutting blocks. `v` lives on the left block and
/// `u` on the right; the state is `(v ‖ u)`.
///
/// `v_t = −aD_Lv + σa[P_L⁻¹]₀(v₀ − g)e₀ + σ_L[P_L⁻¹]_N(v_N − u₀)e_N`
/// `u_t = −aD_Ru + σ_R[P_R⁻¹]₀(u₀ − v_N)e₀`
#[derive(Debug, Clone)]
pub struct TwoBlockAdvection<T: Real> {
    speed: T,
    sigma: T,
    interface: InterfaceTerms<T>,
    left_grid: Grid1D<T>,
    right_grid: Grid1D<T>,
    left_op: FirstDerivativeOperator<T>,
    right_op: FirstDerivativeOperator<T>,
    weights: Vec<T>,
    inflow: BoundarySignal<T>,
    label: String,
    warnings: Vec<String>,
}

pub fn assemble_two_block_advection<T: Real>(
    speed: T,
    left: (Grid1D<T>, FirstDerivativeOperator<T>),
    right: (Grid1D<T>, FirstDerivativeOperator<T>),
    penalty: &PenaltyConfig<T>,
    inflow: BoundarySignal<T>,
) -> Result<TwoBlockAdvection<T>> {
    super::split::check_positive_speed(speed)?;
    let (left_grid, left_op) = left;
    let (right_grid, right_op) = right;
    left_grid.check_operator(left_op.n_points(), *left_op.h())?;
    right_grid.check_operator(right_op.n_points(), *right_op.h())?;
    let gap = (left_grid.x1() - right_grid.x0()).abs();
    if gap > T::lit(1e-12) * (left_grid.h() + right_grid.h()) {
        return Err(Error::InvalidParameter {
            name: "interface",
            reason: format!(
                "blocks do not abut: left ends at {}, right starts at {}",
                left_grid.x1(),
                right_grid.x0()
            ),
        });
    }

    let mut warnings = Vec::new();
    penalty.check_boundary(&mut warnings)?;
    let sigma_left = penalty.interface_left;
    if sigma_left > speed / T::lit(2.0) {
        let err = Error::InadmissiblePenalty {
            name: "sigma_L",
            value: sigma_left.to_f64_lossy(),
            condition: "sigma_L <= a/2",
        };
        if !penalty.allow_unstable {
            return Err(err);
        }
        warnings.push(err.to_string());
    }
    let conserving = sigma_left - speed;
    let sigma_right = penalty.interface_right.unwrap_or(conserving);
    let conservative = (sigma_right - conserving).abs() <= T::epsilon() * T::lit(8.0) * (T::one() + speed.abs());
    if !conservative {
        warnings.push(format!(
            "sigma_R = {sigma_right} differs from sigma_L - a = {conserving}; interface is not conservative"
        ));
    }

    let weights = left_op
        .norm_weights()
        .iter()
        .chain(right_op.norm_weights())
        .copied()
        .collect();
    let label = format!(
        "two-block advection {} n_L={} n_R={}",
        left_op.order(),
        left_op.n_points(),
        right_op.n_points()
    );
    Ok(TwoBlockAdvection {
        speed,
        sigma: penalty.boundary,
        interface: InterfaceTerms {
            sigma_left,
            sigma_right,
            conservative,
        },
        left_grid,
        right_grid,
        left_op,
        right_op,
        weights,
        inflow,
        label,
        warnings,
    })
}

impl<T: Real> TwoBlockAdvection<T> {
    pub fn speed(&self) -> T {
        self.speed
    }

    pub fn interface(&self) -> InterfaceTerms<T> {
        self.interface
    }

    pub fn left_grid(&self) -> &Grid1D<T> {
        &self.left_grid
    }

    pub fn right_grid(&self) -> &Grid1D<T> {
        &self.right_grid
    }

    pub fn left_operator(&self) -> &FirstDerivativeOperator<T> {
        &self.left_op
    }

    pub fn right_operator(&self) -> &FirstDerivativeOperator<T> {
        &self.right_op
    }

    /// `(v, u)` views of a composite state.
    pub fn split_state<'a>(&self, state: &'a [T]) -> (&'a [T], &'a [T]) {
        state.split_at(self.left_grid.n_points())
    }

    /// Both node sets concatenated; the interface coordinate appears twice.
    pub fn nodes(&self) -> Vec<T> {
        self.left_grid
            .nodes()
            .iter()
            .chain(self.right_grid.nodes())
            .copied()
            .collect()
    }

    /// Energy rate contributed by the interface:
    /// `−a v_N² + a u₀² + 2σ_L v_N(v_N − u₀) + 2σ_R u₀(u₀ − v_N)`, which is
    /// `(2σ_L − a)(v_N − u₀)²` when the coupling is conservative.
    pub fn interface_contribution(&self, state: &[T]) -> T {
        let (v, u) = self.split_state(state);
        let vn = v[v.len() - 1];
        let u0 = u[0];
        let a = self.speed;
        let two = T::lit(2.0);
        let InterfaceTerms {
            sigma_left,
            sigma_right,
            ..
        } = self.interface;
        -a * vn * vn + a * u0 * u0 + two * sigma_left * vn * (vn - u0) + two * sigma_right * u0 * (u0 - vn)
    }
}

impl<T: Real> SemiDiscrete<T> for TwoBlockAdvection<T> {
    fn label(&self) -> &str {
        &self.label
    }

    fn state_dim(&self) -> usize {
        self.weights.len()
    }

    fn norm_weights(&self) -> &[T] {
        &self.weights
    }

    fn rhs_into(&self, state: &[T], t: T, out: &mut [T]) {
        let a = self.speed;
        let nl = self.left_grid.n_points();
        let (v, u) = self.split_state(state);
        let (out_v, out_u) = out.split_at_mut(nl);
        self.left_op.apply_into(v, out_v);
        self.right_op.apply_into(u, out_u);
        for o in out_v.iter_mut().chain(out_u.iter_mut()) {
            *o = -a * *o;
        }
        let jump = v[nl - 1] - u[0];
        let wl = self.left_op.norm_weights();
        let wr = self.right_op.norm_weights();
        out_v[0] = out_v[0] + inv_first(wl) * self.sigma * a * (v[0] - self.inflow.at(t));
        out_v[nl - 1] = out_v[nl - 1] + inv_last(wl) * self.interface.sigma_left * jump;
        out_u[0] = out_u[0] - inv_first(wr) * self.interface.sigma_right * jump;
    }

    /// `a(1+2σ)v₀² − 2aσv₀g + [interface] − a u_N²`.
    fn boundary_rate(&self, state: &[T], t: T) -> T {
        let (v, u) = self.split_state(state);
        let a = self.speed;
        let s = self.sigma;
        let two = T::lit(2.0);
        let g = self.inflow.at(t);
        let un = u[u.len() - 1];
        a * (T::one() + two * s) * v[0] * v[0] - two * a * s * v[0] * g + self.interface_contribution(state)
            - a * un * un
    }

    fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp_ops::AccuracyOrder;

    fn blocks(sigma_left: f64, sigma_right: Option<f64>) -> Result<TwoBlockAdvection<f64>> {
        let lg = Grid1D::new(-1.0, 0.0, 17).unwrap();
        let rg = Grid1D::new(0.0, 1.0, 25).unwrap();
        let lo = lg.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let ro = rg.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let mut pen = PenaltyConfig::default().with_interface_left(sigma_left);
        if let Some(s) = sigma_right {
            pen = pen.with_interface_right(s);
        }
        assemble_two_block_advection(1.0, (lg, lo), (rg, ro), &pen, BoundarySignal::zero())
    }

    #[test]
    fn continuous_state_has_no_interface_sat() {
        let sys = blocks(-0.3, None).unwrap();
        let state: Vec<f64> = sys.nodes().iter().map(|x| x * x + 1.0).collect();
        let with = sys.rhs(&state, 0.0);
        let d = sys.right_operator().apply(&state[17..]);
        assert!((with[17] + d[0]).abs() < 1e-12);
        assert!(sys.interface_contribution(&state).abs() < 1e-12);
    }

    #[test]
    fn interface_quadratic_form() {
        let state: Vec<f64> = (0..42).map(|j| (j as f64 * 0.37).sin()).collect();
        let jump = state[16] - state[17];
        let cons = blocks(0.5, None).unwrap();
        assert!(cons.interface_contribution(&state).abs() < 1e-15);
        let upwind = blocks(0.0, None).unwrap();
        assert_eq!(upwind.interface().sigma_right, -1.0);
        assert!((upwind.interface_contribution(&state) + jump * jump).abs() < 1e-14);
    }

    #[test]
    fn admissibility_and_conservation_flags() {
        assert!(matches!(blocks(0.6, None), Err(Error::InadmissiblePenalty { .. })));
        let perturbed = blocks(0.0, Some(-0.9)).unwrap();
        assert!(!perturbed.interface().conservative);
        assert_eq!(perturbed.warnings().len(), 1);
    }
}

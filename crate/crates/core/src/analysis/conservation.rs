use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_problems::{SemiDiscrete, TwoBlockAdvection};
use crate::scalar::Real;

use super::random_state;

/// Weak-form balance of a two-block state against the test function
/// `φ(x) = sin(π(x − x₀)/L)`, which vanishes at both outer boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterfaceResidual {
    /// `φ_LᵀP_L v_t − a(D_Lφ_L)ᵀP_L v + φ_RᵀP_R u_t − a(D_Rφ_R)ᵀP_R u`.
    pub weak_form: f64,
    /// `φ*(v_N − u₀)(σ_L − σ_R − a)`, zero for a conservative coupling.
    pub interface_flux_error: f64,
    /// Sum of the magnitudes of the four weak-form terms.
    pub scale: f64,
}

impl InterfaceResidual {
    /// `|weak_form − interface_flux_error| / scale`.
    pub fn identity_error(&self) -> f64 {
        relative(self.weak_form - self.interface_flux_error, self.scale)
    }

    /// `|weak_form| / scale`, the conservation defect.
    pub fn conservation_defect(&self) -> f64 {
        relative(self.weak_form, self.scale)
    }
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x.abs() / scale
    } else {
        x.abs()
    }
}

fn test_function<T: Real>(nodes: &[T], x0: T, length: T) -> Vec<T> {
    let last = nodes.len() - 1;
    nodes
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if (i == 0 && *x == x0) || (i == last && *x == x0 + length) {
                T::zero()
            } else {
                (T::PI() * (*x - x0) / length).sin()
            }
        })
        .collect()
}

pub fn interface_residual<T: Real>(system: &TwoBlockAdvection<T>, state: &[T], t: T) -> Result<InterfaceResidual> {
    if state.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            found: state.len(),
        });
    }
    let x0 = system.left_grid().x0();
    let length = system.right_grid().x1() - x0;
    let a = system.speed();
    let rhs = system.rhs(state, t);
    let (v, u) = system.split_state(state);
    let (rv, ru) = system.split_state(&rhs);
    let mut terms = [T::zero(); 4];
    for (k, (grid, op, w, dw)) in [
        (system.left_grid(), system.left_operator(), v, rv),
        (system.right_grid(), system.right_operator(), u, ru),
    ]
    .into_iter()
    .enumerate()
    {
        let phi = test_function(grid.nodes(), x0, length);
        let dphi = op.apply(&phi);
        let p = op.norm_weights();
        for i in 0..p.len() {
            terms[2 * k] = terms[2 * k] + phi[i] * p[i] * dw[i];
            terms[2 * k + 1] = terms[2 * k + 1] - a * dphi[i] * p[i] * w[i];
        }
    }
    let interface = system.left_grid().x1();
    let phi_star = (T::PI() * (interface - x0) / length).sin();
    let iface = system.interface();
    let jump = v[v.len() - 1] - u[0];
    let predicted = phi_star * jump * (iface.sigma_left - iface.sigma_right - a);
    Ok(InterfaceResidual {
        weak_form: terms.iter().fold(T::zero(), |s, x| s + *x).to_f64_lossy(),
        interface_flux_error: predicted.to_f64_lossy(),
        scale: terms.iter().fold(T::zero(), |s, x| s + x.abs()).to_f64_lossy(),
    })
}

/// Worst case of [`interface_residual`] over seeded random states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub samples: usize,
    pub conservative: bool,
    pub max_identity_error: f64,
    pub max_conservation_defect: f64,
}

impl ConservationReport {
    /// A conservative coupling must telescope; any coupling must satisfy the
    /// weak-form identity.
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_identity_error <= tolerance && (!self.conservative || self.max_conservation_defect <= tolerance)
    }
}

pub fn interface_conservation_check<T: Real>(
    system: &TwoBlockAdvection<T>,
    seed: u64,
    count: usize,
) -> Result<ConservationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identity = 0.0f64;
    let mut defect = 0.0f64;
    for _ in 0..count {
        let state: Vec<T> = random_state(&mut rng, system.state_dim());
        let r = interface_residual(system, &state, T::zero())?;
        identity = identity.max(r.identity_error());
        defect = defect.max(r.conservation_defect());
    }
    Ok(ConservationReport {
        samples: count,
        conservative: system.interface().conservative,
        max_identity_error: identity,
        max_conservation_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_problems::{assemble_two_block_advection, BoundarySignal, Grid1D, PenaltyConfig};
    use crate::sbp_ops::AccuracyOrder;

    fn blocks(order: AccuracyOrder, pen: PenaltyConfig<f64>) -> TwoBlockAdvection<f64> {
        let lg = Grid1D::new(-1.0, 0.0, 33).unwrap();
        let rg = Grid1D::new(0.0, 1.0, 49).unwrap();
        let lo = lg.first_derivative(order).unwrap();
        let ro = rg.first_derivative(order).unwrap();
        assemble_two_block_advection(1.0, (lg, lo), (rg, ro), &pen, BoundarySignal::constant(0.7)).unwrap()
    }

    #[test]
    fn conservative_coupling_telescopes() {
        for order in AccuracyOrder::ALL {
            let sys = blocks(order, PenaltyConfig::default().with_interface_left(-0.5));
            let report = interface_conservation_check(&sys, 11, 50).unwrap();
            assert!(report.conservative && report.passes(1e-12), "{order:?} {report:?}");
        }
    }

    #[test]
    fn nonconservative_coupling_is_detected() {
        let pen = PenaltyConfig::default().with_interface_right(-0.5);
        let sys = blocks(AccuracyOrder::FOURTH, pen);
        let report = interface_conservation_check(&sys, 11, 50).unwrap();
        assert!(!report.conservative);
        assert!(report.max_identity_error < 1e-12, "{report:?}");
        assert!(report.max_conservation_defect > 1e-3, "{report:?}");
    }
}

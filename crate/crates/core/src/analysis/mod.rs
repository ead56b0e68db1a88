//! Norms, energy audits, convergence-rate fits, growth exponents, functional
//! accuracy and interface conservation.

mod conservation;
mod convergence;
mod functional;
mod growth;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_problems::SemiDiscrete;
use crate::scalar::Real;

pub use conservation::{interface_conservation_check, interface_residual, ConservationReport, InterfaceResidual};
pub use convergence::{
    fit_rate, fit_rate_trimmed, run_convergence_study, ConvergenceReport, LevelRecord, LevelSetup, RateFit,
    StudyOptions, MIN_FIT_LEVELS, R_SQUARED_THRESHOLD,
};
pub use functional::{evaluate_functional, FunctionalSpec};
pub use growth::{estimate_growth, is_non_increasing, GrowthEstimate};

/// `‖u‖²` in the given diagonal norm.
pub fn weighted_norm_squared<T: Real>(weights: &[T], state: &[T]) -> Result<T> {
    if weights.len() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: state.len(),
        });
    }
    Ok(weights.iter().zip(state).fold(T::zero(), |s, (w, u)| s + *w * *u * *u))
}

/// `‖u‖` in the system's norm.
pub fn discrete_norm<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, state: &[T]) -> Result<T> {
    weighted_norm_squared(system.norm_weights(), state).map(|e| e.sqrt())
}

/// `‖u‖²` in the system's norm.
pub fn discrete_norm_squared<T: Real, S: SemiDiscrete<T> + ?Sized>(system: &S, state: &[T]) -> Result<T> {
    weighted_norm_squared(system.norm_weights(), state)
}

/// Largest absolute entry.
pub fn max_norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Measured versus predicted energy rate at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyAudit<T> {
    /// `2⟨u, rhs(u, t)⟩`.
    pub measured: T,
    /// `boundary_rate(u, t)`.
    pub predicted: T,
    pub residual: T,
}

pub fn energy_rate_audit<T: Real, S: SemiDiscrete<T> + ?Sized>(
    system: &S,
    state: &[T],
    t: T,
) -> Result<EnergyAudit<T>> {
    if state.len() != system.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            found: state.len(),
        });
    }
    let rhs = system.rhs(state, t);
    let w = system.norm_weights();
    let half = w
        .iter()
        .zip(state.iter().zip(&rhs))
        .fold(T::zero(), |s, (wi, (u, r))| s + *wi * *u * *r);
    let measured = half + half;
    let predicted = system.boundary_rate(state, t);
    Ok(EnergyAudit {
        measured,
        predicted,
        residual: (measured - predicted).abs(),
    })
}

/// Worst case of [`energy_rate_audit`] over random states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuditSummary {
    pub samples: usize,
    /// `max |measured − predicted| / (1 + ‖u‖² + ‖u‖³)`.
    pub max_scaled_residual: f64,
    pub max_residual: f64,
}

impl AuditSummary {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_scaled_residual <= tolerance
    }
}

/// Random state with entries uniform in `[−1, 1]`, scaled by a random
/// amplitude between 0.1 and 10.
pub fn random_state<T: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    let amplitude = 10f64.powf(rng.gen_range(-1.0..1.0));
    (0..dim).map(|_| T::lit(amplitude * rng.gen_range(-1.0..1.0))).collect()
}

/// Audits `count` seeded random states at random times in `[0, t_max]`.
pub fn audit_random_states<T: Real, S: SemiDiscrete<T> + ?Sized>(
    system: &S,
    seed: u64,
    count: usize,
    t_max: f64,
) -> Result<AuditSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    for _ in 0..count {
        let u: Vec<T> = random_state(&mut rng, system.state_dim());
        let t = T::lit(rng.gen_range(0.0..=t_max));
        let audit = energy_rate_audit(system, &u, t)?;
        let norm = discrete_norm(system, &u)?.to_f64_lossy();
        let residual = audit.residual.to_f64_lossy();
        worst_abs = worst_abs.max(residual);
        worst = worst.max(residual / (1.0 + norm * norm + norm * norm * norm));
    }
    Ok(AuditSummary {
        samples: count,
        max_scaled_residual: worst,
        max_residual: worst_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_problems::{assemble_advection, BoundarySignal, Grid1D, PenaltyConfig};
    use crate::sbp_ops::AccuracyOrder;

    #[test]
    fn unit_constant_has_unit_norm() {
        for order in AccuracyOrder::ALL {
            let grid = Grid1D::unit(33).unwrap();
            let op = grid.first_derivative(order).unwrap();
            let e = weighted_norm_squared(op.norm_weights(), &[1.0f64; 33]).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_norm_is_half() {
        let grid = Grid1D::unit(65).unwrap();
        let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
        let u = grid.sample(|x: f64| (2.0 * std::f64::consts::PI * x).sin());
        assert!((weighted_norm_squared(op.norm_weights(), &u).unwrap() - 0.5).abs() < 1e-6);
        assert!(weighted_norm_squared(op.norm_weights(), &u[..3]).is_err());
    }

    #[test]
    fn zero_state_audit_is_zero() {
        let grid = Grid1D::unit(17).unwrap();
        let op = grid.first_derivative(AccuracyOrder::SECOND).unwrap();
        let sys = assemble_advection(1.0, grid, op, &PenaltyConfig::default(), BoundarySignal::zero()).unwrap();
        let a = energy_rate_audit(&sys, &[0.0; 17], 0.0).unwrap();
        assert_eq!((a.measured, a.predicted, a.residual), (0.0, 0.0, 0.0));
        let summary = audit_random_states(&sys, 7, 100, 1.0).unwrap();
        assert!(summary.passes(1e-11), "{summary:?}");
    }
}

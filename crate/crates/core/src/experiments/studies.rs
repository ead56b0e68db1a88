use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    evaluate_functional, fit_rate, fit_rate_trimmed, interface_residual, random_state, weighted_norm_squared,
    FunctionalSpec, RateFit,
};
use crate::error::Result;
use crate::model_problems::{
    assemble_steady_transport, assemble_two_block_advection, BoundarySignal, Grid1D, PenaltyConfig, SemiDiscrete,
};
use crate::sbp_ops::AccuracyOrder;
use crate::time_integration::{sbp_time_solve, solve_steady, SbpTimeProblem};

/// `∫₀¹ sin x dx = 1 − cos 1`.
pub const STEADY_FUNCTIONAL_EXACT: f64 = 0.459_697_694_131_860_3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalLevel {
    pub n: usize,
    pub h: f64,
    pub functional: f64,
    pub functional_error: f64,
    pub solution_error: f64,
}

/// Accuracy of `u_x = cos x`, `u(0) = 0` on `[0, 1]` and of `J(u) = ∫u dx`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalStudy {
    pub order: AccuracyOrder,
    pub levels: Vec<FunctionalLevel>,
    pub solution_fit: RateFit,
    pub functional_fit: RateFit,
    pub excluded_solution_levels: usize,
    pub excluded_functional_levels: usize,
}

impl FunctionalStudy {
    pub fn rate_gap(&self) -> f64 {
        self.functional_fit.rate - self.solution_fit.rate
    }
}

pub fn functional_study(order: AccuracyOrder, levels: &[usize]) -> Result<FunctionalStudy> {
    let mut records = Vec::with_capacity(levels.len());
    for &n in levels {
        let grid = Grid1D::unit(n)?;
        let op = grid.first_derivative(order)?;
        let system = assemble_steady_transport(&grid, &op, f64::cos, 0.0)?;
        let u = solve_steady(&system.matrix, &system.rhs)?;
        let diff: Vec<f64> = u.iter().zip(grid.nodes()).map(|(v, x)| v - x.sin()).collect();
        let functional = evaluate_functional(&FunctionalSpec::mean(n), &op, &u)?;
        records.push(FunctionalLevel {
            n,
            h: grid.h(),
            functional,
            functional_error: (functional - STEADY_FUNCTIONAL_EXACT).abs(),
            solution_error: weighted_norm_squared(op.norm_weights(), &diff)?.sqrt(),
        });
    }
    let h: Vec<f64> = records.iter().map(|l| l.h).collect();
    let sol: Vec<f64> = records.iter().map(|l| l.solution_error).collect();
    let fun: Vec<f64> = records.iter().map(|l| l.functional_error).collect();
    let (solution_fit, excluded_solution_levels) = fit_rate_trimmed(&h, &sol)?;
    let (functional_fit, excluded_functional_levels) = fit_rate_trimmed(&h, &fun)?;
    Ok(FunctionalStudy {
        order,
        levels: records,
        solution_fit,
        functional_fit,
        excluded_solution_levels,
        excluded_functional_levels,
    })
}

/// Conservation defect of the two-block coupling as `σ_R` moves away from
/// `σ_L − a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationStudy {
    pub order: AccuracyOrder,
    /// `|weak form| / scale` with the conservative penalty.
    pub baseline_defect: f64,
    pub perturbations: Vec<f64>,
    /// Absolute weak-form residuals, one per perturbation.
    pub residuals: Vec<f64>,
    /// Largest mismatch between the weak form and `φ*(v_N − u₀)(σ_L − σ_R − a)`.
    pub max_identity_error: f64,
    /// Slope of `log residual` against `log perturbation`.
    pub slope: f64,
}

pub fn interface_perturbation_study(
    order: AccuracyOrder,
    sigma_left: f64,
    perturbations: &[f64],
    seed: u64,
) -> Result<PerturbationStudy> {
    let speed = 1.0;
    let build = |sigma_right: Option<f64>| {
        let left = Grid1D::new(-1.0, 0.0, 33)?;
        let right = Grid1D::new(0.0, 1.0, 49)?;
        let lop = left.first_derivative(order)?;
        let rop = right.first_derivative(order)?;
        let mut pen = PenaltyConfig::default().with_interface_left(sigma_left);
        if let Some(s) = sigma_right {
            pen = pen.with_interface_right(s);
        }
        assemble_two_block_advection(speed, (left, lop), (right, rop), &pen, BoundarySignal::constant(0.5))
    };
    let base = build(None)?;
    let state: Vec<f64> = random_state(&mut ChaCha8Rng::seed_from_u64(seed), base.state_dim());
    let baseline = interface_residual(&base, &state, 0.0)?;
    let mut residuals = Vec::with_capacity(perturbations.len());
    let mut max_identity_error = baseline.identity_error();
    for &delta in perturbations {
        let sys = build(Some(sigma_left - speed + delta))?;
        let r = interface_residual(&sys, &state, 0.0)?;
        max_identity_error = max_identity_error.max(r.identity_error());
        residuals.push(r.weak_form.abs());
    }
    let slope = fit_rate(perturbations, &residuals)?.rate;
    Ok(PerturbationStudy {
        order,
        baseline_defect: baseline.conservation_defect(),
        perturbations: perturbations.to_vec(),
        residuals,
        max_identity_error,
        slope,
    })
}

/// Energy identity of the SBP time discretization for one `(λ, order)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SbpTimeIdentityCase {
    pub lambda: (f64, f64),
    pub order: AccuracyOrder,
    pub nodes: usize,
    pub relative_residual: f64,
    pub final_modulus: f64,
    pub initial_modulus: f64,
}

/// Solves `u_t = λu`, `u(0) = f` on `[0, t_final]` for every `λ` and order.
pub fn sbp_time_identity_sweep(
    lambdas: &[Complex<f64>],
    initial: Complex<f64>,
    t_final: f64,
    nodes: usize,
) -> Result<Vec<SbpTimeIdentityCase>> {
    let mut cases = Vec::new();
    for &lambda in lambdas {
        for order in AccuracyOrder::ALL {
            let n = nodes.max(order.min_points());
            let sol = sbp_time_solve(&SbpTimeProblem::new(lambda, initial, t_final, order, n)?)?;
            cases.push(SbpTimeIdentityCase {
                lambda: (lambda.re, lambda.im),
                order,
                nodes: n,
                relative_residual: sol.relative_residual,
                final_modulus: sol.final_value().norm(),
                initial_modulus: initial.norm(),
            });
        }
    }
    Ok(cases)
}

pub const RATE_MEASUREMENT_SLACK: f64 = 0.05;

/// Final-time error of the SBP time discretization under refinement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SbpTimeRateStudy {
    pub order: AccuracyOrder,
    pub lambda: (f64, f64),
    pub nodes: Vec<usize>,
    pub errors: Vec<f64>,
    pub fit: RateFit,
    /// Boundary order plus one, the least rate accepted.
    pub required_rate: f64,
}

impl SbpTimeRateStudy {
    /// The fitted rate may fall short of the required one by at most
    /// [`RATE_MEASUREMENT_SLACK`], since a fit approaches a sharp rate from
    /// either side.
    pub fn passes(&self) -> bool {
        self.fit.rate >= self.required_rate - RATE_MEASUREMENT_SLACK
    }

    /// Node counts that keep the final-time error above roundoff on `[0, 1]`
    /// for `λ = −1`.
    pub fn default_nodes(order: AccuracyOrder) -> Vec<usize> {
        match order.interior() {
            2 => vec![11, 21, 41, 81, 161],
            4 => vec![11, 21, 41, 81, 161],
            _ => vec![13, 17, 25, 33, 49],
        }
    }
}

pub fn sbp_time_rate_study(
    order: AccuracyOrder,
    lambda: Complex<f64>,
    t_final: f64,
    nodes: &[usize],
) -> Result<SbpTimeRateStudy> {
    let initial = Complex::new(1.0, 0.0);
    let exact = (lambda * t_final).exp() * initial;
    let mut errors = Vec::with_capacity(nodes.len());
    let mut h = Vec::with_capacity(nodes.len());
    for &n in nodes {
        let sol = sbp_time_solve(&SbpTimeProblem::new(lambda, initial, t_final, order, n)?)?;
        errors.push((sol.final_value() - exact).norm());
        h.push(t_final / (n - 1) as f64);
    }
    let (fit, _) = fit_rate_trimmed(&h, &errors)?;
    Ok(SbpTimeRateStudy {
        order,
        lambda: (lambda.re, lambda.im),
        nodes: nodes.to_vec(),
        errors,
        fit,
        required_rate: (order.boundary() + 1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functional_exact_value() {
        assert!((STEADY_FUNCTIONAL_EXACT - (1.0 - 1f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn perturbation_residual_is_linear() {
        let s = interface_perturbation_study(AccuracyOrder::FOURTH, 0.0, &[1e-3, 1e-2, 1e-1], 3).unwrap();
        assert!(s.baseline_defect < 1e-12, "{s:?}");
        assert!((s.slope - 1.0).abs() < 0.1, "{s:?}");
    }
}

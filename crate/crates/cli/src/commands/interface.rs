use sbpsat::analysis::interface_conservation_check;
use sbpsat::experiments::interface_perturbation_study;
use sbpsat::model_problems::{assemble_two_block_advection, BoundarySignal, Grid1D};
use sbpsat::AccuracyOrder;
use serde_json::json;

use super::{check_admissible, CommandOutput};
use crate::config::{invalid, ExperimentConfig};
use crate::error::CliResult;
use crate::output::OutputDir;

/// Bound on the scaled weak-form residual of a conservative coupling.
pub const CONSERVATION_TOLERANCE: f64 = 1e-12;
/// Largest accepted distance of the log-log slope from one.
pub const SLOPE_TOLERANCE: f64 = 0.1;

const LEFT_POINTS: usize = 33;
const RIGHT_POINTS: usize = 49;

pub fn interface(cfg: &ExperimentConfig) -> CliResult<CommandOutput> {
    let order = cfg.order_or(AccuracyOrder::FOURTH)?;
    let params = cfg.parameters()?;
    let seed = cfg.seed.unwrap_or(99);
    let count = cfg.count.unwrap_or(50);
    if count == 0 {
        return Err(invalid("count", "must be at least 1".into()));
    }
    let perturbations = cfg.perturbations.clone().unwrap_or_else(|| vec![1e-3, 1e-2, 1e-1]);
    if perturbations.len() < 2 || perturbations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(invalid(
            "perturbations",
            format!("need at least two positive offsets, got {perturbations:?}"),
        ));
    }
    let build = |p: &sbpsat::experiments::ProblemParameters| {
        let left = Grid1D::new(-1.0, 0.0, LEFT_POINTS)?;
        let right = Grid1D::new(0.0, 1.0, RIGHT_POINTS)?;
        let lop = left.first_derivative(order)?;
        let rop = right.first_derivative(order)?;
        assemble_two_block_advection(
            p.speed,
            (left, lop),
            (right, rop),
            &p.penalty(),
            BoundarySignal::constant(0.5),
        )
    };
    let admissible = check_admissible(&params, |p| build(p).map(|_| ()))?;
    let out = OutputDir::resolve(cfg.out_dir.clone())?;

    let system = build(&params)?;
    let report = interface_conservation_check(&system, seed, count)?;
    let study = interface_perturbation_study(order, params.sigma_left, &perturbations, seed)?;
    let slope_ok = (study.slope - 1.0).abs() <= SLOPE_TOLERANCE;
    let pass = report.passes(CONSERVATION_TOLERANCE) && study.baseline_defect <= CONSERVATION_TOLERANCE && slope_ok;

    let summary = json!({
        "command": "interface",
        "order": order,
        "left_points": LEFT_POINTS,
        "right_points": RIGHT_POINTS,
        "parameters": params,
        "admissible": admissible,
        "seed": seed,
        "conservation": report,
        "perturbation": study,
        "tolerances": {
            "conservation": CONSERVATION_TOLERANCE,
            "slope": SLOPE_TOLERANCE,
        },
        "pass": pass,
    });
    out.write_json("interface.json", &summary)?;
    Ok(CommandOutput { summary, pass })
}

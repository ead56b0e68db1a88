use sbpsat::sbp_ops::{
    verify_first_derivative, verify_second_derivative, ACCURACY_TOLERANCE, RECONSTRUCTION_TOLERANCE, SBP_TOLERANCE,
};
use sbpsat::{AccuracyOrder, FirstDerivative, SecondDerivative};
use serde_json::json;

use super::CommandOutput;
use crate::config::ExperimentConfig;
use crate::error::CliResult;

const DEFAULT_POINTS: usize = 65;

pub fn verify_ops(cfg: &ExperimentConfig) -> CliResult<CommandOutput> {
    let orders = match &cfg.order {
        Some(o) => vec![o.resolve()?],
        None => AccuracyOrder::ALL.to_vec(),
    };
    let n = cfg.n.unwrap_or(DEFAULT_POINTS);
    let h = 1.0 / (n.max(2) - 1) as f64;
    let mut pass = true;
    let mut operators = Vec::new();
    for order in orders {
        let first = verify_first_derivative(&FirstDerivative::build(order, n, h)?);
        let second = verify_second_derivative(&SecondDerivative::build(order, n, h)?);
        let ok = first.passes() && second.passes();
        pass &= ok;
        operators.push(json!({
            "order": order,
            "first_derivative": first,
            "second_derivative": second,
            "pass": ok,
        }));
    }
    Ok(CommandOutput {
        summary: json!({
            "command": "verify-ops",
            "n": n,
            "tolerances": {
                "sbp": SBP_TOLERANCE,
                "reconstruction": RECONSTRUCTION_TOLERANCE,
                "accuracy": ACCURACY_TOLERANCE,
            },
            "operators": operators,
            "pass": pass,
        }),
        pass,
    })
}

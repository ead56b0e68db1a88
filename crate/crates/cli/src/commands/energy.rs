use sbpsat::analysis::{estimate_growth, is_non_increasing};
use sbpsat::experiments::{build_system, energy_run, DataChoice, EnergyRunSettings, InitialData, SystemKind};
use sbpsat::AccuracyOrder;
use serde_json::json;

use super::converge::merge;
use super::{check_admissible, CommandOutput};
use crate::config::{invalid, ExperimentConfig};
use crate::error::CliResult;
use crate::output::OutputDir;

/// The energy-rate identity must hold to `IDENTITY_TOLERANCE·(1 + E + E^{3/2})`.
pub const IDENTITY_TOLERANCE: f64 = 1e-11;
/// Relative slack when checking that the energy never increases.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

pub fn energy(cfg: &ExperimentConfig) -> CliResult<CommandOutput> {
    let kind: SystemKind = cfg.system.as_deref().unwrap_or("advection").parse()?;
    let order = cfg.order_or(AccuracyOrder::FOURTH)?;
    let default_n = if kind == SystemKind::System2d { 17 } else { 65 };
    let sample_every = cfg.sample_every.unwrap_or(1);
    if sample_every == 0 {
        return Err(invalid("sample_every", "must be at least 1".into()));
    }
    let settings = EnergyRunSettings {
        t_final: cfg.t_final_or(1.0)?,
        cfl_safety: cfg.cfl_safety_or(0.5)?,
        seed: cfg.seed.unwrap_or(0),
        initial: cfg.initial.unwrap_or(InitialData::Smooth),
        data: cfg.data.unwrap_or(false),
        sample_every,
        ..EnergyRunSettings::new(kind, order, cfg.n.unwrap_or(default_n))
    };
    let params = cfg.parameters()?;
    let data = if settings.data {
        DataChoice::Manufactured
    } else {
        DataChoice::Homogeneous
    };
    let admissible = check_admissible(&params, |p| build_system(kind, order, settings.n, p, data).map(|_| ()))?;
    let out = OutputDir::resolve(cfg.out_dir.clone())?;

    let mut summary = json!({
        "command": "energy",
        "system": kind.name(),
        "order": order,
        "settings": settings,
        "parameters": params,
        "admissible": admissible,
        "tolerances": {
            "identity": IDENTITY_TOLERANCE,
            "identity_scale": "1 + E + E^1.5",
            "monotone": MONOTONE_TOLERANCE,
        },
    });
    let record = match energy_run(&settings, &params) {
        Ok(record) => record,
        Err(sbpsat::Error::NonFiniteState { step, time }) => {
            merge(
                &mut summary,
                json!({ "non_finite_state": { "step": step, "time": time }, "csv": null, "pass": false }),
            );
            out.write_json("energy.json", &summary)?;
            return Ok(CommandOutput { summary, pass: false });
        }
        Err(e) => return Err(e.into()),
    };
    out.write_text("energy.csv", &record.to_csv())?;
    let worst_scaled = (0..record.len())
        .map(|i| {
            let e = record.energies[i];
            (record.measured_rates[i] - record.predicted_rates[i]).abs() / (1.0 + e + e.powf(1.5))
        })
        .fold(0.0, f64::max);
    let growth = estimate_growth(&record.times, &record.energies).ok();
    let pass = worst_scaled <= IDENTITY_TOLERANCE;
    merge(
        &mut summary,
        json!({
        "samples": record.len(),
        "steps": record.steps.last(),
        "initial_energy": record.energies.first(),
        "final_energy": record.energies.last(),
        "max_rate_residual": record.max_rate_residual(),
        "max_scaled_rate_residual": worst_scaled,
        "non_increasing": is_non_increasing(&record.energies, MONOTONE_TOLERANCE),
        "growth_rate": growth.map(|g| g.alpha),
        "non_finite_state": null,
        "csv": "energy.csv",
        "pass": pass,
        }),
    );
    out.write_json("energy.json", &summary)?;
    Ok(CommandOutput { summary, pass })
}

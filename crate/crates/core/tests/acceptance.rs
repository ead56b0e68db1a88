//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbpsat::analysis::{
    discrete_norm_squared, estimate_growth, interface_conservation_check, random_state, R_SQUARED_THRESHOLD,
};
use sbpsat::experiments::{
    energy_audit_suite, energy_run, functional_study, instability_comparison, interface_perturbation_study,
    sbp_time_identity_sweep, sbp_time_rate_study, ConvergenceProblem, EnergyRunSettings, InitialData,
    ProblemParameters, SbpTimeRateStudy, SystemKind,
};
use sbpsat::model_problems::{
    assemble_stretched_advection, assemble_two_block_advection, BoundarySignal, Grid1D, MappingSpec, PenaltyConfig,
};
use sbpsat::sbp_ops::verify_first_derivative;
use sbpsat::{AccuracyOrder, FirstDerivative, Result};

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn operator_certification() -> Outcome {
    let mut worst_sbp = 0.0f64;
    let mut worst_acc = 0.0f64;
    let mut ok = true;
    for order in AccuracyOrder::ALL {
        for n in [17, 33, 65] {
            let op = FirstDerivative::on_interval(order, n, 0.0, 1.0)?;
            let report = verify_first_derivative(&op);
            worst_sbp = worst_sbp.max(report.max_sbp_residual);
            for a in &report.accuracy {
                if a.degree <= report.exact_interior_degree {
                    worst_acc = worst_acc.max(a.interior);
                }
                if a.degree <= report.exact_boundary_degree {
                    worst_acc = worst_acc.max(a.boundary);
                }
            }
            ok &= report.passes();
        }
    }
    ok &= worst_sbp <= 1e-13 && worst_acc <= 1e-10;
    Ok((
        ok,
        format!("max |Q+Q^T-B| = {worst_sbp:.2e}, max accuracy residual = {worst_acc:.2e}"),
    ))
}

fn energy_identities() -> Outcome {
    let cases = energy_audit_suite(2024, 100, &ProblemParameters::default())?;
    let worst = cases
        .iter()
        .max_by(|a, b| a.summary.max_scaled_residual.total_cmp(&b.summary.max_scaled_residual))
        .expect("audit suite is not empty");
    let systems: std::collections::BTreeSet<&str> = cases.iter().map(|c| c.kind.name()).collect();
    let ok = cases
        .iter()
        .all(|c| c.summary.samples == 100 && c.summary.passes(1e-11))
        && systems.len() == 8;
    Ok((
        ok,
        format!(
            "{} systems x 3 orders x 100 states, worst scaled residual {:.2e} ({} {})",
            systems.len(),
            worst.summary.max_scaled_residual,
            worst.kind,
            worst.order
        ),
    ))
}

fn convergence_table() -> Outcome {
    let table = [
        (ConvergenceProblem::Advection, AccuracyOrder::SECOND),
        (ConvergenceProblem::Advection, AccuracyOrder::FOURTH),
        (ConvergenceProblem::Advection, AccuracyOrder::SIXTH),
        (ConvergenceProblem::AdvectionDiffusionWide, AccuracyOrder::FOURTH),
        (ConvergenceProblem::AdvectionDiffusionNarrow, AccuracyOrder::FOURTH),
        (ConvergenceProblem::TwoBlock, AccuracyOrder::FOURTH),
        (ConvergenceProblem::PlaneWave2d, AccuracyOrder::FOURTH),
    ];
    let params = ProblemParameters::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (problem, order) in table {
        let levels = problem.default_levels();
        let report = problem.run(order, &levels, &params, &problem.default_options())?;
        let expected = problem.expected_rate(order);
        let used = report.levels.len() - report.excluded_levels;
        let pass = report.passes(expected, 0.25) && used >= 4;
        ok &= pass;
        parts.push(format!(
            "{problem} {order} {:.2}/{expected} r2={:.4}",
            report.fit.rate, report.fit.r_squared
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn functional_superconvergence() -> Outcome {
    let study = functional_study(AccuracyOrder::FOURTH, &[17, 33, 65, 129, 257])?;
    let ok = (study.functional_fit.rate - 4.0).abs() <= 0.3
        && (study.solution_fit.rate - 3.0).abs() <= 0.25
        && study.functional_fit.r_squared >= R_SQUARED_THRESHOLD
        && study.solution_fit.r_squared >= R_SQUARED_THRESHOLD;
    Ok((
        ok,
        format!(
            "functional rate {:.3}, solution rate {:.3}, finest J error {:.2e}",
            study.functional_fit.rate,
            study.solution_fit.rate,
            study.levels.last().map_or(f64::NAN, |l| l.functional_error)
        ),
    ))
}

fn sbp_in_time() -> Outcome {
    let lambdas = [
        Complex::new(-1.0, 0.0),
        Complex::new(-100.0, 0.0),
        Complex::new(-1e4, 0.0),
        Complex::new(-1.0, 5.0),
        Complex::new(-0.1, 10.0),
    ];
    let initial = Complex::new(1.0, 0.5);
    let cases = sbp_time_identity_sweep(&lambdas, initial, 1.0, 21)?;
    let worst = cases.iter().map(|c| c.relative_residual).fold(0.0, f64::max);
    let mut ok = cases.len() == 15 && worst <= 1e-10;

    let stiff = sbp_time_identity_sweep(&[Complex::new(-1e4, 0.0)], initial, 1.0, 11)?;
    let bounded: Vec<_> = stiff.iter().filter(|c| c.nodes == 11).collect();
    ok &= !bounded.is_empty() && bounded.iter().all(|c| c.final_modulus <= c.initial_modulus);

    let mut rates = Vec::new();
    for order in AccuracyOrder::ALL {
        let study = sbp_time_rate_study(
            order,
            Complex::new(-1.0, 0.0),
            1.0,
            &SbpTimeRateStudy::default_nodes(order),
        )?;
        ok &= study.passes();
        rates.push(format!("{order} {:.2}>={}", study.fit.rate, study.required_rate));
    }
    Ok((
        ok,
        format!(
            "identity worst {worst:.2e}; stiff |U_N| <= |f| on 11 nodes for {} orders; rates {}",
            bounded.len(),
            rates.join(", ")
        ),
    ))
}

fn interface_conservation() -> Outcome {
    let mut worst = 0.0f64;
    for order in AccuracyOrder::ALL {
        for sigma_left in [0.0, -0.5, 0.3] {
            let left = Grid1D::new(-1.0, 0.0, 33)?;
            let right = Grid1D::new(0.0, 1.0, 49)?;
            let lop = left.first_derivative(order)?;
            let rop = right.first_derivative(order)?;
            let pen = PenaltyConfig::default().with_interface_left(sigma_left);
            let sys =
                assemble_two_block_advection(1.0, (left, lop), (right, rop), &pen, BoundarySignal::constant(0.5))?;
            let report = interface_conservation_check(&sys, 99, 50)?;
            worst = worst.max(report.max_conservation_defect);
        }
    }
    let study = interface_perturbation_study(AccuracyOrder::FOURTH, 0.0, &[1e-3, 1e-2, 1e-1], 5)?;
    let ok = worst <= 1e-12 && study.baseline_defect <= 1e-12 && (study.slope - 1.0).abs() <= 0.1;
    Ok((
        ok,
        format!(
            "conservative defect {worst:.2e} (relative to scale); perturbation slope {:.4}",
            study.slope
        ),
    ))
}

fn strict_stability() -> Outcome {
    let params = ProblemParameters {
        mapping: MappingSpec::SineStretch { amplitude: 0.2 },
        ..Default::default()
    };
    let mut ok = true;
    let mut alphas = Vec::new();
    for n in [33, 65, 129] {
        let mut settings = EnergyRunSettings::new(SystemKind::Stretched, AccuracyOrder::FOURTH, n);
        settings.t_final = 2.0;
        let record = energy_run(&settings, &params)?;
        let growth = estimate_growth(&record.times, &record.energies)?;
        ok &= growth.alpha <= 0.02;
        alphas.push(format!("{:.3}", growth.alpha));
    }

    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for order in AccuracyOrder::ALL {
        let grid = Grid1D::unit(65)?;
        let op = grid.first_derivative(order)?;
        let sys = assemble_stretched_advection(params.mapping, grid, op, BoundarySignal::zero())?;
        for _ in 0..100 {
            let u: Vec<f64> = random_state(&mut rng, 65);
            let rhs = sbpsat::model_problems::SemiDiscrete::rhs(&sys, &u, 0.0);
            let weights = sbpsat::model_problems::SemiDiscrete::norm_weights(&sys);
            let measured: f64 = 2.0
                * weights
                    .iter()
                    .zip(&u)
                    .zip(&rhs)
                    .map(|((w, a), b)| w * a * b)
                    .sum::<f64>();
            let expected = -u[64] * u[64];
            let energy = discrete_norm_squared(&sys, &u)?;
            worst = worst.max((measured - expected).abs() / (1.0 + energy));
        }
    }
    ok &= worst <= 1e-12;
    Ok((
        ok,
        format!(
            "alpha_d at n=33,65,129: {}; identity residual {worst:.2e}",
            alphas.join(", ")
        ),
    ))
}

fn instability_evidence() -> Outcome {
    let (unstable, stable) = instability_comparison(-0.4, -0.6, 129, 10_000)?;
    let ok = unstable.energy_grew && !stable.energy_grew && stable.non_increasing;
    let unstable_note = match unstable.blow_up_step {
        Some(step) => format!("blow-up at step {step}"),
        None => format!(
            "energy grew to {:.6} from {:.6}",
            unstable.max_energy, unstable.initial_energy
        ),
    };
    Ok((
        ok,
        format!(
            "sigma=-0.4: {unstable_note}; sigma=-0.6: non-increasing over {} steps",
            stable.steps
        ),
    ))
}

fn determinism() -> Outcome {
    let params = ProblemParameters::default();
    let energy_csv = || -> Result<String> {
        let mut settings = EnergyRunSettings::new(SystemKind::TwoBlock, AccuracyOrder::FOURTH, 33);
        settings.initial = InitialData::Random;
        settings.seed = 42;
        settings.data = true;
        Ok(energy_run(&settings, &params)?.to_csv())
    };
    let converge_csv = || -> Result<String> {
        let problem = ConvergenceProblem::Advection;
        Ok(problem
            .run(
                AccuracyOrder::FOURTH,
                &[33, 65, 129, 257],
                &params,
                &problem.default_options(),
            )?
            .to_csv())
    };
    let audit_json = || -> Result<String> {
        let cases = energy_audit_suite(42, 20, &params)?;
        Ok(serde_json::to_string(&cases).expect("audit cases serialize"))
    };
    let e = (energy_csv()?, energy_csv()?);
    let c = (converge_csv()?, converge_csv()?);
    let a = (audit_json()?, audit_json()?);
    let ok = e.0 == e.1 && c.0 == c.1 && a.0 == a.1;
    Ok((
        ok,
        format!(
            "energy.csv {} bytes, converge.csv {} bytes, audit JSON {} bytes identical across runs",
            e.0.len(),
            c.0.len(),
            a.0.len()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("operator certification", operator_certification),
        ("energy identities", energy_identities),
        ("convergence rates", convergence_table),
        ("functional superconvergence", functional_superconvergence),
        ("SBP in time", sbp_in_time),
        ("interface conservation", interface_conservation),
        ("strict stability", strict_stability),
        ("instability evidence", instability_evidence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({:.1}s) {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

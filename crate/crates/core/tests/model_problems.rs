use std::f64::consts::PI;

use sbpsat::analysis::{discrete_norm_squared, energy_rate_audit, max_norm};
use sbpsat::experiments::system_2d_pair;
use sbpsat::model_problems::{
    assemble_2d_hyperbolic, assemble_advection_diffusion, assemble_burgers_split, assemble_split_variable_advection,
    assemble_steady_transport, assemble_stretched_advection, BoundarySignal, Forcing, Grid1D, Grid2D, MappingSpec,
    PenaltyConfig, SecondDerivativeMode, SemiDiscrete, SideData,
};
use sbpsat::time_integration::{rk4_integrate, solve_steady, TimeGrid};
use sbpsat::AccuracyOrder;

#[test]
fn advection_diffusion_manufactured_audit() {
    let (a, eps, k) = (1.0, 0.1, 2.0 * PI);
    for mode in [SecondDerivativeMode::Wide, SecondDerivativeMode::Narrow] {
        for order in AccuracyOrder::ALL {
            let grid = Grid1D::unit(33).unwrap();
            let op = grid.first_derivative(order).unwrap();
            let left = BoundarySignal::new("-2πε e^-t", move |t: f64| -eps * k * (-t).exp());
            let right = BoundarySignal::new("2πε e^-t", move |t: f64| eps * k * (-t).exp());
            let forcing = Forcing::new("manufactured", move |x: f64, t: f64| {
                (-t).exp() * (-(k * x).sin() + a * k * (k * x).cos() + eps * k * k * (k * x).sin())
            });
            let sys = assemble_advection_diffusion(a, eps, grid.clone(), op, mode, left, right)
                .unwrap()
                .with_forcing(forcing);
            for t in [0.0f64, 0.3, 1.1] {
                let u = grid.sample(|x| (-t).exp() * (k * x).sin());
                let audit = energy_rate_audit(&sys, &u, t).unwrap();
                let energy = discrete_norm_squared(&sys, &u).unwrap();
                assert!(audit.residual <= 1e-12 * energy, "{mode:?} {order} t={t}: {audit:?}");
            }
        }
    }
}

#[test]
fn split_growth_is_bounded_by_coefficient_derivative() {
    let grid = Grid1D::unit(65).unwrap();
    let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
    let sys = assemble_split_variable_advection(
        |x: f64| 1.0 + 0.5 * x,
        grid.clone(),
        op,
        &PenaltyConfig::default(),
        BoundarySignal::zero(),
    )
    .unwrap();
    let bound = max_norm(sys.coefficient_derivative());
    for j in 1..20 {
        let u = grid.sample(|x| (j as f64 * x).sin() + 0.3 * (3.0 * x).cos());
        let audit = energy_rate_audit(&sys, &u, 0.0).unwrap();
        let boundary = -(1.5 * u[64] * u[64] - u[0] * u[0]) - 2.0 * u[0] * u[0];
        let energy = discrete_norm_squared(&sys, &u).unwrap();
        assert!(audit.measured - boundary <= bound * energy + 1e-12, "j={j}");
    }
}

#[test]
fn stretched_map_homogeneous_rate_is_outflow_only() {
    for order in AccuracyOrder::ALL {
        let grid = Grid1D::unit(49).unwrap();
        let op = grid.first_derivative(order).unwrap();
        let sys = assemble_stretched_advection(
            MappingSpec::SineStretch { amplitude: 0.2 },
            grid,
            op,
            BoundarySignal::zero(),
        )
        .unwrap();
        for j in 0..10 {
            let u: Vec<f64> = (0..49).map(|i| ((i * (j + 3)) as f64 * 0.17).sin()).collect();
            let audit = energy_rate_audit(&sys, &u, 0.0).unwrap();
            let energy = discrete_norm_squared(&sys, &u).unwrap();
            assert!(
                (audit.measured + u[48] * u[48]).abs() <= 1e-12 * energy,
                "{order}: {audit:?}"
            );
            assert_eq!(audit.predicted, -u[48] * u[48]);
        }
    }
}

#[test]
fn system_2d_homogeneous_energy_never_grows() {
    let grid = Grid2D::unit_square(17).unwrap();
    let op_x = grid.x.first_derivative(AccuracyOrder::FOURTH).unwrap();
    let op_y = grid.y.first_derivative(AccuracyOrder::FOURTH).unwrap();
    let sys = assemble_2d_hyperbolic(system_2d_pair().unwrap(), grid, op_x, op_y, SideData::homogeneous()).unwrap();
    for j in 0..10 {
        let state: Vec<f64> = (0..sys.state_dim())
            .map(|i| ((i * (2 * j + 1)) as f64 * 0.29).cos())
            .collect();
        let audit = energy_rate_audit(&sys, &state, 0.0).unwrap();
        assert!(audit.measured <= 1e-12, "{audit:?}");
        assert!(audit.residual <= 1e-12 * (1.0 + discrete_norm_squared(&sys, &state).unwrap()));
    }
}

#[test]
fn burgers_bump_audit_before_shock() {
    let grid = Grid1D::unit(65).unwrap();
    let op = grid.first_derivative(AccuracyOrder::FOURTH).unwrap();
    let bump = |x: f64| {
        let r = (x - 0.5) / 0.2;
        if r.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - r * r)).exp()
        } else {
            0.0
        }
    };
    let u0 = grid.sample(bump);
    let sys = assemble_burgers_split(grid, op, BoundarySignal::zero()).unwrap();
    let record = rk4_integrate(&sys, &u0, TimeGrid::new(0.1, 100).unwrap(), 10).unwrap();
    for (u, t) in record.states.iter().zip(&record.times) {
        let audit = energy_rate_audit(&sys, u, *t).unwrap();
        let norm = discrete_norm_squared(&sys, u).unwrap().sqrt();
        assert!(audit.residual <= 1e-12 * (1.0 + norm.powi(3)), "t={t}: {audit:?}");
    }
}

#[test]
fn steady_transport_solves_for_every_order() {
    for order in AccuracyOrder::ALL {
        let grid = Grid1D::unit(33).unwrap();
        let op = grid.first_derivative(order).unwrap();
        let sys = assemble_steady_transport(&grid, &op, f64::cos, 0.0).unwrap();
        let u = solve_steady(&sys.matrix, &sys.rhs).unwrap();
        let err = u
            .iter()
            .zip(grid.nodes())
            .map(|(v, x)| (v - x.sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3, "{order}: {err}");
    }
}

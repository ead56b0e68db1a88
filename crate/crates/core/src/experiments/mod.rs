//! Registry of the verification experiments: model problems with their
//! manufactured data, exact solutions, expected convergence rates and the
//! runs behind each verification suite.

mod convergence;
mod studies;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{audit_random_states, is_non_increasing, random_state, AuditSummary};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model_problems::{
    assemble_2d_hyperbolic, assemble_advection, assemble_advection_diffusion, assemble_burgers_split,
    assemble_split_variable_advection, assemble_stretched_advection, assemble_two_block_advection, BoundarySignal,
    Forcing, Grid1D, Grid2D, MappingSpec, PenaltyConfig, SecondDerivativeMode, SemiDiscrete, SideData, SideSignal,
    SymmetricPair,
};
use crate::sbp_ops::AccuracyOrder;
use crate::time_integration::{cfl_timestep, rk4_integrate, TimeGrid, TrajectoryRecord};

pub use convergence::{ConvergenceProblem, DEFAULT_STUDY_OPTIONS};
pub use studies::{
    functional_study, interface_perturbation_study, sbp_time_identity_sweep, sbp_time_rate_study, FunctionalLevel,
    FunctionalStudy, PerturbationStudy, SbpTimeIdentityCase, SbpTimeRateStudy, RATE_MEASUREMENT_SLACK,
    STEADY_FUNCTIONAL_EXACT,
};

/// Physical and penalty parameters shared by the registered problems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemParameters {
    pub speed: f64,
    pub epsilon: f64,
    /// Inflow boundary penalty.
    pub sigma: f64,
    pub sigma_left: f64,
    /// Overrides the conservative choice `σ_L − a`.
    pub sigma_right: Option<f64>,
    pub mapping: MappingSpec,
    pub allow_unstable: bool,
}

impl Default for ProblemParameters {
    fn default() -> Self {
        Self {
            speed: 1.0,
            epsilon: 0.1,
            sigma: -1.0,
            sigma_left: 0.0,
            sigma_right: None,
            mapping: MappingSpec::default(),
            allow_unstable: false,
        }
    }
}

impl ProblemParameters {
    pub fn penalty(&self) -> PenaltyConfig<f64> {
        let mut p = PenaltyConfig::default()
            .with_boundary(self.sigma)
            .with_interface_left(self.sigma_left);
        if let Some(s) = self.sigma_right {
            p = p.with_interface_right(s);
        }
        if self.allow_unstable {
            p = p.allowing_unstable();
        }
        p
    }
}

/// Every semi-discrete model problem in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Advection,
    AdvectionDiffusionWide,
    AdvectionDiffusionNarrow,
    TwoBlock,
    Split,
    Stretched,
    Burgers,
    System2d,
}

impl SystemKind {
    pub const ALL: [Self; 8] = [
        Self::Advection,
        Self::AdvectionDiffusionWide,
        Self::AdvectionDiffusionNarrow,
        Self::TwoBlock,
        Self::Split,
        Self::Stretched,
        Self::Burgers,
        Self::System2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Advection => "advection",
            Self::AdvectionDiffusionWide => "advection-diffusion-wide",
            Self::AdvectionDiffusionNarrow => "advection-diffusion-narrow",
            Self::TwoBlock => "two-block",
            Self::Split => "split",
            Self::Stretched => "stretched",
            Self::Burgers => "burgers",
            Self::System2d => "system-2d",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "problem",
                reason: format!(
                    "unknown problem {s:?}; expected one of {}",
                    Self::ALL.map(Self::name).join(", ")
                ),
            })
    }
}

/// Boundary data and forcing used when assembling a registered system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataChoice {
    Homogeneous,
    /// Smooth nonzero boundary data and, where supported, forcing.
    Manufactured,
}

/// Coefficient of the split variable-coefficient problem.
pub fn split_coefficient(x: f64) -> f64 {
    1.0 + 0.5 * x
}

/// Symmetric coefficient pair of the 2-D system: `A` has one incoming and
/// one outgoing characteristic, `B` is positive definite.
pub fn system_2d_pair() -> Result<SymmetricPair<f64>> {
    SymmetricPair::new(
        DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, -0.5]])?,
        DenseMatrix::from_rows(&[vec![0.5, 0.3], vec![0.3, 1.0]])?,
    )
}

fn signal(data: DataChoice, description: &str, f: fn(f64) -> f64) -> BoundarySignal<f64> {
    match data {
        DataChoice::Homogeneous => BoundarySignal::zero(),
        DataChoice::Manufactured => BoundarySignal::new(description, f),
    }
}

/// Right block size giving `h_L = 1.5·h_R` when the left block has `n`
/// points on `[−1, 0]`, or `n` itself when `n − 1` is odd.
fn two_block_right_points(n: usize) -> usize {
    if (n - 1).is_multiple_of(2) {
        3 * (n - 1) / 2 + 1
    } else {
        n
    }
}

/// Assembles a registered system on `n` points per block or direction.
pub fn build_system(
    kind: SystemKind,
    order: AccuracyOrder,
    n: usize,
    params: &ProblemParameters,
    data: DataChoice,
) -> Result<Box<dyn SemiDiscrete<f64>>> {
    let manufactured = data == DataChoice::Manufactured;
    let unit = || -> Result<(Grid1D<f64>, _)> {
        let grid = Grid1D::unit(n)?;
        let op = grid.first_derivative(order)?;
        Ok((grid, op))
    };
    let system: Box<dyn SemiDiscrete<f64>> = match kind {
        SystemKind::Advection => {
            let (grid, op) = unit()?;
            let sys = assemble_advection(
                params.speed,
                grid,
                op,
                &params.penalty(),
                signal(data, "sin(3t) + 0.5", |t| (3.0 * t).sin() + 0.5),
            )?;
            if manufactured {
                Box::new(sys.with_forcing(Forcing::new("0.3 cos(x + t)", |x: f64, t: f64| 0.3 * (x + t).cos())))
            } else {
                Box::new(sys)
            }
        }
        SystemKind::AdvectionDiffusionWide | SystemKind::AdvectionDiffusionNarrow => {
            let (grid, op) = unit()?;
            let mode = if kind == SystemKind::AdvectionDiffusionWide {
                SecondDerivativeMode::Wide
            } else {
                SecondDerivativeMode::Narrow
            };
            let sys = assemble_advection_diffusion(
                params.speed,
                params.epsilon,
                grid,
                op,
                mode,
                signal(data, "cos(2t)", |t| (2.0 * t).cos()),
                signal(data, "0.4 sin(t)", |t| 0.4 * t.sin()),
            )?;
            if manufactured {
                Box::new(sys.with_forcing(Forcing::new("x sin(t)", |x: f64, t: f64| x * t.sin())))
            } else {
                Box::new(sys)
            }
        }
        SystemKind::TwoBlock => {
            let left = Grid1D::new(-1.0, 0.0, n)?;
            let right = Grid1D::new(0.0, 1.0, two_block_right_points(n))?;
            let lop = left.first_derivative(order)?;
            let rop = right.first_derivative(order)?;
            Box::new(assemble_two_block_advection(
                params.speed,
                (left, lop),
                (right, rop),
                &params.penalty(),
                signal(data, "sin(3t) + 0.5", |t| (3.0 * t).sin() + 0.5),
            )?)
        }
        SystemKind::Split => {
            let (grid, op) = unit()?;
            Box::new(assemble_split_variable_advection(
                split_coefficient,
                grid,
                op,
                &params.penalty(),
                signal(data, "sin(3t) + 0.5", |t| (3.0 * t).sin() + 0.5),
            )?)
        }
        SystemKind::Stretched => {
            let (grid, op) = unit()?;
            Box::new(assemble_stretched_advection(
                params.mapping,
                grid,
                op,
                signal(data, "sin(3t) + 0.5", |t| (3.0 * t).sin() + 0.5),
            )?)
        }
        SystemKind::Burgers => {
            let (grid, op) = unit()?;
            Box::new(assemble_burgers_split(
                grid,
                op,
                signal(data, "1 + 0.5 sin(t)", |t| 1.0 + 0.5 * t.sin()),
            )?)
        }
        SystemKind::System2d => {
            let grid = Grid2D::unit_square(n)?;
            let op_x = grid.x.first_derivative(order)?;
            let op_y = grid.y.first_derivative(order)?;
            let sides = match data {
                DataChoice::Homogeneous => SideData::homogeneous(),
                DataChoice::Manufactured => SideData::everywhere(SideSignal::new(
                    "(sin(x + t), cos(y - t))",
                    |x: f64, y: f64, t: f64, out: &mut [f64]| {
                        out[0] = (x + t).sin();
                        out[1] = (y - t).cos();
                    },
                )),
            };
            Box::new(assemble_2d_hyperbolic(system_2d_pair()?, grid, op_x, op_y, sides)?)
        }
    };
    Ok(system)
}

/// Energy-identity audit of one registered system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditCase {
    pub kind: SystemKind,
    pub order: AccuracyOrder,
    pub n: usize,
    pub summary: AuditSummary,
}

/// Grid size used for the energy audits; the 2-D system uses fewer points
/// per direction.
pub fn audit_points(kind: SystemKind, order: AccuracyOrder) -> usize {
    match kind {
        SystemKind::System2d => order.min_points().max(17),
        _ => 33,
    }
}

/// Audits every registered system and order on `count` seeded random states
/// with manufactured boundary data and forcing.
pub fn energy_audit_suite(seed: u64, count: usize, params: &ProblemParameters) -> Result<Vec<AuditCase>> {
    let mut cases = Vec::new();
    for kind in SystemKind::ALL {
        for order in AccuracyOrder::ALL {
            let n = audit_points(kind, order);
            let system = build_system(kind, order, n, params, DataChoice::Manufactured)?;
            let summary = audit_random_states(system.as_ref(), seed, count, 2.0)?;
            cases.push(AuditCase {
                kind,
                order,
                n,
                summary,
            });
        }
    }
    Ok(cases)
}

/// Smooth initial data matched to each system's state layout.
pub fn smooth_initial_state(system: &dyn SemiDiscrete<f64>, kind: SystemKind, n: usize) -> Vec<f64> {
    let bump = |x: f64| (std::f64::consts::PI * x).sin().powi(2) + 0.25;
    let dim = system.state_dim();
    match kind {
        SystemKind::TwoBlock => {
            let nl = n;
            let nr = dim - nl;
            let left = (0..nl).map(|i| -1.0 + i as f64 / (nl - 1) as f64);
            let right = (0..nr).map(|i| i as f64 / (nr - 1) as f64);
            left.chain(right).map(|x| bump(0.5 * (x + 1.0))).collect()
        }
        SystemKind::System2d => (0..dim)
            .map(|idx| {
                let point = idx / 2;
                let (i, j) = (point % n, point / n);
                let (x, y) = (i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64);
                bump(x) * bump(y) * if idx % 2 == 0 { 1.0 } else { -0.5 }
            })
            .collect(),
        _ => (0..dim).map(|i| bump(i as f64 / (dim - 1) as f64)).collect(),
    }
}

/// Initial data of an energy run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    Zero,
    Smooth,
    /// Seeded random state as used by the audits.
    Random,
}

/// Settings of a recorded energy run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyRunSettings {
    pub kind: SystemKind,
    pub order: AccuracyOrder,
    pub n: usize,
    pub t_final: f64,
    pub cfl_safety: f64,
    pub seed: u64,
    pub initial: InitialData,
    pub data: bool,
    pub sample_every: usize,
}

impl EnergyRunSettings {
    pub fn new(kind: SystemKind, order: AccuracyOrder, n: usize) -> Self {
        Self {
            kind,
            order,
            n,
            t_final: 1.0,
            cfl_safety: 0.5,
            seed: 0,
            initial: InitialData::Smooth,
            data: false,
            sample_every: 1,
        }
    }
}

/// Integrates a registered system with RK4 at the CFL step and records the
/// energy history.
pub fn energy_run(settings: &EnergyRunSettings, params: &ProblemParameters) -> Result<TrajectoryRecord<f64>> {
    let data = if settings.data {
        DataChoice::Manufactured
    } else {
        DataChoice::Homogeneous
    };
    let system = build_system(settings.kind, settings.order, settings.n, params, data)?;
    let u0 = match settings.initial {
        InitialData::Zero => vec![0.0; system.state_dim()],
        InitialData::Smooth => smooth_initial_state(system.as_ref(), settings.kind, settings.n),
        InitialData::Random => random_state(&mut ChaCha8Rng::seed_from_u64(settings.seed), system.state_dim()),
    };
    let dt = cfl_timestep(system.as_ref(), &u0, settings.cfl_safety, settings.t_final)?;
    let grid = TimeGrid::with_max_step(settings.t_final, dt)?;
    rk4_integrate(system.as_ref(), &u0, grid, settings.sample_every)
}

/// Energy history of advection under a given inflow penalty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstabilityOutcome {
    pub sigma: f64,
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub initial_energy: f64,
    pub max_energy: f64,
    /// Step at which the state became non-finite.
    pub blow_up_step: Option<usize>,
    /// Some step increased the energy by more than a relative `1e-8`.
    pub energy_grew: bool,
    pub non_increasing: bool,
}

/// Homogeneous advection with `u(x, 0) = cos(πx/2)` on `n` points, advanced
/// `steps` RK4 steps of size `dt`.
pub fn instability_run(
    sigma: f64,
    order: AccuracyOrder,
    n: usize,
    dt: f64,
    steps: usize,
) -> Result<InstabilityOutcome> {
    let grid = Grid1D::unit(n)?;
    let op = grid.first_derivative(order)?;
    let penalty = PenaltyConfig::default().with_boundary(sigma).allowing_unstable();
    let u0 = grid.sample(|x: f64| (std::f64::consts::FRAC_PI_2 * x).cos());
    let system = assemble_advection(1.0, grid, op, &penalty, BoundarySignal::zero())?;
    let time = TimeGrid::new(dt * steps as f64, steps)?;
    let (energies, blow_up_step) = match rk4_integrate(&system, &u0, time, 1) {
        Ok(record) => (record.energies, None),
        Err(Error::NonFiniteState { step, .. }) => (Vec::new(), Some(step)),
        Err(e) => return Err(e),
    };
    let initial_energy = crate::analysis::discrete_norm_squared(&system, &u0)?;
    let max_energy = energies.iter().fold(initial_energy, |m, e| m.max(*e));
    let energy_grew = blow_up_step.is_some() || energies.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-8));
    Ok(InstabilityOutcome {
        sigma,
        n,
        dt,
        steps,
        initial_energy,
        max_energy: if blow_up_step.is_some() {
            f64::INFINITY
        } else {
            max_energy
        },
        blow_up_step,
        energy_grew,
        non_increasing: blow_up_step.is_none() && is_non_increasing(&energies, 1e-12),
    })
}

/// Runs the admissible and inadmissible penalties under identical settings:
/// the same grid, initial data, step size and step count.
pub fn instability_comparison(
    unstable_sigma: f64,
    stable_sigma: f64,
    n: usize,
    steps: usize,
) -> Result<(InstabilityOutcome, InstabilityOutcome)> {
    let order = AccuracyOrder::FOURTH;
    let grid = Grid1D::unit(n)?;
    let op = grid.first_derivative(order)?;
    let reference = assemble_advection(
        1.0,
        grid,
        op,
        &PenaltyConfig::default().with_boundary(stable_sigma),
        BoundarySignal::zero(),
    )?;
    let dt = cfl_timestep(&reference, &vec![0.0; n], 0.5, f64::MAX)?;
    Ok((
        instability_run(unstable_sigma, order, n, dt, steps)?,
        instability_run(stable_sigma, order, n, dt, steps)?,
    ))
}

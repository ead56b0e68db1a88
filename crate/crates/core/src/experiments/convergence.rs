use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{run_convergence_study, ConvergenceReport, LevelSetup, StudyOptions};
use crate::error::{Error, Result};
use crate::model_problems::{
    assemble_2d_hyperbolic, assemble_advection, assemble_advection_diffusion, assemble_two_block_advection,
    symmetric_eigen, BoundarySignal, Grid1D, Grid2D, SecondDerivativeMode, SideData, SideSignal,
};
use crate::sbp_ops::AccuracyOrder;

use super::{system_2d_pair, ProblemParameters};

/// Study options used by the registered problems unless overridden.
pub const DEFAULT_STUDY_OPTIONS: StudyOptions = StudyOptions {
    t_final: 0.5,
    cfl_safety: 0.5,
    time_error_fraction: 0.01,
    max_time_refinements: 8,
    parallel: true,
};

/// Time-dependent problems with closed-form solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceProblem {
    /// `u = sin(2π(x − at))` on `[0, 1]`.
    Advection,
    /// `u = e^{−εk²t} sin(k(x − at))`, `k = 2π`, with the wide second derivative.
    AdvectionDiffusionWide,
    /// As above with the narrow second derivative.
    AdvectionDiffusionNarrow,
    /// `u = sin(2π(x − at))` on `[−1, 0] ∪ [0, 1]` with `h_L = 1.5·h_R`.
    TwoBlock,
    /// Plane wave `w sin(2π(x + y) − ωt)` with `(2πA + 2πB)w = ωw`.
    PlaneWave2d,
}

impl ConvergenceProblem {
    pub const ALL: [Self; 5] = [
        Self::Advection,
        Self::AdvectionDiffusionWide,
        Self::AdvectionDiffusionNarrow,
        Self::TwoBlock,
        Self::PlaneWave2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Advection => "advection",
            Self::AdvectionDiffusionWide => "advection-diffusion-wide",
            Self::AdvectionDiffusionNarrow => "advection-diffusion-narrow",
            Self::TwoBlock => "two-block",
            Self::PlaneWave2d => "plane-wave-2d",
        }
    }

    /// `min(r + 1, p)` for first-order problems and the wide operator,
    /// `min(r + 2, p)` for the narrow operator.
    pub fn expected_rate(self, order: AccuracyOrder) -> f64 {
        let (p, r) = (order.interior(), order.boundary());
        let gain = match self {
            Self::AdvectionDiffusionNarrow => 2,
            _ => 1,
        };
        (r + gain).min(p) as f64
    }

    /// Dyadic refinement levels. For the two-block problem the level is the
    /// point count of the right block; for the plane wave it is the point
    /// count per direction.
    pub fn default_levels(self) -> Vec<usize> {
        match self {
            Self::Advection => vec![33, 65, 129, 257, 513],
            Self::AdvectionDiffusionWide | Self::AdvectionDiffusionNarrow => vec![17, 33, 65, 129, 257],
            Self::TwoBlock => vec![25, 49, 97, 193, 385],
            Self::PlaneWave2d => vec![17, 33, 65, 129],
        }
    }

    pub fn default_t_final(self) -> f64 {
        match self {
            Self::Advection | Self::TwoBlock => 0.5,
            Self::AdvectionDiffusionWide | Self::AdvectionDiffusionNarrow => 0.2,
            Self::PlaneWave2d => 0.25,
        }
    }

    pub fn default_options(self) -> StudyOptions {
        StudyOptions {
            t_final: self.default_t_final(),
            ..DEFAULT_STUDY_OPTIONS
        }
    }

    /// Assembles one level with boundary data taken from the exact solution.
    pub fn level(self, order: AccuracyOrder, n: usize, params: &ProblemParameters) -> Result<LevelSetup<f64>> {
        let a = params.speed;
        let k = 2.0 * PI;
        match self {
            Self::Advection => {
                let grid = Grid1D::unit(n)?;
                let op = grid.first_derivative(order)?;
                let nodes = grid.nodes().to_vec();
                let h = grid.h();
                let inflow = BoundarySignal::new("sin(-2πat)", move |t: f64| (k * (-a * t)).sin());
                let system = assemble_advection(a, grid, op, &params.penalty(), inflow)?;
                Ok(LevelSetup {
                    n,
                    h,
                    system: Box::new(system),
                    exact: Box::new(move |t| nodes.iter().map(|x| (k * (x - a * t)).sin()).collect()),
                })
            }
            Self::AdvectionDiffusionWide | Self::AdvectionDiffusionNarrow => {
                let eps = params.epsilon;
                let mode = if self == Self::AdvectionDiffusionWide {
                    SecondDerivativeMode::Wide
                } else {
                    SecondDerivativeMode::Narrow
                };
                let decay = move |t: f64| (-eps * k * k * t).exp();
                let u = move |x: f64, t: f64| decay(t) * (k * (x - a * t)).sin();
                let ux = move |x: f64, t: f64| decay(t) * k * (k * (x - a * t)).cos();
                let grid = Grid1D::unit(n)?;
                let op = grid.first_derivative(order)?;
                let nodes = grid.nodes().to_vec();
                let h = grid.h();
                let left = BoundarySignal::new("a u - ε u_x at x = 0", move |t: f64| a * u(0.0, t) - eps * ux(0.0, t));
                let right = BoundarySignal::new("ε u_x at x = 1", move |t: f64| eps * ux(1.0, t));
                let system = assemble_advection_diffusion(a, eps, grid, op, mode, left, right)?;
                Ok(LevelSetup {
                    n,
                    h,
                    system: Box::new(system),
                    exact: Box::new(move |t| nodes.iter().map(|x| u(*x, t)).collect()),
                })
            }
            Self::TwoBlock => {
                if !(n - 1).is_multiple_of(3) {
                    return Err(Error::InvalidParameter {
                        name: "levels",
                        reason: format!("two-block levels need n − 1 divisible by 3, got n = {n}"),
                    });
                }
                let left = Grid1D::new(-1.0, 0.0, 2 * (n - 1) / 3 + 1)?;
                let right = Grid1D::new(0.0, 1.0, n)?;
                let h = right.h();
                let lop = left.first_derivative(order)?;
                let rop = right.first_derivative(order)?;
                let inflow = BoundarySignal::new("sin(2π(-1 - at))", move |t: f64| (k * (-1.0 - a * t)).sin());
                let system = assemble_two_block_advection(a, (left, lop), (right, rop), &params.penalty(), inflow)?;
                let nodes = system.nodes();
                Ok(LevelSetup {
                    n,
                    h,
                    system: Box::new(system),
                    exact: Box::new(move |t| nodes.iter().map(|x| (k * (x - a * t)).sin()).collect()),
                })
            }
            Self::PlaneWave2d => {
                let pair = system_2d_pair()?;
                let symbol = pair.a().add(pair.b()).scale(k);
                let (values, vectors) = symmetric_eigen(&symbol)?;
                let top = (0..values.len())
                    .max_by(|&i, &j| values[i].total_cmp(&values[j]))
                    .unwrap_or(0);
                let omega = values[top];
                let w: Vec<f64> = (0..pair.dim()).map(|c| vectors[(c, top)]).collect();
                let wave = move |x: f64, y: f64, t: f64, out: &mut [f64]| {
                    let s = (k * (x + y) - omega * t).sin();
                    for (o, wc) in out.iter_mut().zip(&w) {
                        *o = wc * s;
                    }
                };
                let grid = Grid2D::unit_square(n)?;
                let h = grid.x.h();
                let op_x = grid.x.first_derivative(order)?;
                let op_y = grid.y.first_derivative(order)?;
                let data = SideData::everywhere(SideSignal::new("plane wave trace", wave.clone()));
                let system = assemble_2d_hyperbolic(pair, grid, op_x, op_y, data)?;
                let template = system.clone();
                Ok(LevelSetup {
                    n,
                    h,
                    system: Box::new(system),
                    exact: Box::new(move |t| template.sample(|x, y, out| wave(x, y, t, out))),
                })
            }
        }
    }

    pub fn run(
        self,
        order: AccuracyOrder,
        levels: &[usize],
        params: &ProblemParameters,
        opts: &StudyOptions,
    ) -> Result<ConvergenceReport> {
        run_convergence_study(self.name(), Some(order), |n| self.level(order, n, params), levels, opts)
    }
}

impl fmt::Display for ConvergenceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConvergenceProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "problem",
                reason: format!(
                    "unknown convergence problem {s:?}; expected one of {}",
                    Self::ALL.map(Self::name).join(", ")
                ),
            })
    }
}

//! `sbpsat`: runs the operator, energy, convergence and time-integration
//! checks from the command line and writes CSV/JSON results.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbpsat::experiments::InitialData;

use crate::commands::CommandOutput;
use crate::config::{ExperimentConfig, OrderValue};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "sbpsat",
    version,
    about = "Summation-by-parts operators with weak boundary penalties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check Q + Qᵀ = B, norm positivity and monomial accuracy of the operators.
    VerifyOps(VerifyOpsArgs),
    /// Run a grid-refinement study and fit the convergence rate.
    Converge(ConvergeArgs),
    /// Integrate a model problem and record its energy history.
    Energy(EnergyArgs),
    /// Solve u' = λu with the summation-by-parts time discretization.
    TimeSbp(TimeSbpArgs),
    /// Accuracy of the solution and of its integral for steady transport.
    Functional(FunctionalArgs),
    /// Conservation of the two-block interface coupling.
    Interface(InterfaceArgs),
}

#[derive(Debug, Args)]
struct Shared {
    /// JSON file with flat keys; flags take precedence over its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Accuracy order as `p` or `p,r`.
    #[arg(long)]
    order: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output directory; defaults to $SBPSAT_OUT, then the working directory.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Physics {
    /// Advection speed.
    #[arg(long, allow_negative_numbers = true)]
    speed: Option<f64>,
    /// Diffusion coefficient.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Inflow boundary penalty.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Interface penalty on the left block.
    #[arg(long, allow_negative_numbers = true)]
    sigma_left: Option<f64>,
    /// Interface penalty on the right block; defaults to the conservative value.
    #[arg(long, allow_negative_numbers = true)]
    sigma_right: Option<f64>,
    /// Amplitude of the sine grid stretching; 0 gives a uniform grid.
    #[arg(long, allow_negative_numbers = true)]
    stretch_amplitude: Option<f64>,
    /// Accept penalties that violate the energy-stability conditions.
    #[arg(long)]
    allow_unstable: bool,
}

#[derive(Debug, Args)]
struct VerifyOpsArgs {
    #[command(flatten)]
    shared: Shared,
    /// Grid points; all orders are checked when no order is given.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    output: Output,
    #[command(flatten)]
    physics: Physics,
    /// advection, advection-diffusion-wide, advection-diffusion-narrow, two-block or plane-wave-2d.
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated grid sizes, coarsest first.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Fraction of the estimated RK4 stability limit used as the first step.
    #[arg(long)]
    cfl_safety: Option<f64>,
}

#[derive(Debug, Args)]
struct EnergyArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    output: Output,
    #[command(flatten)]
    physics: Physics,
    /// advection, advection-diffusion-wide, advection-diffusion-narrow, two-block, split, stretched,
    /// burgers or system-2d.
    #[arg(long)]
    system: Option<String>,
    /// Grid points (per direction for the 2-D system).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    cfl_safety: Option<f64>,
    /// Seed of the random initial state.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    initial: Option<InitialChoice>,
    /// Drive the system with manufactured boundary data and forcing.
    #[arg(long)]
    data: bool,
    /// Record every k-th step.
    #[arg(long)]
    sample_every: Option<usize>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum InitialChoice {
    Zero,
    Smooth,
    Random,
}

impl From<InitialChoice> for InitialData {
    fn from(c: InitialChoice) -> Self {
        match c {
            InitialChoice::Zero => InitialData::Zero,
            InitialChoice::Smooth => InitialData::Smooth,
            InitialChoice::Random => InitialData::Random,
        }
    }
}

#[derive(Debug, Args)]
struct TimeSbpArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    output: Output,
    /// Complex coefficient written as `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Initial value written as `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    initial_value: Option<String>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Time nodes of the single solve.
    #[arg(long)]
    nodes: Option<usize>,
    /// Comma-separated node counts of the refinement sweep.
    #[arg(long, value_delimiter = ',')]
    rate_nodes: Option<Vec<usize>>,
    /// Fail unless the observed rate reaches the boundary order plus one.
    #[arg(long)]
    require_rate: bool,
}

#[derive(Debug, Args)]
struct FunctionalArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    output: Output,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct InterfaceArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    output: Output,
    #[command(flatten)]
    physics: Physics,
    #[arg(long)]
    seed: Option<u64>,
    /// Random states per check.
    #[arg(long)]
    count: Option<usize>,
    /// Comma-separated offsets added to the conservative right penalty.
    #[arg(long, value_delimiter = ',')]
    perturbations: Option<Vec<f64>>,
}

impl Shared {
    fn flags(&self) -> ExperimentConfig {
        ExperimentConfig {
            order: self.order.clone().map(OrderValue::Text),
            ..Default::default()
        }
    }

    fn merge(&self, flags: ExperimentConfig) -> CliResult<ExperimentConfig> {
        let file = ExperimentConfig::load_optional(self.config.as_deref())?;
        Ok(file.overlay(self.flags().overlay(flags)))
    }
}

impl Physics {
    fn apply(&self, cfg: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            speed: self.speed,
            epsilon: self.epsilon,
            sigma: self.sigma,
            sigma_left: self.sigma_left,
            sigma_right: self.sigma_right,
            stretch_amplitude: self.stretch_amplitude,
            allow_unstable: self.allow_unstable.then_some(true),
            ..Default::default()
        }
        .overlay(cfg)
    }
}

fn run(command: Command) -> CliResult<CommandOutput> {
    match command {
        Command::VerifyOps(a) => {
            let cfg = a.shared.merge(ExperimentConfig {
                n: a.n,
                ..Default::default()
            })?;
            commands::verify_ops(&cfg)
        }
        Command::Converge(a) => {
            let flags = a.physics.apply(ExperimentConfig {
                problem: a.problem,
                levels: a.levels,
                t_final: a.t_final,
                cfl_safety: a.cfl_safety,
                out_dir: a.output.out_dir,
                ..Default::default()
            });
            commands::converge(&a.shared.merge(flags)?)
        }
        Command::Energy(a) => {
            let flags = a.physics.apply(ExperimentConfig {
                system: a.system,
                n: a.n,
                t_final: a.t_final,
                cfl_safety: a.cfl_safety,
                seed: a.seed,
                initial: a.initial.map(Into::into),
                data: a.data.then_some(true),
                sample_every: a.sample_every,
                out_dir: a.output.out_dir,
                ..Default::default()
            });
            commands::energy(&a.shared.merge(flags)?)
        }
        Command::TimeSbp(a) => {
            let cfg = a.shared.merge(ExperimentConfig {
                lambda: a.lambda,
                initial_value: a.initial_value,
                t_final: a.t_final,
                nodes: a.nodes,
                rate_nodes: a.rate_nodes,
                out_dir: a.output.out_dir,
                ..Default::default()
            })?;
            commands::time_sbp(&cfg, a.require_rate)
        }
        Command::Functional(a) => {
            let cfg = a.shared.merge(ExperimentConfig {
                levels: a.levels,
                out_dir: a.output.out_dir,
                ..Default::default()
            })?;
            commands::functional(&cfg)
        }
        Command::Interface(a) => {
            let flags = a.physics.apply(ExperimentConfig {
                seed: a.seed,
                count: a.count,
                perturbations: a.perturbations,
                out_dir: a.output.out_dir,
                ..Default::default()
            });
            commands::interface(&a.shared.merge(flags)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(|out| Ok((output::to_json(&out.summary)?, out.pass))) {
        Ok((summary, pass)) => {
            print!("{summary}");
            if pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: a tolerance check failed; see the summary");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

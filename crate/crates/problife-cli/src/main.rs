//! Command-line simulator for probabilistic Life-like rulesets.
//!
//! Subcommands cover the three engines and the renderer:
//!
//! - `run`     — mean-field evolution (the closed-form update)
//! - `exact`   — exact per-cell marginals by possible-worlds enumeration
//! - `sample`  — Monte Carlo trajectories or marginal estimates
//! - `compare` — mean-field vs a reference engine, per-generation CSV report
//! - `render`  — PPM images, one per generation
//!
//! Exit status: 0 success, 1 usage error, 2 ruleset/pattern parse error,
//! 3 exact-inference cell limit exceeded, 4 I/O failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{CliError, EngineChoice, RawSettings};

#[derive(Parser, Debug)]
#[command(
    name = "problife",
    about = "Probabilistic Game of Life simulator: rules carry probabilities, cells hold aliveness values in [0, 1]",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve the grid with the mean-field engine.
    Run(RunCmd),
    /// Compute exact per-cell marginals (small grids only).
    Exact(ExactCmd),
    /// Sample binary trajectories or estimate marginals.
    Sample(SampleCmd),
    /// Report mean-field vs reference-engine differences per generation.
    Compare(CompareCmd),
    /// Render generations as PPM images.
    Render(RenderCmd),
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Ruleset in extended B/S notation, e.g. "B3:0.8/S2:0.9,3:0.9".
    #[arg(long)]
    rules: Option<String>,
    /// Pattern file: ASCII ('.'/'O') or numeric ("P <width> <height>").
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Number of generations to advance [default: 1].
    #[arg(long)]
    steps: Option<u64>,
    /// Neighbours outside the grid read as dead, or wrap around.
    #[arg(long, value_enum)]
    boundary: Option<BoundaryOpt>,
    /// Decimal places for text output, 1..=17 [default: 6].
    #[arg(long)]
    precision: Option<usize>,
    /// Output file, or file template with a "{:0N}" placeholder for PPM.
    #[arg(long)]
    out: Option<String>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<FormatOpt>,
    /// key=value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum BoundaryOpt {
    Dead,
    Wrap,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatOpt {
    Csv,
    Pattern,
    Ppm,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum EngineOpt {
    Meanfield,
    Exact,
    Sample,
}

impl From<EngineOpt> for EngineChoice {
    fn from(value: EngineOpt) -> Self {
        match value {
            EngineOpt::Meanfield => EngineChoice::Meanfield,
            EngineOpt::Exact => EngineChoice::Exact,
            EngineOpt::Sample => EngineChoice::Sample,
        }
    }
}

#[derive(Args, Debug)]
struct RunCmd {
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ExactCmd {
    #[command(flatten)]
    common: CommonOpts,
    /// Maximum grid cells accepted by exact enumeration [default: 12,
    /// or the PROBLIFE_CELL_LIMIT environment variable].
    #[arg(long)]
    cell_limit: Option<usize>,
}

#[derive(Args, Debug)]
struct SampleCmd {
    #[command(flatten)]
    common: CommonOpts,
    /// Number of trajectories for marginal estimation [default: 1000].
    #[arg(long)]
    samples: Option<u64>,
    /// Base seed of the random stream [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Emit one sampled binary trajectory instead of marginal estimates.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Args, Debug)]
struct CompareCmd {
    #[command(flatten)]
    common: CommonOpts,
    /// Reference engine to compare the mean-field engine against
    /// [default: exact].
    #[arg(long, value_enum)]
    engine: Option<EngineOpt>,
    /// Number of trajectories when the reference engine is `sample`.
    #[arg(long)]
    samples: Option<u64>,
    /// Base seed of the random stream [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum grid cells accepted by exact enumeration.
    #[arg(long)]
    cell_limit: Option<usize>,
}

#[derive(Args, Debug)]
struct RenderCmd {
    #[command(flatten)]
    common: CommonOpts,
    /// Engine that produces the rendered generations [default: meanfield].
    #[arg(long, value_enum)]
    engine: Option<EngineOpt>,
    /// Square pixels per cell, at least 1 [default: 10].
    #[arg(long)]
    cell_size: Option<u32>,
    /// Draw 1-pixel separator lines between cells.
    #[arg(long)]
    gridlines: bool,
    /// Base seed when rendering a sampled trajectory [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum grid cells accepted by exact enumeration.
    #[arg(long)]
    cell_limit: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.status())
        }
    }
}

fn raw_settings(common: &CommonOpts) -> RawSettings {
    RawSettings {
        rules: common.rules.clone(),
        pattern: common.pattern.clone(),
        steps: common.steps,
        boundary: common.boundary.map(Into::into),
        precision: common.precision,
        out: common.out.clone(),
        format: common.format.map(Into::into),
        config: common.config.clone(),
        ..RawSettings::default()
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(cmd) => {
            let settings = raw_settings(&cmd.common).resolve()?;
            commands::cmd_run(&settings)
        }
        Command::Exact(cmd) => {
            let mut raw = raw_settings(&cmd.common);
            raw.cell_limit = cmd.cell_limit;
            let settings = raw.resolve()?;
            commands::cmd_exact(&settings)
        }
        Command::Sample(cmd) => {
            let mut raw = raw_settings(&cmd.common);
            raw.samples = cmd.samples;
            raw.seed = cmd.seed;
            raw.trajectory = cmd.trajectory;
            let settings = raw.resolve()?;
            commands::cmd_sample(&settings)
        }
        Command::Compare(cmd) => {
            let mut raw = raw_settings(&cmd.common);
            raw.engine = cmd.engine.map(EngineChoice::from);
            raw.engine_default = Some(EngineChoice::Exact);
            raw.samples = cmd.samples;
            raw.seed = cmd.seed;
            raw.cell_limit = cmd.cell_limit;
            let settings = raw.resolve()?;
            commands::cmd_compare(&settings)
        }
        Command::Render(cmd) => {
            let mut raw = raw_settings(&cmd.common);
            raw.engine = cmd.engine.map(EngineChoice::from);
            raw.cell_size = cmd.cell_size;
            raw.gridlines = cmd.gridlines;
            raw.seed = cmd.seed;
            raw.cell_limit = cmd.cell_limit;
            let settings = raw.resolve()?;
            commands::cmd_render(&settings)
        }
    }
}

impl From<BoundaryOpt> for problife::BoundaryPolicy {
    fn from(value: BoundaryOpt) -> Self {
        match value {
            BoundaryOpt::Dead => problife::BoundaryPolicy::Dead,
            BoundaryOpt::Wrap => problife::BoundaryPolicy::Toroidal,
        }
    }
}

impl From<FormatOpt> for config::OutputFormat {
    fn from(value: FormatOpt) -> Self {
        match value {
            FormatOpt::Csv => config::OutputFormat::Csv,
            FormatOpt::Pattern => config::OutputFormat::Pattern,
            FormatOpt::Ppm => config::OutputFormat::Ppm,
        }
    }
}

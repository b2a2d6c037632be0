use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod output;
mod run;

use config::RunConfig;
use output::OutDir;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Validation(_) => 2,
            RunError::Convergence(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nozzleflow", version, about = "Steady subsonic Euler flows in infinitely long 2-D nozzles")]
struct Cli {
    #[command(subcommand)]
    task: Task,
    /// Run configuration (TOML).
    #[arg(short = 'c', long = "config", global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to output.dir in the config, then `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Grid override, e.g. 201x41.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Do not print the run-report.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LimitMode {
    Gamma,
    Sonic,
}

#[derive(Debug, Subcommand)]
enum Task {
    /// Solve one flow and dump the field.
    Solve,
    /// Solve and report the discrete residual diagnostics.
    Diagnose,
    /// Far-field states and the outlet pressure.
    Asymptotics,
    /// Bracket the critical mass flux.
    Continuation,
    /// Solve the mollified family and classify the captured sheet.
    Classify,
    /// Limit studies.
    Limits {
        #[arg(long, value_enum, default_value = "gamma")]
        mode: LimitMode,
    },
}

fn execute(cli: &Cli) -> Result<run::Outcome, RunError> {
    let path = cli.config.as_ref().ok_or_else(|| RunError::Config("missing -c <config>".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(g) = &cli.grid {
        cfg.override_grid(g)?;
    }
    let dir = cli.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| "out".into());
    let out = OutDir::create(&dir)?;
    let outcome = match cli.task {
        Task::Solve => run::run_solve(&cfg, &out),
        Task::Diagnose => run::run_diagnose(&cfg, &out),
        Task::Asymptotics => run::run_asymptotics(&cfg, &out),
        Task::Continuation => run::run_continuation(&cfg, &out),
        Task::Classify => run::run_classify(&cfg, &out),
        Task::Limits { mode: LimitMode::Gamma } => run::run_limits_gamma(&cfg, &out),
        Task::Limits { mode: LimitMode::Sonic } => run::run_limits_sonic(&cfg, &out),
    }?;
    out.write("report.txt", &outcome.report.render())?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                print!("{}", outcome.report.render());
            }
            ExitCode::from(if outcome.partial { 4 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

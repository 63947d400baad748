//! Batch front end: sweeps over field strengths, curve and table emission.

// NaN must fail validation, hence `!(x > 0.0)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{OutputKind, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] starkwell::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser)]
#[command(name = "starkwell", version, about = "Ionization of a delta well in a static field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write CSV tables plus manifest.json.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field strengths, comma separated.
    #[arg(long = "f", value_delimiter = ',', allow_negative_numbers = true)]
    f_values: Option<Vec<f64>>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_steps: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Tables to emit, comma separated.
    #[arg(long, value_delimiter = ',')]
    output: Option<Vec<OutputKind>>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl From<RunArgs> for Overrides {
    fn from(a: RunArgs) -> Self {
        Self {
            f_values: a.f_values,
            t_min: a.t_min,
            t_max: a.t_max,
            steps: a.t_steps,
            n_max: a.n_max,
            tol: a.tol,
            outputs: a.output,
            output_path: a.out_dir,
        }
    }
}

const EXIT_ERROR: u8 = 1;
const EXIT_WARNINGS: u8 = 2;

fn execute(args: RunArgs) -> Result<ExitCode, CliError> {
    let base = match &args.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let cfg = base.layer(args.into()).resolve()?;
    let report = run::compute(&cfg)?;
    run::write(&cfg, &report)?;
    for fl in &report.flags {
        let f = fl.f.map_or(String::new(), |f| format!(" f={f}"));
        let t = fl.t.map_or(String::new(), |t| format!(" t={t}"));
        eprintln!("warning: {} not converged ({}){f}{t}", fl.output, fl.detail);
    }
    Ok(if report.flags.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_WARNINGS) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run(args) = cli.command;
    execute(args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_ERROR)
    })
}

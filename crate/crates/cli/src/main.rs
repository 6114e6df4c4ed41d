//! `hyperfermi`: verification suites, exact two-point functions and decay
//! certificates for the fermionic hyperbolic sigma model.

mod compute;
mod input;
mod report;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

/// Exit 2 for unusable input, 3 when a computation exceeds a capacity limit.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Capacity(String),
}

impl From<hyperfermi_core::Error> for CliError {
    fn from(e: hyperfermi_core::Error) -> Self {
        match e {
            hyperfermi_core::Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hyperfermi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock timing to the report. Reruns are then no longer
    /// byte-identical.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Single-site closed forms, norm formulas and one-point ratios.
    VerifySingleSite(verify::SingleSiteArgs),
    /// Exact polymer representation of the partition function.
    VerifyPolymer(verify::PolymerArgs),
    /// Fermionic m = 1 partition function against the arboreal gas.
    VerifyArboreal(verify::ArborealArgs),
    /// Edge-level norm estimates of the cluster expansion.
    VerifyNorms(verify::NormsArgs),
    /// Exact or floating two-point function, optionally with its series.
    TwoPoint(compute::TwoPointArgs),
    /// Decay bound for a coupling class.
    Bound(compute::BoundArgs),
    /// Empirical activity constants over a parameter grid.
    Constants(compute::ConstantsArgs),
}

/// `--graph` / `--lattice` pair shared by graph-based commands.
#[derive(Args, Clone, Debug, Default)]
pub struct GraphArgs {
    /// Graph JSON file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Lattice shorthand, e.g. `1d:6` or `2d:3x4`.
    #[arg(long)]
    pub lattice: Option<String>,
}

/// Output of a command: a JSON report, or raw text (CSV).
pub enum Output {
    Report(report::Report),
    Text(String, bool),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("HYPERFERMI_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Parse(format!("HYPERFERMI_THREADS must be a positive integer, got '{}'", value)))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Parse(format!("thread pool: {}", e)))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let start = Instant::now();
    let output = match cli.command {
        Command::VerifySingleSite(a) => Output::Report(verify::single_site(&a)?),
        Command::VerifyPolymer(a) => Output::Report(verify::polymer(&a)?),
        Command::VerifyArboreal(a) => Output::Report(verify::arboreal(&a)?),
        Command::VerifyNorms(a) => Output::Report(verify::norms(&a)?),
        Command::TwoPoint(a) => Output::Report(compute::two_point(&a)?),
        Command::Bound(a) => Output::Report(compute::bound(&a)?),
        Command::Constants(a) => compute::constants(&a)?,
    };
    let (text, passed) = match output {
        Output::Report(mut report) => {
            if cli.timing {
                report.timing = Some(serde_json::json!({ "seconds": start.elapsed().as_secs_f64() }));
            }
            let passed = report.passed();
            let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
            text.push('\n');
            (text, passed)
        }
        Output::Text(text, passed) => (text, passed),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {}", path.display(), e)))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).ok();
        }
    }
    Ok(passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(CliError::Capacity(msg)) => {
            eprintln!("capacity error: {}", msg);
            ExitCode::from(3)
        }
    }
}

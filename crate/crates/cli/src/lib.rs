//! Command-line harness for `spdc-boson`: analytic sweeps, Monte Carlo
//! campaigns, exact output sampling and interferometer decomposition.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod formula;
pub mod run_config;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Mode, RawConfig};
use crate::error::{io_error, CliError};
use crate::run_config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "spdc-boson", version, about = "Heralded-SPDC boson sampling: analytic sweeps and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an analytic formula over up to two swept parameters.
    Analytic(Flags),
    /// Run a Monte Carlo ensemble and compare it with the closed forms.
    Simulate(Flags),
    /// Enumerate the exact output distribution and draw samples from it.
    Sample(Flags),
    /// Decompose an interferometer into two-mode rotations.
    Decompose(Flags),
}

/// Every flag mirrors a configuration key and overrides the config file.
#[derive(Debug, Args)]
struct Flags {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the effective configuration here and continue.
    #[arg(long, value_name = "PATH")]
    save_config: Option<PathBuf>,
    /// fig2, fig4, fig5, beamsplitter or identity.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_name = "NAME")]
    formula: Option<String>,
    /// Photons per run.
    #[arg(long)]
    n: Option<String>,
    /// SPDC sources in the farm.
    #[arg(long)]
    sources: Option<String>,
    /// Interferometer modes (default n^2).
    #[arg(long)]
    modes: Option<String>,
    /// Squeezing parameter.
    #[arg(long)]
    r: Option<String>,
    /// Efficiency for both detector banks.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    eta_herald: Option<String>,
    #[arg(long)]
    eta_out: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    epsilon_prime: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Trials (simulate) or samples (sample).
    #[arg(long)]
    trials: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<String>,
    /// `param:min:max:steps` or `param:v1,v2,...`; at most twice.
    #[arg(long, value_name = "AXIS")]
    sweep: Vec<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file (analytic, simulate, decompose) or directory (sample).
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Write one JSON record per trial to this file (simulate only).
    #[arg(long, value_name = "PATH")]
    dump_trials: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Result<RawConfig, CliError> {
        let mut cfg = RawConfig::default();
        let pairs = [
            ("preset", &self.preset),
            ("formula", &self.formula),
            ("n", &self.n),
            ("sources", &self.sources),
            ("modes", &self.modes),
            ("r", &self.r),
            ("eta", &self.eta),
            ("eta-herald", &self.eta_herald),
            ("eta-out", &self.eta_out),
            ("epsilon", &self.epsilon),
            ("epsilon-prime", &self.epsilon_prime),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("workers", &self.workers),
            ("format", &self.format),
            ("out", &self.out),
            ("dump-trials", &self.dump_trials),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for axis in &self.sweep {
            cfg.set("sweep", axis)?;
        }
        Ok(cfg)
    }
}

fn execute(mode: Mode, flags: &Flags) -> Result<Output, CliError> {
    let mut raw = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_error(format!("reading {}", path.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    raw.overlay(flags.overrides()?);
    let cfg = RunConfig::resolve(mode, raw)?;
    if let Some(path) = &flags.save_config {
        fs::write(path, cfg.effective.to_text()).map_err(io_error(format!("writing {}", path.display())))?;
    }
    match mode {
        Mode::Analytic => commands::analytic(&cfg),
        Mode::Simulate => commands::simulate(&cfg),
        Mode::Sample => commands::sample(&cfg),
        Mode::Decompose => commands::decompose(&cfg),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 config or I/O error, 2 resource cap,
/// 3 validation failure.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (mode, flags) = match &cli.command {
        Command::Analytic(f) => (Mode::Analytic, f),
        Command::Simulate(f) => (Mode::Simulate, f),
        Command::Sample(f) => (Mode::Sample, f),
        Command::Decompose(f) => (Mode::Decompose, f),
    };
    match execute(mode, flags) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            match out.validation_failure {
                Some(msg) => {
                    let err = CliError::Validation(msg);
                    eprintln!("error: {err}");
                    err.exit_code()
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

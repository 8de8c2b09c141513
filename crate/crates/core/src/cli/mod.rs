//! Batch front end behind the `abq` binary.
//!
//! Exit codes: 0 success, 1 self-test failure or I/O error, 2 invalid
//! input, 3 numerical non-convergence or a singular extension matrix.

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use commands::{Artifact, Report};
pub use config::{Overrides, RunConfig};
use output::{Table, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "abq", version, about = "Aharonov-Bohm quadratic forms, extensions and spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Reduce a raw flux to (alpha, ell, conjugated).
    #[command(allow_negative_numbers = true)]
    Reduce(Overrides),
    /// Green-function profiles, small-r expansion and defect residuals.
    #[command(allow_negative_numbers = true)]
    Green(Overrides),
    /// Closed-form against quadrature L2 norms of the Green functions.
    #[command(allow_negative_numbers = true)]
    Norms(Overrides),
    /// The charge-block correction matrix over (alpha, lambda).
    #[command(allow_negative_numbers = true)]
    Xi(Overrides),
    /// Evaluate the extended form on one trial function.
    #[command(allow_negative_numbers = true)]
    Qbeta(Overrides),
    /// Extended form across lambda and cutoff representations.
    #[command(name = "lambda-invariance", allow_negative_numbers = true)]
    LambdaInvariance(Overrides),
    /// Negative eigenvalues of the unperturbed extension.
    #[command(allow_negative_numbers = true)]
    Boundstates(Overrides),
    /// Friedrichs eigenvalues per angular mode for an azimuthal field.
    #[command(allow_negative_numbers = true)]
    Spectrum(Overrides),
    /// Mode resolvent convergence as the flux vanishes.
    #[command(allow_negative_numbers = true)]
    Resolvent(Overrides),
    /// Recovery-sequence study of the vanishing-flux limit.
    #[command(allow_negative_numbers = true)]
    Gamma(Overrides),
    /// Run the invariant checks of every module.
    #[command(allow_negative_numbers = true)]
    Selftest(Overrides),
}

impl Command {
    fn overrides(&self) -> &Overrides {
        match self {
            Command::Reduce(o)
            | Command::Green(o)
            | Command::Norms(o)
            | Command::Xi(o)
            | Command::Qbeta(o)
            | Command::LambdaInvariance(o)
            | Command::Boundstates(o)
            | Command::Spectrum(o)
            | Command::Resolvent(o)
            | Command::Gamma(o)
            | Command::Selftest(o) => o,
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ABQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config("ABQ_THREADS", format!("expected a positive integer, got `{raw}`")))?;
    // A pool built earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn selftest_report() -> Report {
    let checks = selftest::run_checks();
    let mut table = Table::new(&["check", "passed", "value", "threshold"]);
    for c in &checks {
        table.push(vec![c.name.into(), usize::from(c.passed).into(), c.value.into(), c.threshold.into()]);
    }
    let failures: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let summary = if failures.is_empty() {
        format!("selftest: all {} checks passed", checks.len())
    } else {
        format!("selftest: {} of {} checks failed: {}", failures.len(), checks.len(), failures.join(", "))
    };
    Report { artifact: Artifact::Csv(table), summary, passed: failures.is_empty() }
}

/// Executes a parsed command and returns its report.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Reduce(_) => commands::reduce(cfg),
        Command::Green(_) => commands::green(cfg),
        Command::Norms(_) => commands::norms(cfg),
        Command::Xi(_) => commands::xi(cfg),
        Command::Qbeta(_) => commands::qbeta(cfg),
        Command::LambdaInvariance(_) => commands::lambda_invariance(cfg),
        Command::Boundstates(_) => commands::boundstates(cfg),
        Command::Spectrum(_) => commands::spectrum(cfg),
        Command::Resolvent(_) => commands::resolvent(cfg),
        Command::Gamma(_) => commands::gamma(cfg),
        Command::Selftest(_) => Ok(selftest_report()),
    }
}

fn run_parsed(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let cfg = RunConfig::resolve(cli.command.overrides())?;
    let report = execute(&cli.command, &cfg)?;
    let text = report.artifact.render();
    match &cfg.output {
        Some(path) => {
            write_atomic(path, &text)?;
            println!("{} -> {}", report.summary, path.display());
        }
        None => {
            print!("{text}");
            eprintln!("{}", report.summary);
        }
    }
    Ok(report.passed)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

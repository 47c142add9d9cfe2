use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fsi_core::harness::{self, SuiteReport};
use fsi_core::io::{self, Config};
use fsi_core::stability::{self, CheckResult, Status};
use fsi_core::{simulate, Trajectory};

/// Viscous Burgers flow coupled to a spring-held particle: simulation and
/// stability checks.
#[derive(Parser)]
#[command(name = "fsi", version)]
struct Cli {
    /// Only report failures.
    #[arg(long, global = true)]
    quiet: bool,

    /// Reserved; every run is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps (defaults to the available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write `trajectory.csv`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one configuration and write `trajectory.csv` and `report.json`
    /// with every stability check.
    IssCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Refinement study starting from the configuration's grid and step.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Functional bounds and confinement for one configuration.
    BoundsAudit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local exponential ISS check for one configuration.
    LocalEiss {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a predefined suite.
    Suite {
        /// One of iss-sweep, bounds-audit, converge, oracle-compare, local-eiss.
        #[arg(long)]
        name: String,
        /// Partial JSON configuration merged into every run of the suite.
        #[arg(long = "override")]
        overrides: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match &cli.command {
        Command::Simulate { config, out } => {
            let traj = simulate_file(config)?;
            io::write_trajectory(&traj, &out.join("trajectory.csv"))?;
            let ok = traj.termination.is_completed();
            if !cli.quiet || !ok {
                println!("{}", serde_json::to_string(&traj.termination)?);
            }
            Ok(ok)
        }
        Command::IssCheck { config, out } => {
            let traj = simulate_file(config)?;
            let report = stability::evaluate(&traj);
            io::write_trajectory(&traj, &out.join("trajectory.csv"))?;
            io::write_report(&report, &out.join("report.json"))?;
            Ok(summarize(
                cli.quiet,
                report.checks.iter().map(|c| ("run", c)),
            ))
        }
        Command::Converge {
            config,
            levels,
            out,
        } => {
            let report = harness::converge(&read_config(config)?, *levels, workers)?;
            finish_suite(cli.quiet, &report, out.as_deref())
        }
        Command::BoundsAudit { config, out } => {
            let report = harness::bounds_audit_suite(single(config)?, workers);
            finish_suite(cli.quiet, &report, out.as_deref())
        }
        Command::LocalEiss { config, out } => {
            let report = harness::local_eiss_suite(single(config)?, None, workers);
            finish_suite(cli.quiet, &report, out.as_deref())
        }
        Command::Suite {
            name,
            overrides,
            out,
        } => {
            let patch = match overrides {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Some(
                        serde_json::from_str(&text)
                            .with_context(|| format!("parsing {}", path.display()))?,
                    )
                }
                None => None,
            };
            let report = harness::run_suite(name, patch.as_ref(), workers)?;
            finish_suite(cli.quiet, &report, out.as_deref())
        }
    }
}

fn read_config(path: &Path) -> Result<Config> {
    io::read_config(path).with_context(|| format!("loading {}", path.display()))
}

fn single(path: &Path) -> Result<Vec<(String, Config)>> {
    let label = path.file_stem().map_or_else(
        || "config".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok(vec![(label, read_config(path)?)])
}

fn simulate_file(path: &Path) -> Result<Trajectory> {
    let c = read_config(path)?;
    Ok(simulate(&c.system, &c.grid, &c.solver, &c.signal)?)
}

fn finish_suite(quiet: bool, report: &SuiteReport, out: Option<&Path>) -> Result<bool> {
    match out {
        Some(path) => io::write_report(report, path)?,
        None if !quiet => print!("{}", io::report_json(report)),
        None => {}
    }
    for run in &report.runs {
        if let Some(e) = &run.error {
            eprintln!("{}: {e}", run.label);
        }
    }
    let ok = summarize(quiet, report.all_checks());
    Ok(ok && report.passed)
}

/// Prints failing gating checks (all checks unless `quiet`) to stderr.
fn summarize<'a>(quiet: bool, checks: impl Iterator<Item = (&'a str, &'a CheckResult)>) -> bool {
    let (mut pass, mut fail, mut na) = (0, 0, 0);
    for (label, c) in checks {
        match c.status {
            Status::Pass => pass += 1,
            Status::Na => na += 1,
            Status::Fail if c.gating => fail += 1,
            Status::Fail => {}
        }
        let failing = c.status == Status::Fail && c.gating;
        if failing || !quiet {
            let margin = c.margin.map_or("-".to_string(), |m| format!("{m:.3e}"));
            let tag = if c.gating { "" } else { " (logged)" };
            eprintln!("{:?}\t{label}\t{}\t{margin}{tag}", c.status, c.name);
        }
    }
    if !quiet {
        eprintln!("{pass} pass, {fail} gating fail, {na} n/a");
    }
    fail == 0
}

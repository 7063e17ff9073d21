use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use riselab::config::{Overrides, Scenario, ScenarioConfig};
use riselab::scenarios::execute;
use riselab::LabError;

/// Run one scenario over a batch of seeded instances.
///
/// Exit codes: 0 pass, 1 violation, 2 usage or configuration error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "riselab", version)]
struct Cli {
    /// Scenario to run; may instead come from `--scenario` or the config file.
    scenario: Option<Scenario>,
    /// Experiment description (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "scenario", value_name = "SCENARIO")]
    scenario_flag: Option<Scenario>,
    /// Intervals per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// First seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds.
    #[arg(long)]
    seeds: Option<u64>,
    /// Finite-difference time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, LabError> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let (Some(a), Some(b)) = (cli.scenario, cli.scenario_flag) {
        if a != b {
            return Err(LabError::Config(format!("scenario given twice: `{a}` and `{b}`")));
        }
    }
    config.apply(&Overrides {
        scenario: cli.scenario.or(cli.scenario_flag),
        grid: cli.grid,
        seed: cli.seed,
        seeds: cli.seeds,
        dt: cli.dt,
        out: cli.out,
    });
    let report = execute(&config)?;
    let total = report.checks.len();
    let failures = report.failures();
    if report.scenario.is_exploratory() {
        println!("{}: {total} findings recorded in {}", report.scenario, config.out.display());
    } else {
        println!("{}: {} of {total} checks passed, output in {}", report.scenario, total - failures, config.out.display());
        for c in report.checks.iter().filter(|c| !c.pass).take(10) {
            println!("  FAIL seed {} {}: {:e} > {:e}", c.seed, c.check, c.max_violation, c.tolerance);
        }
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("riselab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

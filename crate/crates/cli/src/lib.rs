//! Command-line front end: single runs, policy comparisons, parameter sweeps
//! and plot-ready reports over their output.

mod error;
mod report;
mod run;
pub mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use swarmsched::config::{parse_policy_label, RunConfig};
use swarmsched::policy::{PolicyKind, PolicySpec};

pub use error::CliError;
pub use report::cmd_report;
pub use run::{cmd_compare, cmd_run};
pub use sweep::cmd_sweep;

#[derive(Debug, Parser)]
#[command(name = "swarmsched", version, about = "Simulate duty-cycle schedulers on swarms of batteryless nodes")]
pub struct Cli {
    /// Scenario config file (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set sim.seed=7`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for compare and sweep. Defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Master seed; overrides `sim.seed`.
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its result bundle.
    Run,
    /// Run one scenario under several policies.
    Compare {
        /// Policy labels such as `PCP`, `GRDY(1)`, `ACES(N)`, `SRL(0.9)`.
        #[arg(short, long, value_delimiter = ',', num_args = 1.., required = true)]
        policies: Vec<String>,
    },
    /// Run every combination of a sweep spec.
    Sweep {
        /// Sweep spec file (TOML).
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
    /// Emit plot data and a summary from compare or sweep output.
    Report {
        /// Results directory; defaults to `--out`.
        dir: Option<PathBuf>,
    },
}

/// Parse `args` (program name first), run the command and return its exit
/// code. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run => cmd_run(cli),
        Command::Compare { policies } => cmd_compare(cli, policies),
        Command::Sweep { spec } => cmd_sweep(cli, spec),
        Command::Report { dir } => {
            let dir = dir
                .as_deref()
                .or(cli.out.as_deref())
                .ok_or_else(|| CliError::Usage("report needs a results directory (positional or --out)".into()))?;
            cmd_report(dir)
        }
    }
}

/// Load `--config` with `--set` and `--seed` applied.
pub(crate) fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let mut overrides = cli.set.clone();
    if let Some(s) = cli.seed {
        overrides.push(format!("sim.seed={s}"));
    }
    RunConfig::load(path, &overrides).map_err(CliError::usage)
}

pub(crate) fn out_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone())
}

pub(crate) fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Simulation(format!("{}: {e}", dir.display())))
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(CliError::sim)
}

/// The config's policy section with the kind, node limit and (for SRL) the
/// discount taken from `label`.
pub fn policy_for_label(base: &PolicySpec, label: &str) -> Result<PolicySpec, CliError> {
    let parsed = parse_policy_label(label).map_err(CliError::usage)?;
    let mut p = base.clone();
    p.kind = parsed.kind;
    p.node_limit = parsed.node_limit;
    if parsed.kind == PolicyKind::Srl && label.contains('(') {
        p.learning.gamma = parsed.learning.gamma;
    }
    Ok(p)
}

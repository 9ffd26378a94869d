use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use swarmsched::config::{with_policy, RunConfig};
use swarmsched::engine::{format_sig9, run_scenario, SimResult};
use swarmsched::metrics::{aggregate_daily, compute_metrics, day_label, metric_cells, write_metrics_csv, MetricReport};

use crate::{create_dir, load_config, out_dir, policy_for_label, thread_pool, Cli, CliError};

pub const RESOLVED_CONFIG: &str = "config.resolved.toml";

fn create(dir: &Path, name: &str) -> Result<File, CliError> {
    let p = dir.join(name);
    File::create(&p).map_err(|e| CliError::Simulation(format!("{}: {e}", p.display())))
}

fn write_resolved(dir: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let text = cfg.resolve().and_then(|r| r.to_toml()).map_err(CliError::usage)?;
    let p = dir.join(RESOLVED_CONFIG);
    std::fs::write(&p, text).map_err(|e| CliError::Simulation(format!("{}: {e}", p.display())))
}

fn daily(cfg: &RunConfig, r: &SimResult) -> Result<(Vec<MetricReport>, MetricReport), CliError> {
    let days = aggregate_daily(r, cfg.sim.slots_per_day()).map_err(CliError::sim)?;
    Ok((days, compute_metrics(r)))
}

/// `run`: one scenario, its CSV bundle, metrics and resolved config.
pub fn cmd_run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let scenario = cfg.scenario().map_err(CliError::usage)?;
    let result = run_scenario(&scenario).map_err(CliError::sim)?;
    let dir = out_dir(cli, &cfg);
    create_dir(&dir)?;
    result.write_activity_csv(create(&dir, "activity.csv")?).map_err(CliError::sim)?;
    result.write_events_csv(create(&dir, "events.csv")?).map_err(CliError::sim)?;
    result.write_energy_csv(create(&dir, "energy.csv")?).map_err(CliError::sim)?;
    let (days, total) = daily(&cfg, &result)?;
    write_metrics_csv(create(&dir, "metrics.csv")?, &days, &total).map_err(CliError::sim)?;
    write_resolved(&dir, &cfg)
}

pub const COMPARE_HEADER: [&str; 10] = [
    "policy",
    "day",
    "zeta",
    "gamma_pct",
    "idle_pct",
    "unprocessed_capture_pct",
    "events",
    "captured",
    "processed",
    "multi_active_pct",
];

pub const SUMMARY_HEADER: [&str; 6] = ["rank", "policy", "mean_zeta", "total_zeta", "gamma_pct", "idle_pct"];

/// `compare`: the same scenario once per policy. `compare.csv` holds one row
/// per (policy, day), a blank line, then the summary block ranked by mean
/// daily zeta.
pub fn cmd_compare(cli: &Cli, policies: &[String]) -> Result<(), CliError> {
    if policies.len() < 2 {
        return Err(CliError::Usage("compare needs at least two policies".into()));
    }
    let cfg = load_config(cli)?;
    let specs = policies
        .iter()
        .map(|l| policy_for_label(&cfg.policy, l))
        .collect::<Result<Vec<_>, _>>()?;
    let base = cfg.scenario().map_err(CliError::usage)?;
    let pool = thread_pool(cli.jobs)?;
    let results: Vec<Result<(Vec<MetricReport>, MetricReport), CliError>> = pool.install(|| {
        specs
            .par_iter()
            .map(|p| {
                let r = run_scenario(&with_policy(&base, p)).map_err(CliError::sim)?;
                daily(&cfg, &r)
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let dir = out_dir(cli, &cfg);
    create_dir(&dir)?;
    let mut text = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut text);
        w.write_record(COMPARE_HEADER).map_err(CliError::sim)?;
        for (label, (days, _)) in policies.iter().zip(&results) {
            for d in days {
                let mut row = vec![label.clone(), day_label(d)];
                row.extend(metric_cells(d));
                w.write_record(row).map_err(CliError::sim)?;
            }
        }
        w.flush().map_err(CliError::sim)?;
    }
    text.push(b'\n');
    let mut ranked: Vec<(usize, f64)> = results
        .iter()
        .enumerate()
        .map(|(i, (days, _))| (i, mean_zeta(days)))
        .collect();
    // NaN (no day with events) sorts last; ties keep the listed order.
    ranked.sort_by(|a, b| match (a.1.is_nan(), b.1.is_nan()) {
        (false, false) => b.1.total_cmp(&a.1),
        (x, y) => x.cmp(&y),
    });
    {
        let mut w = csv::Writer::from_writer(&mut text);
        w.write_record(SUMMARY_HEADER).map_err(CliError::sim)?;
        for (rank, &(i, mean)) in ranked.iter().enumerate() {
            let total = &results[i].1;
            w.write_record([
                (rank + 1).to_string(),
                policies[i].clone(),
                if mean.is_nan() { String::new() } else { format_sig9(mean) },
                total.zeta.map(format_sig9).unwrap_or_default(),
                format_sig9(total.gamma_pct),
                format_sig9(total.idle_pct),
            ])
            .map_err(CliError::sim)?;
        }
        w.flush().map_err(CliError::sim)?;
    }
    let p = dir.join("compare.csv");
    std::fs::write(&p, text).map_err(|e| CliError::Simulation(format!("{}: {e}", p.display())))?;
    write_resolved(&dir, &cfg)
}

/// Mean of the defined daily zeta values; NaN when none is defined.
fn mean_zeta(days: &[MetricReport]) -> f64 {
    let z: Vec<f64> = days.iter().filter_map(|d| d.zeta).collect();
    if z.is_empty() {
        f64::NAN
    } else {
        z.iter().sum::<f64>() / z.len() as f64
    }
}

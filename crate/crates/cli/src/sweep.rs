//! Parameter sweeps: the cartesian product of grid axes and seeds, each point
//! run under every listed policy.

use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use swarmsched::config::{with_policy, RunConfig};
use swarmsched::engine::run_scenario;
use swarmsched::metrics::{compute_metrics, metric_cells, MetricReport, METRICS_HEADER};
use swarmsched::policy::PolicySpec;
use swarmsched::Error;

use crate::{create_dir, load_config, out_dir, policy_for_label, thread_pool, Cli, CliError};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub policies: Vec<String>,
    /// Defaults to the config's own seed.
    #[serde(default)]
    pub seeds: Option<Seeds>,
    #[serde(default)]
    pub grid: Vec<Axis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { start, count } => (0..*count).map(|i| start + i).collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// Dotted config key, as for `--set`.
    pub key: String,
    #[serde(default)]
    pub values: Option<Vec<toml::Value>>,
    #[serde(default)]
    pub log_space: Option<LogSpace>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpace {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

/// `count` log-spaced points from `from` to `to`. The endpoints are exact.
pub fn log_space(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![from],
        _ => {
            let (a, b) = (from.ln(), to.ln());
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => from,
                    i if i == count - 1 => to,
                    i => (a + step * i as f64).exp(),
                })
                .collect()
        }
    }
}

/// One axis value: its TOML text for the override and its CSV cell.
#[derive(Debug, Clone)]
struct Level {
    toml: String,
    cell: String,
}

impl Axis {
    fn levels(&self) -> Result<Vec<Level>, CliError> {
        let levels: Vec<Level> = match (&self.values, &self.log_space) {
            (Some(v), None) => v
                .iter()
                .map(|x| Level {
                    toml: x.to_string(),
                    cell: match x {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    },
                })
                .collect(),
            (None, Some(ls)) => {
                if !(ls.from > 0.0 && ls.to > 0.0) || ls.count == 0 {
                    return Err(CliError::Usage(format!(
                        "grid `{}`: log_space needs positive endpoints and count >= 1",
                        self.key
                    )));
                }
                log_space(ls.from, ls.to, ls.count)
                    .into_iter()
                    .map(|x| Level { toml: format!("{x:?}"), cell: format!("{x:?}") })
                    .collect()
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "grid `{}` needs exactly one of `values` or `log_space`",
                    self.key
                )))
            }
        };
        if levels.is_empty() {
            return Err(CliError::Usage(format!("grid `{}` has no values", self.key)));
        }
        Ok(levels)
    }
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.to_string().trim_end())))
    }
}

/// One sweep point before it runs.
struct Point {
    index: usize,
    seed: u64,
    cells: Vec<String>,
    config: RunConfig,
}

/// Expand the grid: first axis outermost, seeds innermost.
fn points(base: &RunConfig, spec: &SweepSpec) -> Result<Vec<Point>, CliError> {
    let axes = spec.grid.iter().map(Axis::levels).collect::<Result<Vec<_>, _>>()?;
    let seeds = spec.seeds.as_ref().map(Seeds::values).unwrap_or_else(|| vec![base.sim.seed]);
    let text = base.to_toml().map_err(CliError::usage)?;
    let combos = axes.iter().map(Vec::len).product::<usize>();
    let mut out = Vec::with_capacity(combos * seeds.len());
    for c in 0..combos {
        // Mixed-radix digits with the last axis varying fastest.
        let mut rest = c;
        let mut pick = vec![0; axes.len()];
        for (k, levels) in axes.iter().enumerate().rev() {
            pick[k] = rest % levels.len();
            rest /= levels.len();
        }
        let mut overrides: Vec<String> = spec
            .grid
            .iter()
            .zip(&axes)
            .zip(&pick)
            .map(|((a, levels), &j)| format!("{}={}", a.key, levels[j].toml))
            .collect();
        let cells: Vec<String> = axes.iter().zip(&pick).map(|(l, &j)| l[j].cell.clone()).collect();
        for &seed in &seeds {
            overrides.push(format!("sim.seed={seed}"));
            let config = RunConfig::parse(&text, &overrides).map_err(CliError::usage)?;
            overrides.pop();
            out.push(Point { index: out.len(), seed, cells: cells.clone(), config });
        }
    }
    Ok(out)
}

/// A failed row keeps its error class and message.
pub type RowOutcome = Result<MetricReport, (String, String)>;

fn run_point(p: &Point, policies: &[String]) -> Vec<RowOutcome> {
    let fail = |e: &Error| (e.class().to_string(), e.to_string());
    let specs: Vec<Result<PolicySpec, CliError>> =
        policies.iter().map(|l| policy_for_label(&p.config.policy, l)).collect();
    let base = match p.config.scenario() {
        Ok(s) => s,
        Err(e) => return vec![Err(fail(&e)); policies.len()],
    };
    specs
        .iter()
        .map(|spec| match spec {
            Ok(spec) => run_scenario(&with_policy(&base, spec)).map(|r| compute_metrics(&r)).map_err(|e| fail(&e)),
            Err(e) => Err(("config".into(), e.to_string())),
        })
        .collect()
}

/// `sweep`: write `sweep.csv` with one row per (point, policy) in point-index
/// order. Exit 4 when any row failed.
pub fn cmd_sweep(cli: &Cli, spec_path: &Path) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let spec = SweepSpec::load(spec_path)?;
    if spec.policies.is_empty() {
        return Err(CliError::Usage("sweep spec lists no policies".into()));
    }
    for l in &spec.policies {
        policy_for_label(&cfg.policy, l)?;
    }
    let points = points(&cfg, &spec)?;
    let pool = thread_pool(cli.jobs)?;
    let outcomes: Vec<Vec<RowOutcome>> =
        pool.install(|| points.par_iter().map(|p| run_point(p, &spec.policies)).collect());

    let dir = out_dir(cli, &cfg);
    create_dir(&dir)?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(CliError::sim)?;
    let mut header = vec!["scenario".to_string(), "seed".to_string()];
    header.extend(spec.grid.iter().map(|a| a.key.clone()));
    header.extend(["policy", "status", "error_class"].map(String::from));
    header.extend(METRICS_HEADER[1..].iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(CliError::sim)?;
    let mut failed = 0;
    let total = points.len() * spec.policies.len();
    for (p, rows) in points.iter().zip(&outcomes) {
        for (label, row) in spec.policies.iter().zip(rows) {
            let mut rec = vec![p.index.to_string(), p.seed.to_string()];
            rec.extend(p.cells.iter().cloned());
            rec.push(label.clone());
            match row {
                Ok(m) => {
                    rec.extend(["ok".to_string(), String::new()]);
                    rec.extend(metric_cells(m));
                }
                Err((class, msg)) => {
                    failed += 1;
                    eprintln!("scenario {} {label}: {msg}", p.index);
                    rec.extend(["error".to_string(), class.clone()]);
                    rec.extend(std::iter::repeat_n(String::new(), METRICS_HEADER.len() - 1));
                }
            }
            w.write_record(&rec).map_err(CliError::sim)?;
        }
    }
    w.flush().map_err(CliError::sim)?;
    let resolved = cfg.resolve().and_then(|r| r.to_toml()).map_err(CliError::usage)?;
    std::fs::write(dir.join(crate::run::RESOLVED_CONFIG), resolved).map_err(CliError::sim)?;
    if failed > 0 {
        return Err(CliError::Partial { failed, total });
    }
    Ok(())
}

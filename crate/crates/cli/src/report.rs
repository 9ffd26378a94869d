//! Plot data and a text summary from `compare.csv` and `sweep.csv`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use swarmsched::engine::format_sig9;

use crate::CliError;

fn read(path: &Path) -> Result<Option<String>, CliError> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(Some(t)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{}: {e}", path.display()))),
    }
}

/// Records of one CSV block as header-keyed rows.
fn records(text: &str, what: &str) -> Result<(csv::StringRecord, Vec<csv::StringRecord>), CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::Usage(format!("{what}: {e}")))?.clone();
    let rows = r
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    Ok((header, rows))
}

fn column(header: &csv::StringRecord, name: &str, what: &str) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Usage(format!("{what}: missing column `{name}`")))
}

/// Per-policy bar data in first-seen order.
#[derive(Debug, Default, Clone)]
struct Bar {
    policy: String,
    zeta: Option<f64>,
    gamma_pct: f64,
    idle_pct: f64,
    scenarios: usize,
    failed: usize,
}

fn parse_f64(s: &str) -> Option<f64> {
    if s.is_empty() {
        None
    } else {
        s.parse().ok()
    }
}

fn sweep_bars(text: &str) -> Result<Vec<Bar>, CliError> {
    let (h, rows) = records(text, "sweep.csv")?;
    let [p, st, z, g, i] = ["policy", "status", "zeta", "gamma_pct", "idle_pct"]
        .map(|c| column(&h, c, "sweep.csv"));
    let (p, st, z, g, i) = (p?, st?, z?, g?, i?);
    let mut order: Vec<String> = Vec::new();
    // Sums of (zeta, zeta count, gamma, idle, ok rows, failed rows).
    let mut acc: HashMap<String, (f64, usize, f64, f64, usize, usize)> = HashMap::new();
    for r in &rows {
        let name = r[p].to_string();
        let a = acc.entry(name.clone()).or_insert_with(|| {
            order.push(name);
            Default::default()
        });
        if &r[st] != "ok" {
            a.5 += 1;
            continue;
        }
        if let Some(x) = parse_f64(&r[z]) {
            a.0 += x;
            a.1 += 1;
        }
        a.2 += parse_f64(&r[g]).unwrap_or(0.0);
        a.3 += parse_f64(&r[i]).unwrap_or(0.0);
        a.4 += 1;
    }
    Ok(order
        .into_iter()
        .map(|name| {
            let a = acc[&name];
            let ok = a.4.max(1) as f64;
            Bar {
                zeta: (a.1 > 0).then(|| a.0 / a.1 as f64),
                gamma_pct: a.2 / ok,
                idle_pct: a.3 / ok,
                scenarios: a.4,
                failed: a.5,
                policy: name,
            }
        })
        .collect())
}

/// Split `compare.csv` into its daily block and summary block.
fn compare_blocks(text: &str) -> Result<(&str, &str), CliError> {
    let cut = text
        .find("\n\n")
        .ok_or_else(|| CliError::Usage("compare.csv: summary block missing".into()))?;
    Ok((&text[..cut + 1], &text[cut + 2..]))
}

/// `(policy, day, zeta)` rows, skipping the `total` rows.
fn zeta_by_day(daily: &str) -> Result<Vec<[String; 3]>, CliError> {
    let (h, rows) = records(daily, "compare.csv")?;
    let (p, d, z) = (
        column(&h, "policy", "compare.csv")?,
        column(&h, "day", "compare.csv")?,
        column(&h, "zeta", "compare.csv")?,
    );
    Ok(rows
        .iter()
        .filter(|r| &r[d] != "total")
        .map(|r| [r[p].to_string(), r[d].to_string(), r[z].to_string()])
        .collect())
}

fn compare_bars(summary: &str) -> Result<Vec<Bar>, CliError> {
    let (h, rows) = records(summary, "compare.csv summary")?;
    let w = "compare.csv summary";
    let (p, z, g, i) = (
        column(&h, "policy", w)?,
        column(&h, "mean_zeta", w)?,
        column(&h, "gamma_pct", w)?,
        column(&h, "idle_pct", w)?,
    );
    Ok(rows
        .iter()
        .map(|r| Bar {
            policy: r[p].to_string(),
            zeta: parse_f64(&r[z]),
            gamma_pct: parse_f64(&r[g]).unwrap_or(0.0),
            idle_pct: parse_f64(&r[i]).unwrap_or(0.0),
            scenarios: 1,
            failed: 0,
        })
        .collect())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Simulation(format!("{}: {e}", path.display())))
}

/// `report`: `zeta_vs_day.csv` (from compare output), `gamma_bars.csv` and
/// `summary.txt`. Sweep results take precedence for the bars.
pub fn cmd_report(dir: &Path) -> Result<(), CliError> {
    let compare = read(&dir.join("compare.csv"))?;
    let sweep = read(&dir.join("sweep.csv"))?;
    if compare.is_none() && sweep.is_none() {
        return Err(CliError::Usage(format!(
            "{}: neither compare.csv nor sweep.csv found",
            dir.display()
        )));
    }
    let mut bars = None;
    let mut source = "";
    if let Some(text) = &compare {
        let (daily, summary) = compare_blocks(text)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["policy", "day", "zeta"]).map_err(CliError::sim)?;
        for row in zeta_by_day(daily)? {
            w.write_record(&row).map_err(CliError::sim)?;
        }
        let bytes = w.into_inner().map_err(CliError::sim)?;
        write(&dir.join("zeta_vs_day.csv"), &String::from_utf8_lossy(&bytes))?;
        bars = Some(compare_bars(summary)?);
        source = "compare.csv";
    }
    if let Some(text) = &sweep {
        bars = Some(sweep_bars(text)?);
        source = "sweep.csv";
    }
    let bars = bars.expect("one input present");

    let cell = |x: Option<f64>| x.map(format_sig9).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["policy", "gamma_pct", "idle_pct", "mean_zeta", "scenarios"])
        .map_err(CliError::sim)?;
    for b in &bars {
        w.write_record([
            b.policy.clone(),
            format_sig9(b.gamma_pct),
            format_sig9(b.idle_pct),
            cell(b.zeta),
            b.scenarios.to_string(),
        ])
        .map_err(CliError::sim)?;
    }
    let bytes = w.into_inner().map_err(CliError::sim)?;
    write(&dir.join("gamma_bars.csv"), &String::from_utf8_lossy(&bytes))?;

    let mut s = String::new();
    let _ = writeln!(s, "source: {source}");
    let _ = writeln!(s, "{:<12} {:>10} {:>10} {:>10} {:>9} {:>7}", "policy", "zeta_pct", "gamma_pct", "idle_pct", "scenarios", "failed");
    for b in &bars {
        let z = b.zeta.map(|z| format!("{:.2}", 100.0 * z)).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<12} {:>10} {:>10.2} {:>10.2} {:>9} {:>7}",
            b.policy, z, b.gamma_pct, b.idle_pct, b.scenarios, b.failed
        );
    }
    write(&dir.join("summary.txt"), &s)
}

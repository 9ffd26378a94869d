//! Scoring a [`SimResult`]: capture-and-process success rate (ζ), redundant
//! active time (Γ), idle time and unprocessed captures, overall and per day.

use std::io::Write;

use serde::Serialize;

use crate::engine::{format_sig9, EventOutcome, EventRecord, SimResult};
use crate::error::{Error, Result};

/// Metrics over one slot range and the events starting in it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    /// Zero-based day index; `None` for the whole run.
    pub day: Option<usize>,
    /// The bucket is shorter than a full day.
    pub partial: bool,
    /// `None` when no determinate event falls in the bucket.
    pub zeta: Option<f64>,
    pub gamma_pct: f64,
    pub idle_pct: f64,
    /// `None` when nothing was captured.
    pub unprocessed_capture_pct: Option<f64>,
    pub multi_active_pct: f64,
    /// Determinate events (deadline inside the horizon).
    pub events: usize,
    pub captured: usize,
    pub processed: usize,
    /// Events excluded because their deadline lies beyond the horizon.
    pub indeterminate: usize,
    pub slots: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct SlotCounts {
    slots: usize,
    zero: usize,
    one: usize,
}

fn slot_counts(r: &SimResult, from: usize, to: usize) -> SlotCounts {
    let mut c = SlotCounts {
        slots: to - from,
        ..Default::default()
    };
    for t in from..to {
        match r.activity.active_count(t) {
            0 => c.zero += 1,
            1 => c.one += 1,
            _ => {}
        }
    }
    c
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn determinate(e: &EventRecord, horizon: u64) -> bool {
    e.event.deadline_slot < horizon
}

fn report<'a>(
    r: &SimResult,
    from: usize,
    to: usize,
    events: impl Iterator<Item = &'a EventRecord>,
    day: Option<usize>,
    partial: bool,
) -> MetricReport {
    let c = slot_counts(r, from, to);
    let (mut n, mut captured, mut processed, mut indeterminate) = (0, 0, 0, 0);
    for e in events {
        if !determinate(e, r.horizon) {
            indeterminate += 1;
            continue;
        }
        n += 1;
        match e.outcome {
            EventOutcome::Missed => {}
            EventOutcome::CapturedOnly => captured += 1,
            EventOutcome::CapturedAndProcessed => {
                captured += 1;
                processed += 1;
            }
        }
    }
    MetricReport {
        day,
        partial,
        zeta: (n > 0).then(|| processed as f64 / n as f64),
        gamma_pct: pct(c.slots - c.one, c.slots),
        idle_pct: pct(c.zero, c.slots),
        unprocessed_capture_pct: (captured > 0).then(|| pct(captured - processed, captured)),
        multi_active_pct: pct(c.slots - c.one - c.zero, c.slots),
        events: n,
        captured,
        processed,
        indeterminate,
        slots: c.slots,
    }
}

/// ζ: events captured at their start and processed by their deadline, over
/// all determinate events.
pub fn capture_process_success_rate(r: &SimResult) -> Result<f64> {
    report(r, 0, 0, r.events.iter(), None, false)
        .zeta
        .ok_or_else(|| Error::UndefinedMetric("zeta needs at least one event with a deadline inside the horizon".into()))
}

/// Γ in percent: slots where not exactly one node is active. Zero-active
/// slots count as redundant, as the formula states.
pub fn redundant_active_time(r: &SimResult) -> f64 {
    let c = slot_counts(r, 0, r.horizon as usize);
    pct(c.slots - c.one, c.slots)
}

/// Percent of slots with no node active.
pub fn idle_time(r: &SimResult) -> f64 {
    let c = slot_counts(r, 0, r.horizon as usize);
    pct(c.zero, c.slots)
}

/// Percent of slots with two or more nodes active.
pub fn multi_active_time(r: &SimResult) -> f64 {
    let c = slot_counts(r, 0, r.horizon as usize);
    pct(c.slots - c.one - c.zero, c.slots)
}

/// Percent of captured events that missed their deadline.
pub fn unprocessed_capture_pct(r: &SimResult) -> Option<f64> {
    report(r, 0, 0, r.events.iter(), None, false).unprocessed_capture_pct
}

/// Whole-run report.
pub fn compute_metrics(r: &SimResult) -> MetricReport {
    report(r, 0, r.horizon as usize, r.events.iter(), None, false)
}

/// One report per simulated day; a trailing partial day is kept and flagged.
pub fn aggregate_daily(r: &SimResult, slots_per_day: u64) -> Result<Vec<MetricReport>> {
    if slots_per_day == 0 {
        return Err(Error::InvalidArgument("slots_per_day must be at least 1".into()));
    }
    let h = r.horizon;
    let days = h.div_ceil(slots_per_day) as usize;
    let mut buckets: Vec<Vec<&EventRecord>> = vec![Vec::new(); days];
    for e in &r.events {
        let d = (e.event.start_slot / slots_per_day) as usize;
        if d < days {
            buckets[d].push(e);
        }
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(d, evs)| {
            let from = d as u64 * slots_per_day;
            let to = (from + slots_per_day).min(h);
            let partial = to - from < slots_per_day;
            report(r, from as usize, to as usize, evs.into_iter(), Some(d), partial)
        })
        .collect())
}

pub const METRICS_HEADER: [&str; 9] = [
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

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

/// Day column label: 1-based, `*` for a partial day, `total` for the whole run.
pub fn day_label(m: &MetricReport) -> String {
    match m.day {
        Some(d) if m.partial => format!("{}*", d + 1),
        Some(d) => (d + 1).to_string(),
        None => "total".into(),
    }
}

/// The metric cells of a row, in [`METRICS_HEADER`] order after `day`.
pub fn metric_cells(m: &MetricReport) -> [String; 8] {
    [
        opt(m.zeta),
        format_sig9(m.gamma_pct),
        format_sig9(m.idle_pct),
        opt(m.unprocessed_capture_pct),
        m.events.to_string(),
        m.captured.to_string(),
        m.processed.to_string(),
        format_sig9(m.multi_active_pct),
    ]
}

/// `metrics.csv`: one row per day then a `total` row. Undefined values are
/// empty cells; partial days are suffixed `*`.
pub fn write_metrics_csv<W: Write>(w: W, daily: &[MetricReport], total: &MetricReport) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(METRICS_HEADER)?;
    for m in daily.iter().chain(std::iter::once(total)) {
        let mut row = vec![day_label(m)];
        row.extend(metric_cells(m));
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ActivityMatrix;
    use crate::model::Event;
    use proptest::prelude::*;

    fn result(rows: &[Vec<bool>], outcomes: &[(u64, u64, EventOutcome)]) -> SimResult {
        let n = rows.first().map_or(1, |r| r.len());
        let h = rows.len();
        SimResult {
            policy: "test".into(),
            n_nodes: n,
            horizon: h as u64,
            slot_duration: 1.0,
            activity: ActivityMatrix::from_rows(n, rows),
            events: outcomes
                .iter()
                .enumerate()
                .map(|(i, &(start, deadline, outcome))| EventRecord {
                    event: Event {
                        id: i as u32,
                        start_slot: start,
                        duration_slots: 1,
                        deadline_slot: deadline,
                    },
                    outcome,
                    capturing_node: None,
                    processed_by: None,
                })
                .collect(),
            overflow: vec![0.0; h],
            leakage: vec![0.0; h],
            idle_violations: vec![0; h],
            rewards: vec![],
            nodes: vec![],
            energy: None,
        }
    }

    fn rows(h: usize, f: impl Fn(usize) -> Vec<bool>) -> Vec<Vec<bool>> {
        (0..h).map(f).collect()
    }

    #[test]
    fn zeta_examples() {
        use EventOutcome::*;
        let act = rows(20, |_| vec![true]);
        let all = result(&act, &(0..10).map(|i| (i, i + 1, CapturedAndProcessed)).collect::<Vec<_>>());
        assert_eq!(capture_process_success_rate(&all).unwrap(), 1.0);

        let mut mixed: Vec<_> = (0..6).map(|i| (i, i + 1, CapturedAndProcessed)).collect();
        mixed.extend((6..8).map(|i| (i, i + 1, CapturedOnly)));
        mixed.extend((8..10).map(|i| (i, i + 1, Missed)));
        let r = result(&act, &mixed);
        assert!((capture_process_success_rate(&r).unwrap() - 0.6).abs() < 1e-12);
        assert!((unprocessed_capture_pct(&r).unwrap() - 25.0).abs() < 1e-12);

        let none = result(&act, &(0..10).map(|i| (i, i + 1, Missed)).collect::<Vec<_>>());
        assert_eq!(capture_process_success_rate(&none).unwrap(), 0.0);
        assert_eq!(unprocessed_capture_pct(&none), None);
    }

    #[test]
    fn zeta_undefined_without_events() {
        let r = result(&rows(5, |_| vec![false]), &[]);
        assert!(matches!(capture_process_success_rate(&r), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn indeterminate_events_excluded() {
        let r = result(
            &rows(10, |_| vec![true]),
            &[(1, 5, EventOutcome::CapturedAndProcessed), (8, 12, EventOutcome::Missed)],
        );
        let m = compute_metrics(&r);
        assert_eq!(m.events, 1);
        assert_eq!(m.indeterminate, 1);
        assert_eq!(m.zeta, Some(1.0));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(redundant_active_time(&result(&rows(10, |_| vec![true]), &[])), 0.0);
        let r = result(&rows(10, |t| vec![t < 3, (3..6).contains(&t), (3..6).contains(&t)]), &[]);
        assert!((redundant_active_time(&r) - 70.0).abs() < 1e-12);
        let all = result(&rows(10, |_| vec![true, true]), &[]);
        assert_eq!(redundant_active_time(&all), 100.0);
        let partial = result(&rows(4, |t| vec![t % 2 == 0]), &[]);
        assert_eq!(redundant_active_time(&partial), 50.0);
    }

    #[test]
    fn idle_examples() {
        assert_eq!(idle_time(&result(&rows(10, |_| vec![false, false]), &[])), 100.0);
        assert_eq!(idle_time(&result(&rows(10, |_| vec![true, false]), &[])), 0.0);
        assert!((idle_time(&result(&rows(100, |t| vec![t >= 22]), &[])) - 22.0).abs() < 1e-12);
    }

    #[test]
    fn daily_buckets() {
        use EventOutcome::*;
        let r = result(
            &rows(20, |_| vec![true]),
            &[(1, 2, CapturedAndProcessed), (3, 4, Missed), (11, 12, CapturedAndProcessed), (13, 14, Missed)],
        );
        let days = aggregate_daily(&r, 10).unwrap();
        assert_eq!(days.len(), 2);
        let total = compute_metrics(&r).zeta.unwrap();
        assert!(days.iter().all(|d| d.zeta == Some(total) && !d.partial));

        let early = result(&rows(20, |_| vec![true]), &[(1, 2, CapturedAndProcessed)]);
        let days = aggregate_daily(&early, 10).unwrap();
        assert_eq!(days[1].zeta, None);
        assert_eq!(days[1].events, 0);

        let month = result(&rows(30 * 4, |_| vec![false]), &[]);
        assert_eq!(aggregate_daily(&month, 4).unwrap().len(), 30);
        let ragged = aggregate_daily(&result(&rows(25, |_| vec![true]), &[]), 10).unwrap();
        assert_eq!(ragged.len(), 3);
        assert!(ragged[2].partial && ragged[2].slots == 5);
        assert!(aggregate_daily(&month, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = result(&rows(15, |_| vec![true]), &[(1, 2, EventOutcome::CapturedOnly)]);
        let daily = aggregate_daily(&r, 10).unwrap();
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &daily, &compute_metrics(&r)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "day,zeta,gamma_pct,idle_pct,unprocessed_capture_pct,events,captured,processed,multi_active_pct");
        assert_eq!(lines[1], "1,0,0,0,100.000000,1,1,0,0");
        assert!(lines[2].starts_with("2*,,"));
        assert!(lines[3].starts_with("total,"));
    }

    proptest! {
        #[test]
        fn bounded_and_partitioned(
            bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 3), 1..60),
            outs in proptest::collection::vec(0u8..3, 0..20),
        ) {
            let h = bits.len() as u64;
            let evs: Vec<_> = outs.iter().enumerate().map(|(i, &o)| {
                let outcome = [EventOutcome::Missed, EventOutcome::CapturedOnly, EventOutcome::CapturedAndProcessed][o as usize];
                (i as u64 % h, i as u64 % h, outcome)
            }).collect();
            let r = result(&bits, &evs);
            let m = compute_metrics(&r);
            if let Some(z) = m.zeta {
                prop_assert!((0.0..=1.0).contains(&z));
                prop_assert!(z <= m.captured as f64 / m.events as f64 + 1e-12);
            }
            prop_assert!((0.0..=100.0).contains(&m.gamma_pct));
            prop_assert!((0.0..=100.0).contains(&m.idle_pct));
            let one = 100.0 - m.gamma_pct;
            prop_assert!((m.idle_pct + one + m.multi_active_pct - 100.0).abs() < 1e-9);

            let relabeled: Vec<Vec<bool>> = bits.iter().map(|row| row.iter().rev().copied().collect()).collect();
            prop_assert_eq!(redundant_active_time(&result(&relabeled, &evs)), m.gamma_pct);
        }
    }
}

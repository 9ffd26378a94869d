use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Event, NodeMode};

/// Format with nine significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        format!("{:.*}", (8 - mag) as usize, x)
    } else {
        format!("{:.8e}", x)
    }
}

/// Bit matrix of node activity, one row per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityMatrix {
    n_nodes: usize,
    words: usize,
    bits: Vec<u64>,
}

impl ActivityMatrix {
    pub fn new(n_nodes: usize, horizon: usize) -> Self {
        let words = n_nodes.div_ceil(64).max(1);
        Self {
            n_nodes,
            words,
            bits: vec![0; words * horizon],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn horizon(&self) -> usize {
        self.bits.len() / self.words
    }

    #[inline]
    pub fn set_active(&mut self, slot: usize, node: usize) {
        self.bits[slot * self.words + node / 64] |= 1 << (node % 64);
    }

    #[inline]
    pub fn is_active(&self, slot: usize, node: usize) -> bool {
        self.bits[slot * self.words + node / 64] & (1 << (node % 64)) != 0
    }

    pub fn mode(&self, slot: usize, node: usize) -> NodeMode {
        if self.is_active(slot, node) {
            NodeMode::Active
        } else {
            NodeMode::Asleep
        }
    }

    #[inline]
    pub fn active_count(&self, slot: usize) -> u32 {
        self.bits[slot * self.words..(slot + 1) * self.words]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }

    /// Build from explicit rows; mainly for tests.
    pub fn from_rows(n_nodes: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::new(n_nodes, rows.len());
        for (t, row) in rows.iter().enumerate() {
            for (i, &a) in row.iter().enumerate() {
                if a {
                    m.set_active(t, i);
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventOutcome {
    Missed,
    CapturedOnly,
    CapturedAndProcessed,
}

impl EventOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            EventOutcome::Missed => "missed",
            EventOutcome::CapturedOnly => "captured_only",
            EventOutcome::CapturedAndProcessed => "captured_and_processed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "missed" => Some(EventOutcome::Missed),
            "captured_only" => Some(EventOutcome::CapturedOnly),
            "captured_and_processed" => Some(EventOutcome::CapturedAndProcessed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event: Event,
    pub outcome: EventOutcome,
    /// Lowest-id node that captured the event at its start.
    pub capturing_node: Option<usize>,
    pub processed_by: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardEntry {
    pub slot: u64,
    pub node: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeStats {
    pub active_slots: u64,
    pub brownouts: u64,
    pub idle_violations: u64,
    pub captures: u64,
    pub processed: u64,
    pub mid_event_wakes: u64,
    pub reward_sum: f64,
    pub initial_stored: f64,
    pub final_stored: f64,
    /// Efficiency-weighted harvest that entered the store.
    pub harvested: f64,
    pub consumed: f64,
    pub leaked: f64,
    pub overflow: f64,
}

/// Per-node, per-slot energy bookkeeping, recorded on request.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLog {
    pub n_nodes: usize,
    /// Row-major by slot: `[slot * n_nodes + node]`.
    pub stored: Vec<f64>,
    pub harvested: Vec<f64>,
    pub overflow: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub policy: String,
    pub n_nodes: usize,
    pub horizon: u64,
    pub slot_duration: f64,
    pub activity: ActivityMatrix,
    pub events: Vec<EventRecord>,
    /// Energy discarded at the capacity clamp, summed over nodes, per slot.
    pub overflow: Vec<f64>,
    pub leakage: Vec<f64>,
    /// Nodes whose schedule called for a wake they could not fund, per slot.
    pub idle_violations: Vec<u16>,
    pub rewards: Vec<RewardEntry>,
    pub nodes: Vec<NodeStats>,
    pub energy: Option<EnergyLog>,
}

impl SimResult {
    pub fn write_activity_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(w);
        writeln!(out, "slot,node_id,state")?;
        for t in 0..self.horizon as usize {
            for i in 0..self.n_nodes {
                let s = if self.activity.is_active(t, i) { "active" } else { "asleep" };
                writeln!(out, "{t},{i},{s}")?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_events_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(w);
        writeln!(out, "id,start,deadline,outcome,capturing_node")?;
        for r in &self.events {
            let node = r.capturing_node.map(|n| n.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                r.event.id,
                r.event.start_slot,
                r.event.deadline_slot,
                r.outcome.as_str(),
                node
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes only the header when no energy log was recorded.
    pub fn write_energy_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(w);
        writeln!(out, "slot,node_id,stored,harvested,overflow")?;
        if let Some(log) = &self.energy {
            for t in 0..self.horizon as usize {
                for i in 0..log.n_nodes {
                    let k = t * log.n_nodes + i;
                    writeln!(
                        out,
                        "{t},{i},{},{},{}",
                        format_sig9(log.stored[k]),
                        format_sig9(log.harvested[k]),
                        format_sig9(log.overflow[k])
                    )?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9() {
        assert_eq!(format_sig9(26.72), "26.7200000");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(123456789.0), "123456789");
        assert_eq!(format_sig9(1.5e-7), "1.50000000e-7");
        assert_eq!(format_sig9(-2.5), "-2.50000000");
    }

    #[test]
    fn activity_bits() {
        let mut m = ActivityMatrix::new(70, 3);
        m.set_active(1, 0);
        m.set_active(1, 69);
        assert_eq!(m.active_count(1), 2);
        assert_eq!(m.active_count(0), 0);
        assert!(m.is_active(1, 69));
        assert_eq!(m.mode(2, 3), NodeMode::Asleep);
        assert_eq!(m.horizon(), 3);
    }
}

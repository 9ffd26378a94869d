//! Harvestable-energy traces, sporadic event timelines and the task catalog.

mod catalog;
mod csv;
mod events;
mod rf;
mod solar;

use serde::{Deserialize, Serialize};

pub use self::catalog::{CatalogEntry, TaskCatalog, TASK_NAMES};
pub use self::csv::{load_trace_csv, read_trace_csv, write_trace_csv};
pub use self::events::{gen_events, EventGenParams, EventTimeline};
pub use self::rf::{gen_rf_trace, received_dbm, robot_trajectory, PathLoss, RfParams, RobotPath, TrajectoryPoint};
pub use self::solar::{gen_solar_trace, SolarParams, SOLAR_CEILING_MW};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    ConstantPerNode,
    VariableOverTime,
}

#[derive(Debug, Clone, PartialEq)]
enum Samples {
    Constant { value: f64, len: usize },
    Series(Vec<f64>),
}

/// Per-slot harvestable energy for one node, in millijoules.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub node_id: usize,
    samples: Samples,
    pub regime: Regime,
}

impl EnergyTrace {
    /// A trace with the same value in every slot.
    pub fn constant(node_id: usize, mj_per_slot: f64, len: usize) -> Self {
        Self {
            node_id,
            samples: Samples::Constant {
                value: mj_per_slot.max(0.0),
                len,
            },
            regime: Regime::ConstantPerNode,
        }
    }

    /// Wrap recorded or generated samples; the regime is inferred from their
    /// variance.
    pub fn from_samples(node_id: usize, samples: Vec<f64>) -> Self {
        let regime = if zero_variance(&samples) {
            Regime::ConstantPerNode
        } else {
            Regime::VariableOverTime
        };
        Self {
            node_id,
            samples: Samples::Series(samples),
            regime,
        }
    }

    pub fn len(&self) -> usize {
        match &self.samples {
            Samples::Constant { len, .. } => *len,
            Samples::Series(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn at(&self, slot: usize) -> f64 {
        match &self.samples {
            Samples::Constant { value, .. } => *value,
            Samples::Series(v) => v[slot],
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|t| self.at(t)).collect()
    }

    pub fn mean(&self) -> f64 {
        self.mean_over(0, self.len())
    }

    pub fn mean_over(&self, from: usize, to: usize) -> f64 {
        let to = to.min(self.len());
        if to <= from {
            return 0.0;
        }
        match &self.samples {
            Samples::Constant { value, .. } => *value,
            Samples::Series(v) => v[from..to].iter().sum::<f64>() / (to - from) as f64,
        }
    }

    pub fn max(&self) -> f64 {
        match &self.samples {
            Samples::Constant { value, .. } => *value,
            Samples::Series(v) => v.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.samples {
            Samples::Constant { .. } => 0.0,
            Samples::Series(v) => {
                if v.is_empty() {
                    return 0.0;
                }
                let m = self.mean();
                v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
            }
        }
    }
}

fn zero_variance(samples: &[f64]) -> bool {
    samples
        .first()
        .is_none_or(|&first| samples.iter().all(|&x| x == first))
}

/// Substream purposes derived from a scenario's master seed.
pub const STREAM_TRACES: u64 = 1;
pub const STREAM_EVENTS: u64 = 2;
pub const STREAM_DRIFT: u64 = 3;
pub const STREAM_POLICY: u64 = 4;

/// Split a master seed into an independent per-purpose stream seed.
pub fn substream(seed: u64, purpose: u64, index: u64) -> u64 {
    let mut z = seed
        ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

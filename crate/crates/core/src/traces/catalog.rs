use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TaskSpec;

const DEFAULT_CATALOG: &str = include_str!("../../data/tasks.toml");

/// The fifteen workloads a swarm may run.
pub const TASK_NAMES: [&str; 15] = [
    "RSA encryption",
    "signal processing-based speaker detection",
    "KNN-based audio classification",
    "DNN-based audio classification",
    "DNN-based keyword spotting",
    "DNN-based image classification",
    "Decision Tree based image classification",
    "temperature anomaly detection with local outlier factor (LOF)",
    "signal processing-based shape detection",
    "activity recognition",
    "cuckoo filtering",
    "blowfish encryption",
    "bit count",
    "DNN-based visual wake word",
    "DNN-based image recognition",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    pub runtime_s: f64,
    pub energy_mj: f64,
    pub sensing_energy_mj: f64,
    pub illustrative: bool,
}

impl CatalogEntry {
    /// Express this entry on a slot grid: runtime rounds up to whole slots and
    /// the energy spreads evenly over them.
    pub fn to_task(&self, slot_duration: f64) -> Result<TaskSpec> {
        if !(slot_duration > 0.0) {
            return Err(Error::InvalidArgument("slot duration must be positive".into()));
        }
        let slots = (self.runtime_s / slot_duration).ceil().max(1.0) as u32;
        TaskSpec::new(
            self.name.clone(),
            slots,
            self.energy_mj / slots as f64,
            self.sensing_energy_mj,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskCatalog {
    #[serde(rename = "task")]
    pub entries: Vec<CatalogEntry>,
}

impl TaskCatalog {
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CATALOG).expect("bundled task catalog is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let catalog: TaskCatalog =
            toml::from_str(text).map_err(|e| Error::Config(format!("task catalog: {e}")))?;
        for name in TASK_NAMES {
            if !catalog.entries.iter().any(|e| e.name == name) {
                return Err(Error::Config(format!("task catalog is missing '{name}'")));
            }
        }
        if catalog.entries.len() != TASK_NAMES.len() {
            return Err(Error::Config(format!(
                "task catalog must list exactly {} tasks, found {}",
                TASK_NAMES.len(),
                catalog.entries.len()
            )));
        }
        Ok(catalog)
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    /// Per-slot energy of the cheapest task on this slot grid; the default
    /// quantization unit.
    pub fn default_unit_energy(&self, slot_duration: f64) -> Result<f64> {
        let mut best = f64::INFINITY;
        for e in &self.entries {
            best = best.min(e.to_task(slot_duration)?.energy_per_slot);
        }
        Ok(best)
    }
}

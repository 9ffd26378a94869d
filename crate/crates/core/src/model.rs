//! Shared domain types: the slot time base, tasks and events.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position on the discrete time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotTime {
    pub index: u64,
    /// Seconds per slot; fixed for the lifetime of a scenario.
    pub slot_duration: f64,
}

impl SlotTime {
    pub fn new(index: u64, slot_duration: f64) -> Result<Self> {
        if !(slot_duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "slot duration must be positive, got {slot_duration}"
            )));
        }
        Ok(Self {
            index,
            slot_duration,
        })
    }

    pub fn seconds(&self) -> f64 {
        self.index as f64 * self.slot_duration
    }

    pub fn next(self) -> Self {
        Self {
            index: self.index + 1,
            ..self
        }
    }
}

/// The processing pipeline every node runs on a captured event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    /// Execution slots needed to finish one job.
    pub runtime_slots: u32,
    /// Energy drawn by each execution slot, mJ.
    pub energy_per_slot: f64,
    /// One-time sensing cost paid at capture, mJ.
    pub sensing_energy: f64,
}

impl TaskSpec {
    pub fn new(
        name: impl Into<String>,
        runtime_slots: u32,
        energy_per_slot: f64,
        sensing_energy: f64,
    ) -> Result<Self> {
        let task = Self {
            name: name.into(),
            runtime_slots,
            energy_per_slot,
            sensing_energy,
        };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runtime_slots < 1 {
            return Err(Error::InvalidArgument(format!(
                "task {} needs at least one runtime slot",
                self.name
            )));
        }
        if !(self.energy_per_slot > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "task {} energy per slot must be positive",
                self.name
            )));
        }
        if !(self.sensing_energy >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "task {} sensing energy must be non-negative",
                self.name
            )));
        }
        Ok(())
    }

    /// Energy of one complete activation: sensing plus every execution slot.
    pub fn activation_energy(&self) -> f64 {
        self.sensing_energy + self.energy_per_slot * self.runtime_slots as f64
    }
}

/// A sporadic event on the shared timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: u32,
    pub start_slot: u64,
    pub duration_slots: u32,
    /// Last slot at which processing may still finish.
    pub deadline_slot: u64,
}

impl Event {
    pub fn end_slot(&self) -> u64 {
        self.start_slot + self.duration_slots as u64
    }

    /// True while the event is ongoing but already past its first slot.
    pub fn is_mid(&self, slot: u64) -> bool {
        slot > self.start_slot && slot < self.end_slot()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeMode {
    Asleep,
    Active,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_energy_sums_parts() {
        let t = TaskSpec::new("dnn", 2, 10.0, 3.0).unwrap();
        assert_eq!(t.activation_energy(), 23.0);
    }

    #[test]
    fn task_rejects_zero_runtime() {
        assert!(TaskSpec::new("x", 0, 1.0, 0.0).is_err());
        assert!(TaskSpec::new("x", 1, 0.0, 0.0).is_err());
    }

    #[test]
    fn slot_time_advances_by_one() {
        let t = SlotTime::new(4, 5.0).unwrap();
        assert_eq!(t.next().index, 5);
        assert_eq!(t.seconds(), 20.0);
        assert!(SlotTime::new(0, 0.0).is_err());
    }

    #[test]
    fn mid_event_window() {
        let e = Event {
            id: 0,
            start_slot: 10,
            duration_slots: 3,
            deadline_slot: 15,
        };
        assert!(!e.is_mid(10));
        assert!(e.is_mid(11));
        assert!(e.is_mid(12));
        assert!(!e.is_mid(13));
    }
}

use rand::Rng;

use crate::error::{Error, Result};

/// Search bounds over the ascending cycle list, and the current pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RbsMemory {
    pub lo: usize,
    pub hi: usize,
    pub chosen: usize,
    pub len: usize,
}

impl RbsMemory {
    pub fn new(len: usize, chosen: usize) -> Self {
        Self {
            lo: 0,
            hi: len.saturating_sub(1),
            chosen,
            len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbsTrigger {
    /// The harvest rate moved past the configured relative threshold; the
    /// search restarts over the full list.
    EnergyChange,
    /// The chosen cycle could not be sustained; search longer cycles.
    Infeasible,
    /// The capacitor overflowed; search shorter cycles.
    Overflow,
}

/// Narrow or restart the range, then draw a new index uniformly from it.
pub fn rbs_transition<R: Rng + ?Sized>(mem: &mut RbsMemory, trigger: RbsTrigger, rng: &mut R) -> Result<usize> {
    if mem.len == 0 {
        return Err(Error::InvalidArgument("RBS over an empty cycle list".into()));
    }
    let full = mem.len - 1;
    let (lo, hi) = match trigger {
        RbsTrigger::EnergyChange => (mem.lo, mem.hi as isize),
        RbsTrigger::Infeasible => (mem.chosen + 1, mem.hi as isize),
        RbsTrigger::Overflow => (mem.lo, mem.chosen as isize - 1),
    };
    if hi < lo as isize || hi as usize > full {
        mem.lo = 0;
        mem.hi = full;
    } else {
        mem.lo = lo;
        mem.hi = hi as usize;
    }
    mem.chosen = rng.random_range(mem.lo..=mem.hi);
    Ok(mem.chosen)
}

/// Per-node RBS controller: watches the harvest rate over each completed
/// cycle and feeds the search with energy-change, infeasibility and overflow
/// signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbs {
    pub mem: RbsMemory,
    pub threshold: f64,
    reference: Option<f64>,
    harvest_sum: f64,
    slots: u64,
    infeasible: bool,
    overflow: bool,
}

impl Rbs {
    pub fn new(len: usize, start: usize, threshold: f64) -> Self {
        Self {
            mem: RbsMemory::new(len, start),
            threshold,
            reference: None,
            harvest_sum: 0.0,
            slots: 0,
            infeasible: false,
            overflow: false,
        }
    }

    pub fn chosen(&self) -> usize {
        self.mem.chosen
    }

    pub fn observe(&mut self, harvest: f64, infeasible: bool, overflow: bool) {
        self.harvest_sum += harvest;
        self.slots += 1;
        self.infeasible |= infeasible;
        self.overflow |= overflow;
    }

    /// Close the current cycle and possibly move to a new one.
    pub fn end_cycle<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let rate = if self.slots == 0 { 0.0 } else { self.harvest_sum / self.slots as f64 };
        let changed = match self.reference {
            None => {
                self.reference = Some(rate);
                false
            }
            Some(r) => {
                let moved = if r > 0.0 { (rate - r).abs() / r > self.threshold } else { rate > 0.0 };
                if moved {
                    self.reference = Some(rate);
                }
                moved
            }
        };
        let last = self.mem.len - 1;
        let trigger = if changed {
            Some(RbsTrigger::EnergyChange)
        } else if self.infeasible && self.mem.chosen < last {
            Some(RbsTrigger::Infeasible)
        } else if self.overflow && !self.infeasible && self.mem.chosen > 0 {
            Some(RbsTrigger::Overflow)
        } else {
            None
        };
        if let Some(t) = trigger {
            rbs_transition(&mut self.mem, t, rng).expect("non-empty cycle list");
        }
        self.harvest_sum = 0.0;
        self.slots = 0;
        self.infeasible = false;
        self.overflow = false;
        self.mem.chosen
    }
}

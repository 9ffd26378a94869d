//! Energy quantization and the capacitor storage model.
//!
//! Stored energy is tracked as real-valued millijoules. Quantized
//! [`EnergyLevel`]s only appear where a policy reasons about discrete levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest and largest capacitance accepted for an energy buffer, in farads.
pub const MIN_CAPACITANCE_F: f64 = 2.2e-9;
pub const MAX_CAPACITANCE_F: f64 = 1.0;

/// Default maximum capacitor voltage (typical MSP430 rail).
pub const DEFAULT_V_MAX: f64 = 3.3;

/// Relative slack tolerated before a consumption request counts as underflow.
const UNDERFLOW_EPS: f64 = 1e-9;

/// Harvestable energy expressed as a whole number of unit-energy quanta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub level: u64,
    pub unit_energy: f64,
}

impl EnergyLevel {
    pub fn millijoules(&self) -> f64 {
        self.level as f64 * self.unit_energy
    }
}

/// Quantize `raw` millijoules into whole multiples of `unit`. The fractional
/// remainder is dropped.
pub fn quantize_energy(raw: f64, unit: f64) -> Result<EnergyLevel> {
    if !(unit > 0.0) || !unit.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "unit energy must be positive, got {unit}"
        )));
    }
    if !(raw >= 0.0) || !raw.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "raw energy must be non-negative, got {raw}"
        )));
    }
    let ratio = raw / unit;
    // Exact multiples like 3 * 0.1 / 0.1 can land a hair below the integer.
    let nearest = ratio.round();
    let level = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    Ok(EnergyLevel {
        level: level as u64,
        unit_energy: unit,
    })
}

/// Bookkeeping for a single [`CapacitorBank::step`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    /// Energy that entered the bank after efficiency losses.
    pub harvested: f64,
    pub consumed: f64,
    pub leaked: f64,
    /// Energy discarded at the capacity clamp.
    pub overflow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitorBank {
    /// Maximum storable energy in millijoules.
    pub capacity: f64,
    /// Currently stored energy in millijoules.
    pub stored: f64,
    pub charge_efficiency: f64,
    /// Fraction of stored energy lost per slot.
    pub leakage_rate: f64,
    /// Nominal capacitance in farads. Informational only.
    pub capacitance_f: f64,
}

impl CapacitorBank {
    pub fn new(capacity: f64, charge_efficiency: f64, leakage_rate: f64) -> Result<Self> {
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        if !(charge_efficiency > 0.0 && charge_efficiency <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "charge efficiency must lie in (0, 1], got {charge_efficiency}"
            )));
        }
        if !(0.0..1.0).contains(&leakage_rate) {
            return Err(Error::InvalidArgument(format!(
                "leakage rate must lie in [0, 1), got {leakage_rate}"
            )));
        }
        Ok(Self {
            capacity,
            stored: 0.0,
            charge_efficiency,
            leakage_rate,
            capacitance_f: 2.0 * capacity * 1e-3 / (DEFAULT_V_MAX * DEFAULT_V_MAX),
        })
    }

    /// Build a bank whose capacity is `0.5 * C * V_max^2`, converted to mJ.
    pub fn from_capacitance(
        capacitance_f: f64,
        v_max: f64,
        charge_efficiency: f64,
        leakage_rate: f64,
    ) -> Result<Self> {
        if !(MIN_CAPACITANCE_F..=MAX_CAPACITANCE_F).contains(&capacitance_f) {
            return Err(Error::InvalidArgument(format!(
                "capacitance {capacitance_f} F outside [{MIN_CAPACITANCE_F}, {MAX_CAPACITANCE_F}]"
            )));
        }
        if !(v_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "v_max must be positive, got {v_max}"
            )));
        }
        let capacity = 0.5 * capacitance_f * v_max * v_max * 1e3;
        let mut bank = Self::new(capacity, charge_efficiency, leakage_rate)?;
        bank.capacitance_f = capacitance_f;
        Ok(bank)
    }

    pub fn with_stored(mut self, stored: f64) -> Self {
        self.stored = stored.clamp(0.0, self.capacity);
        self
    }

    /// Energy that can be spent this slot: leaked store plus efficient harvest,
    /// before the capacity clamp.
    #[inline]
    pub fn available(&self, harvested: f64) -> f64 {
        self.stored * (1.0 - self.leakage_rate) + self.charge_efficiency * harvested
    }

    /// Advance one slot in place. Leakage is applied before harvest.
    #[inline]
    pub fn apply(&mut self, harvested: f64, consumed: f64) -> Result<StepReport> {
        if !(harvested >= 0.0) || !(consumed >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "harvested ({harvested}) and consumed ({consumed}) must be non-negative"
            )));
        }
        let leaked = self.stored * self.leakage_rate;
        let gained = self.charge_efficiency * harvested;
        let available = self.stored - leaked + gained;
        if consumed > available + UNDERFLOW_EPS * available.max(1.0) {
            return Err(Error::Underflow {
                requested: consumed,
                available,
            });
        }
        let remaining = (available - consumed).max(0.0);
        let overflow = (remaining - self.capacity).max(0.0);
        self.stored = remaining.min(self.capacity);
        Ok(StepReport {
            harvested: gained,
            consumed,
            leaked,
            overflow,
        })
    }

    /// Pure form of [`CapacitorBank::apply`].
    pub fn step(&self, harvested: f64, consumed: f64) -> Result<(CapacitorBank, StepReport)> {
        let mut next = self.clone();
        let report = next.apply(harvested, consumed)?;
        Ok((next, report))
    }
}

/// One slot of capacitor dynamics; see [`CapacitorBank::apply`].
pub fn capacitor_step(
    bank: &CapacitorBank,
    harvested: f64,
    consumed: f64,
) -> Result<(CapacitorBank, StepReport)> {
    bank.step(harvested, consumed)
}

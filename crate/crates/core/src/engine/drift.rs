use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SMALL_CAP_F: f64 = 2.2e-9;
const LARGE_CAP_F: f64 = 2.2e-6;
const SMALL_CAP_ERR_S: f64 = 1e-3;
const LARGE_CAP_ERR_S: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftParams {
    pub enabled: bool,
    /// Interval over which the timekeeping error bound accrues, seconds.
    pub reference_interval_s: f64,
    /// Explicit error bound per reference interval, seconds. `None` derives
    /// it from the capacitance.
    pub bound_s: Option<f64>,
    /// Mean time between counter-drift corrections, seconds. `None` never
    /// corrects.
    pub counter_drift_mean_s: Option<f64>,
}

impl Default for DriftParams {
    fn default() -> Self {
        Self {
            enabled: true,
            reference_interval_s: 3600.0,
            bound_s: None,
            counter_drift_mean_s: Some(3600.0),
        }
    }
}

impl DriftParams {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_interval_s > 0.0) {
            return Err(Error::Config("drift reference interval must be positive".into()));
        }
        if matches!(self.bound_s, Some(b) if !(b >= 0.0)) {
            return Err(Error::Config("drift bound must be non-negative".into()));
        }
        if matches!(self.counter_drift_mean_s, Some(m) if !(m > 0.0)) {
            return Err(Error::Config("counter-drift interval must be positive".into()));
        }
        Ok(())
    }
}

/// Timekeeping error bound in seconds per reference interval, log-linear in
/// capacitance from 1 ms at 2.2 nF to 1 s at 2200 nF and clamped beyond.
pub fn drift_bound_s(capacitance_f: f64) -> f64 {
    let c = capacitance_f.clamp(SMALL_CAP_F, LARGE_CAP_F);
    let frac = (c / SMALL_CAP_F).ln() / (LARGE_CAP_F / SMALL_CAP_F).ln();
    (SMALL_CAP_ERR_S.ln() + frac * (LARGE_CAP_ERR_S.ln() - SMALL_CAP_ERR_S.ln())).exp()
}

/// One node's clock: a constant rate error plus randomly timed corrections
/// that zero the accumulated offset.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    /// Drift in slots per slot (equivalently seconds per second).
    pub rate: f64,
    last_reset: u64,
    next_reset: u64,
    mean_interval_slots: f64,
    rng: ChaCha8Rng,
    /// Rounded offset, valid for true slots below `shift_until`.
    shift: i64,
    shift_until: u64,
}

impl DriftModel {
    pub fn none() -> Self {
        Self::with_rate(0.0, None, 0)
    }

    pub fn with_rate(rate: f64, mean_interval_slots: Option<f64>, seed: u64) -> Self {
        let mut m = Self {
            rate,
            last_reset: 0,
            next_reset: u64::MAX,
            mean_interval_slots: mean_interval_slots.unwrap_or(f64::INFINITY),
            rng: ChaCha8Rng::seed_from_u64(seed),
            shift: 0,
            shift_until: 0,
        };
        m.next_reset = m.draw_gap();
        m
    }

    /// Draw a node's rate uniformly within the bound for its capacitance.
    pub fn sample(params: &DriftParams, capacitance_f: f64, slot_duration: f64, seed: u64) -> Self {
        if !params.enabled {
            return Self::none();
        }
        let bound = params.bound_s.unwrap_or_else(|| drift_bound_s(capacitance_f));
        let max_rate = bound / params.reference_interval_s;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rate = if max_rate > 0.0 { rng.random_range(-max_rate..=max_rate) } else { 0.0 };
        let mean = params.counter_drift_mean_s.map(|s| s / slot_duration);
        Self::with_rate(rate, mean, rng.random())
    }

    fn draw_gap(&mut self) -> u64 {
        if !self.mean_interval_slots.is_finite() {
            return u64::MAX;
        }
        let u: f64 = self.rng.random::<f64>().max(f64::MIN_POSITIVE);
        (-u.ln() * self.mean_interval_slots).ceil().max(1.0) as u64
    }

    /// Insert a correction at `slot`; used to pin schedules in tests.
    pub fn correct_at(&mut self, slot: u64) {
        self.next_reset = slot;
        self.shift_until = 0;
    }

    /// Accumulated offset in slots at `true_slot`, after applying any
    /// correction that has fallen due. Must be called with non-decreasing
    /// slots.
    #[inline]
    pub fn offset_slots(&mut self, true_slot: u64) -> f64 {
        while true_slot >= self.next_reset {
            self.last_reset = self.next_reset;
            let gap = self.draw_gap();
            self.next_reset = self.last_reset.saturating_add(gap);
        }
        self.rate * (true_slot - self.last_reset) as f64
    }
}

/// The node's local slot index at `true_slot`.
#[inline]
pub fn drifted_slot(drift: &mut DriftModel, true_slot: u64) -> u64 {
    if drift.rate == 0.0 {
        return true_slot;
    }
    if true_slot >= drift.shift_until {
        refresh_shift(drift, true_slot);
    }
    true_slot.saturating_add_signed(drift.shift)
}

// Half away from zero, without a libm call.
#[inline]
fn round_offset(rate: f64, elapsed: u64) -> i64 {
    let o = rate * elapsed as f64;
    if o >= 0.0 {
        (o + 0.5) as i64
    } else {
        (o - 0.5) as i64
    }
}

/// Recompute the rounded offset at `t` and find the first later slot where
/// it changes or a correction falls due.
#[cold]
fn refresh_shift(d: &mut DriftModel, t: u64) {
    d.offset_slots(t);
    let elapsed = t - d.last_reset;
    let k = round_offset(d.rate, elapsed);
    let guess = ((k.unsigned_abs() as f64 + 0.5) / d.rate.abs()).ceil();
    let mut end = if guess.is_finite() && guess < 1e18 { (guess as u64).max(elapsed + 1) } else { u64::MAX / 2 };
    while end > elapsed + 1 && round_offset(d.rate, end - 1) != k {
        end -= 1;
    }
    while end < u64::MAX / 2 && round_offset(d.rate, end) == k {
        end += 1;
    }
    d.shift = k;
    d.shift_until = d.last_reset.saturating_add(end).min(d.next_reset);
}

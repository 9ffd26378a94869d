use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::EnergyTrace;
use crate::error::{Error, Result};

/// Highest harvested power the solar model will emit.
pub const SOLAR_CEILING_MW: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolarParams {
    pub mean_mw: f64,
    /// Relative amplitude of the smooth noise, in [0, 1].
    pub variability: f64,
    /// AR(1) coefficient of the low-pass noise; closer to 1 is smoother.
    pub smoothing: f64,
    /// Probability per slot that an occlusion starts.
    pub occlusion_rate: f64,
    pub occlusion_mean_slots: f64,
    /// Fraction of power left during an occlusion.
    pub occlusion_depth: f64,
}

impl Default for SolarParams {
    fn default() -> Self {
        Self {
            mean_mw: 50.0,
            variability: 0.3,
            smoothing: 0.995,
            occlusion_rate: 0.0,
            occlusion_mean_slots: 20.0,
            occlusion_depth: 0.02,
        }
    }
}

/// Solar harvest with low-pass filtered Gaussian fluctuation and optional
/// shadowing dropouts. Output is mJ per slot.
pub fn gen_solar_trace(
    node_id: usize,
    params: &SolarParams,
    horizon: usize,
    slot_duration: f64,
    seed: u64,
) -> Result<EnergyTrace> {
    if !(params.mean_mw >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "solar mean power must be non-negative, got {}",
            params.mean_mw
        )));
    }
    if !(0.0..=1.0).contains(&params.variability) {
        return Err(Error::InvalidArgument(format!(
            "solar variability must lie in [0, 1], got {}",
            params.variability
        )));
    }
    if !(0.0..1.0).contains(&params.smoothing) {
        return Err(Error::InvalidArgument(format!(
            "solar smoothing must lie in [0, 1), got {}",
            params.smoothing
        )));
    }
    let mean = params.mean_mw.min(SOLAR_CEILING_MW);
    if params.variability == 0.0 && params.occlusion_rate <= 0.0 {
        let v = mean * slot_duration;
        return Ok(EnergyTrace::from_samples(node_id, vec![v; horizon]));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = params.smoothing;
    let innovation = (1.0 - a * a).sqrt();
    let mut noise: f64 = rng.sample(StandardNormal);
    let mut occluded_for = 0u64;
    let mut samples = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let z: f64 = rng.sample(StandardNormal);
        noise = a * noise + innovation * z;
        let mut mw = (mean * (1.0 + params.variability * noise)).clamp(0.0, SOLAR_CEILING_MW);
        if occluded_for == 0 && params.occlusion_rate > 0.0 && rng.random::<f64>() < params.occlusion_rate {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            occluded_for = (-u.ln() * params.occlusion_mean_slots).ceil().max(1.0) as u64;
        }
        if occluded_for > 0 {
            mw *= params.occlusion_depth;
            occluded_for -= 1;
        }
        samples.push(mw * slot_duration);
    }
    Ok(EnergyTrace::from_samples(node_id, samples))
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::EnergyTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryPoint {
    pub slot: u64,
    pub distance_m: f64,
    pub line_of_sight: bool,
}

/// Log-distance path-loss parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathLoss {
    pub exponent: f64,
    pub reference_m: f64,
    pub loss_at_reference_db: f64,
    /// Extra loss while the line of sight is blocked.
    pub obstruction_db: f64,
}

impl Default for PathLoss {
    fn default() -> Self {
        Self {
            exponent: 2.0,
            reference_m: 1.0,
            loss_at_reference_db: 31.7,
            obstruction_db: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RfParams {
    pub tx_power_mw: f64,
    pub path_loss: PathLoss,
    /// Standard deviation of log-normal fading, dB. Draws are clipped at 3σ.
    pub fading_sigma_db: f64,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            tx_power_mw: 3000.0,
            path_loss: PathLoss::default(),
            fading_sigma_db: 0.5,
        }
    }
}

/// A transmitter carried by a robot that roams between random waypoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotPath {
    pub distance_range_m: [f64; 2],
    /// Travel time between consecutive waypoints, slots.
    pub leg_slots: [u64; 2],
    /// Chance that a leg has a clear line of sight.
    pub line_of_sight_probability: f64,
}

impl Default for RobotPath {
    fn default() -> Self {
        Self {
            distance_range_m: [1.0, 6.0],
            leg_slots: [60, 720],
            line_of_sight_probability: 0.7,
        }
    }
}

/// Random-waypoint trajectory covering `[0, horizon)`.
pub fn robot_trajectory(path: &RobotPath, horizon: u64, seed: u64) -> Result<Vec<TrajectoryPoint>> {
    let [dmin, dmax] = path.distance_range_m;
    let [lmin, lmax] = path.leg_slots;
    if !(dmin > 0.0 && dmin <= dmax) || lmin < 1 || lmin > lmax {
        return Err(Error::InvalidArgument(format!(
            "robot path needs 0 < distance_min <= distance_max and 1 <= leg_min <= leg_max, got {:?} and {:?}",
            path.distance_range_m, path.leg_slots
        )));
    }
    if !(0.0..=1.0).contains(&path.line_of_sight_probability) {
        return Err(Error::InvalidArgument("line-of-sight probability must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut slot = 0;
    loop {
        points.push(TrajectoryPoint {
            slot,
            distance_m: rng.random_range(dmin..=dmax),
            line_of_sight: rng.random_bool(path.line_of_sight_probability),
        });
        if slot >= horizon {
            return Ok(points);
        }
        slot += rng.random_range(lmin..=lmax);
    }
}

/// Received power in dBm at `distance_m` before fading.
pub fn received_dbm(tx_power_mw: f64, pl: &PathLoss, distance_m: f64, line_of_sight: bool) -> f64 {
    let tx_dbm = 10.0 * tx_power_mw.log10();
    let mut rx = tx_dbm - pl.loss_at_reference_db - 10.0 * pl.exponent * (distance_m / pl.reference_m).log10();
    if !line_of_sight {
        rx -= pl.obstruction_db;
    }
    rx
}

fn validate(params: &RfParams, trajectory: &[TrajectoryPoint]) -> Result<()> {
    if trajectory.is_empty() {
        return Err(Error::InvalidArgument("RF trajectory is empty".into()));
    }
    if trajectory.iter().any(|p| !(p.distance_m > 0.0)) {
        return Err(Error::InvalidArgument("RF distances must be positive".into()));
    }
    if trajectory.windows(2).any(|w| w[1].slot <= w[0].slot) {
        return Err(Error::InvalidArgument(
            "RF trajectory slots must be strictly increasing".into(),
        ));
    }
    let n = params.path_loss.exponent;
    if !(1.6..=6.0).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "path-loss exponent {n} outside [1.6, 6]"
        )));
    }
    if !(params.tx_power_mw > 0.0) || !(params.path_loss.reference_m > 0.0) {
        return Err(Error::InvalidArgument(
            "transmit power and reference distance must be positive".into(),
        ));
    }
    if !(params.fading_sigma_db >= 0.0) {
        return Err(Error::InvalidArgument("fading sigma must be non-negative".into()));
    }
    Ok(())
}

/// Interpolated `(distance, line_of_sight)` at `slot`. Line of sight follows
/// the most recent trajectory point.
fn position_at(trajectory: &[TrajectoryPoint], slot: u64) -> (f64, bool) {
    let next = trajectory.partition_point(|p| p.slot <= slot);
    if next == 0 {
        let p = trajectory[0];
        return (p.distance_m, p.line_of_sight);
    }
    let prev = trajectory[next - 1];
    match trajectory.get(next) {
        None => (prev.distance_m, prev.line_of_sight),
        Some(after) => {
            let frac = (slot - prev.slot) as f64 / (after.slot - prev.slot) as f64;
            (
                prev.distance_m + frac * (after.distance_m - prev.distance_m),
                prev.line_of_sight,
            )
        }
    }
}

/// RF harvest along a receiver-to-transmitter trajectory, mJ per slot.
pub fn gen_rf_trace(
    node_id: usize,
    params: &RfParams,
    trajectory: &[TrajectoryPoint],
    horizon: usize,
    slot_duration: f64,
    seed: u64,
) -> Result<EnergyTrace> {
    validate(params, trajectory)?;
    let sigma = params.fading_sigma_db;
    let fading = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(horizon);
    for slot in 0..horizon as u64 {
        let (d, los) = position_at(trajectory, slot);
        let mut dbm = received_dbm(params.tx_power_mw, &params.path_loss, d, los);
        if sigma > 0.0 {
            dbm += fading.sample(&mut rng).clamp(-3.0 * sigma, 3.0 * sigma);
        }
        let mw = 10f64.powf(dbm / 10.0);
        samples.push((mw * slot_duration).max(0.0));
    }
    Ok(EnergyTrace::from_samples(node_id, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn still(d: f64, los: bool) -> Vec<TrajectoryPoint> {
        vec![TrajectoryPoint {
            slot: 0,
            distance_m: d,
            line_of_sight: los,
        }]
    }

    fn quiet(tx: f64) -> RfParams {
        RfParams {
            tx_power_mw: tx,
            fading_sigma_db: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn reference_distance_gives_tx_minus_reference_loss() {
        let p = quiet(1000.0);
        let t = gen_rf_trace(0, &p, &still(1.0, true), 5, 1.0, 0).unwrap();
        let expected_dbm = 30.0 - p.path_loss.loss_at_reference_db;
        let expected = 10f64.powf(expected_dbm / 10.0);
        assert!(t.to_vec().iter().all(|&x| (x - expected).abs() < 1e-9));
    }

    #[test]
    fn doubling_distance_costs_six_db() {
        let pl = PathLoss::default();
        let near = received_dbm(1000.0, &pl, 3.0, true);
        let far = received_dbm(1000.0, &pl, 6.0, true);
        assert!((near - far - 6.0206).abs() < 1e-3);
    }

    #[test]
    fn obstruction_subtracts_loss() {
        let pl = PathLoss::default();
        let los = received_dbm(1000.0, &pl, 3.0, true);
        let blocked = received_dbm(1000.0, &pl, 3.0, false);
        assert!((los - blocked - pl.obstruction_db).abs() < 1e-12);
    }

    #[test]
    fn powercast_band_calibration() {
        // 3 W transmitter with 16.5 dB reference loss lands near 67 mW.
        let p = RfParams {
            tx_power_mw: 3000.0,
            fading_sigma_db: 0.2,
            path_loss: PathLoss {
                loss_at_reference_db: 16.5,
                ..Default::default()
            },
        };
        let t = gen_rf_trace(0, &p, &still(1.0, true), 20_000, 1.0, 5).unwrap();
        assert!(t.to_vec().iter().all(|&mw| (58.0..=80.0).contains(&mw)), "band violated");
    }

    #[test]
    fn interpolates_between_points() {
        let traj = vec![
            TrajectoryPoint { slot: 0, distance_m: 1.0, line_of_sight: true },
            TrajectoryPoint { slot: 10, distance_m: 3.0, line_of_sight: true },
        ];
        assert_eq!(position_at(&traj, 5).0, 2.0);
        assert_eq!(position_at(&traj, 20).0, 3.0);
    }

    #[test]
    fn monotone_in_distance() {
        let pl = PathLoss::default();
        let mut last = f64::INFINITY;
        for i in 1..200 {
            let rx = received_dbm(500.0, &pl, i as f64 * 0.25, true);
            assert!(rx <= last);
            last = rx;
        }
    }

    #[test]
    fn robot_path_spans_horizon_within_range() {
        let path = RobotPath::default();
        let t = robot_trajectory(&path, 5000, 9).unwrap();
        assert_eq!(t[0].slot, 0);
        assert!(t.last().unwrap().slot >= 5000);
        assert!(t.windows(2).all(|w| w[1].slot > w[0].slot));
        assert!(t.iter().all(|p| (1.0..=6.0).contains(&p.distance_m)));
        assert_eq!(t, robot_trajectory(&path, 5000, 9).unwrap());
        let bad = RobotPath {
            leg_slots: [0, 3],
            ..path
        };
        assert!(robot_trajectory(&bad, 10, 0).is_err());
    }

    #[test]
    fn errors() {
        assert!(gen_rf_trace(0, &quiet(1.0), &[], 5, 1.0, 0).is_err());
        assert!(gen_rf_trace(0, &quiet(1.0), &still(0.0, true), 5, 1.0, 0).is_err());
        let mut p = quiet(1.0);
        p.path_loss.exponent = 7.0;
        assert!(gen_rf_trace(0, &p, &still(1.0, true), 5, 1.0, 0).is_err());
    }
}

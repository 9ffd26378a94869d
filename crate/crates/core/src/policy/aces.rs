use rand::Rng;

use super::qtable::{epsilon_greedy, QTable};
use super::{Decision, EnergyBuckets, LearningParams};
use crate::error::{Error, Result};

/// Candidate duty-cycle periods in seconds.
pub const ACES_PERIODS_S: [f64; 4] = [15.0, 60.0, 300.0, 900.0];
/// Re-evaluation interval in seconds.
pub const ACES_EPOCH_S: f64 = 900.0;

fn whole_slots(seconds: f64, slot_duration: f64) -> Result<u64> {
    let slots = seconds / slot_duration;
    let rounded = slots.round();
    if rounded < 1.0 || (slots - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::Config(format!(
            "ACES period of {seconds} s is not a whole number of {slot_duration} s slots"
        )));
    }
    Ok(rounded as u64)
}

/// Convert the period menu and the epoch length to slots.
pub fn aces_period_slots(periods_s: &[f64; 4], epoch_s: f64, slot_duration: f64) -> Result<([u64; 4], u64)> {
    let mut out = [0u64; 4];
    for (o, &p) in out.iter_mut().zip(periods_s) {
        *o = whole_slots(p, slot_duration)?;
    }
    Ok((out, whole_slots(epoch_s, slot_duration)?))
}

/// ε-greedy choice of a period index from one Q-row.
pub fn aces_decide<R: Rng + ?Sized>(q_row: &[f64], epsilon: f64, rng: &mut R) -> usize {
    epsilon_greedy(q_row, epsilon, rng)
}

/// Per-node ACES learner. The node's clock for period and epoch boundaries
/// starts the first time it holds enough energy to boot.
#[derive(Debug, Clone, PartialEq)]
pub struct Aces {
    pub periods: [u64; 4],
    pub epoch: u64,
    pub q: QTable,
    pub action: usize,
    boot: Option<u64>,
    state: usize,
    epoch_index: u64,
    scheduled: u32,
    funded: u32,
    brownouts: u32,
    harvest_sum: f64,
    harvest_slots: u32,
    epsilon: f64,
    params: LearningParams,
    buckets: EnergyBuckets,
}

impl Aces {
    pub fn new(periods: [u64; 4], epoch: u64, params: LearningParams, buckets: EnergyBuckets) -> Self {
        Self {
            periods,
            epoch,
            q: QTable::new(buckets.count, 4),
            action: 0,
            boot: None,
            state: 0,
            epoch_index: 0,
            scheduled: 0,
            funded: 0,
            brownouts: 0,
            harvest_sum: 0.0,
            harvest_slots: 0,
            epsilon: params.epsilon,
            params,
            buckets,
        }
    }

    pub fn period(&self) -> u64 {
        self.periods[self.action]
    }

    fn epoch_reward(&self) -> f64 {
        let completed = if self.scheduled == 0 {
            1.0
        } else {
            self.funded as f64 / self.scheduled as f64
        };
        completed - self.brownouts as f64
    }

    fn close_epoch<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let rate = if self.harvest_slots == 0 {
            0.0
        } else {
            self.harvest_sum / self.harvest_slots as f64
        };
        let next = self.buckets.bucket(rate);
        let r = self.epoch_reward();
        self.q.update(self.state, self.action, r, Some(next), self.params.alpha, self.params.gamma);
        self.state = next;
        self.action = aces_decide(self.q.row(next), self.epsilon, rng);
        self.epsilon *= self.params.epsilon_decay;
        self.scheduled = 0;
        self.funded = 0;
        self.brownouts = 0;
        self.harvest_sum = 0.0;
        self.harvest_slots = 0;
    }

    /// Returns the decision and whether a scheduled wake went unfunded.
    pub fn decide<R: Rng + ?Sized>(
        &mut self,
        local_slot: u64,
        available: f64,
        harvest: f64,
        activation_cost: f64,
        rng: &mut R,
    ) -> (Decision, bool) {
        let boot = match self.boot {
            Some(b) => b,
            None if available >= activation_cost => {
                self.boot = Some(local_slot);
                self.state = self.buckets.bucket(harvest);
                self.action = aces_decide(self.q.row(self.state), self.epsilon, rng);
                local_slot
            }
            None => return (Decision::Sleep, false),
        };
        self.harvest_sum += harvest;
        self.harvest_slots += 1;
        let phase = local_slot.saturating_sub(boot);
        let epoch_index = phase / self.epoch;
        if epoch_index != self.epoch_index {
            self.epoch_index = epoch_index;
            self.close_epoch(rng);
        }
        if phase % self.period() != 0 {
            return (Decision::Sleep, false);
        }
        self.scheduled += 1;
        if available >= activation_cost {
            self.funded += 1;
            (Decision::Wake, false)
        } else {
            (Decision::Sleep, true)
        }
    }

    pub fn record_brownout(&mut self) {
        self.brownouts += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn argmax_picks_fifteen_seconds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(aces_decide(&[0.5, 0.2, 0.1, 0.0], 0.0, &mut rng), 0);
    }

    #[test]
    fn full_exploration_is_seeded() {
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| aces_decide(&[0.0; 4], 1.0, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
        let a = run(5);
        assert!((0..4).all(|k| a.contains(&k)));
    }

    #[test]
    fn update_arithmetic() {
        let mut q = QTable::new(1, 4);
        q.update(0, 0, 1.0, Some(0), 0.1, 0.0);
        assert!((q.get(0, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn period_conversion() {
        assert_eq!(aces_period_slots(&ACES_PERIODS_S, ACES_EPOCH_S, 1.0).unwrap(), ([15, 60, 300, 900], 900));
        assert_eq!(aces_period_slots(&ACES_PERIODS_S, ACES_EPOCH_S, 5.0).unwrap(), ([3, 12, 60, 180], 180));
        assert!(matches!(aces_period_slots(&ACES_PERIODS_S, ACES_EPOCH_S, 10.0), Err(Error::Config(_))));
        assert!(aces_period_slots(&ACES_PERIODS_S, ACES_EPOCH_S, 4.0).is_err());
    }

    #[test]
    fn waits_for_boot_then_follows_period() {
        let params = LearningParams { epsilon: 0.0, ..Default::default() };
        let mut a = Aces::new([3, 12, 60, 180], 180, params, EnergyBuckets::new(1.0, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(a.decide(0, 1.0, 1.0, 5.0, &mut rng).0, Decision::Sleep);
        assert_eq!(a.decide(1, 6.0, 1.0, 5.0, &mut rng).0, Decision::Wake);
        assert_eq!(a.decide(2, 6.0, 1.0, 5.0, &mut rng).0, Decision::Sleep);
        assert_eq!(a.decide(3, 6.0, 1.0, 5.0, &mut rng).0, Decision::Sleep);
        assert_eq!(a.decide(4, 6.0, 1.0, 5.0, &mut rng).0, Decision::Wake);
        assert_eq!(a.decide(7, 1.0, 1.0, 5.0, &mut rng), (Decision::Sleep, true));
    }
}

use rand::Rng;

use super::qtable::QTable;
use super::{EnergyBuckets, LearningParams};

/// One Q-learning step followed by an ε-greedy choice of the next cycle.
/// Returns the chosen action index.
#[allow(clippy::too_many_arguments)]
pub fn srl_update<R: Rng + ?Sized>(
    q: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    params: &LearningParams,
    epsilon: f64,
    rng: &mut R,
) -> usize {
    q.update(state, action, reward, Some(next_state), params.alpha, params.gamma);
    q.epsilon_greedy_spread(next_state, epsilon, rng)
}

/// Offline estimate used to seed the Q-table before any feedback arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct SrlPrior {
    /// Average wake-ups per slot for each cycle in the action list.
    pub wake_rates: Vec<f64>,
    /// Expected energy per wake-up, mJ.
    pub energy_per_wake: f64,
    /// Event starts per slot.
    pub event_rate: f64,
    pub charge_efficiency: f64,
    /// Extra value for keeping the current cycle.
    pub stay_bonus: f64,
}

impl SrlPrior {
    /// Expected reward per slot of holding cycle `a` while harvesting `rate`.
    /// Rises with the wake rate while the cycle is affordable and falls
    /// quadratically once it is not, so the peak sits at the smallest
    /// sustainable cycle.
    pub fn value(&self, rate: f64, a: usize) -> f64 {
        let wr = self.wake_rates[a];
        let demand = wr * self.energy_per_wake;
        let f = if demand > 0.0 {
            (self.charge_efficiency * rate / demand).min(1.0)
        } else {
            1.0
        };
        wr * self.event_rate * f * f
    }
}

/// Per-node SRL learner over states `(energy bucket, current cycle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Srl {
    pub q: QTable,
    pub current: usize,
    n: usize,
    state: usize,
    reward_sum: f64,
    harvest_sum: f64,
    slots: u64,
    epsilon: f64,
    params: LearningParams,
    buckets: EnergyBuckets,
}

impl Srl {
    pub fn new(start: usize, prior: &SrlPrior, params: LearningParams, buckets: EnergyBuckets) -> Self {
        let n = prior.wake_rates.len();
        let mut q = QTable::new(buckets.count * n, n);
        let scale = if params.gamma < 1.0 { 1.0 / (1.0 - params.gamma) } else { 1.0 };
        for b in 0..buckets.count {
            let rate = buckets.representative(b);
            for k in 0..n {
                let row = q.row_mut(b * n + k);
                for (a, v) in row.iter_mut().enumerate() {
                    let stay = if a == k { prior.stay_bonus } else { 0.0 };
                    *v = scale * prior.value(rate, a) * (1.0 + stay);
                }
            }
        }
        Self {
            q,
            current: start,
            n,
            state: start,
            reward_sum: 0.0,
            harvest_sum: 0.0,
            slots: 0,
            epsilon: params.epsilon,
            params,
            buckets,
        }
    }

    pub fn observe(&mut self, reward: f64, harvest: f64) {
        self.reward_sum += reward;
        self.harvest_sum += harvest;
        self.slots += 1;
    }

    /// Close the cycle: the reward is the per-slot average over the cycle so
    /// cycles of different length compare fairly.
    pub fn end_cycle<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        if self.slots == 0 {
            return self.current;
        }
        let slots = self.slots as f64;
        let bucket = self.buckets.bucket(self.harvest_sum / slots);
        let next_state = bucket * self.n + self.current;
        let r = self.reward_sum / slots;
        let action = srl_update(&mut self.q, self.state, self.current, r, next_state, &self.params, self.epsilon, rng);
        self.epsilon *= self.params.epsilon_decay;
        self.state = next_state;
        self.current = action;
        self.reward_sum = 0.0;
        self.harvest_sum = 0.0;
        self.slots = 0;
        action
    }
}

use serde::{Deserialize, Serialize};

use super::Decision;
use crate::pcp::DutyCycleSet;

/// How a node holding cycle `c` maps local slots to wake-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WakeRule {
    /// Wake at offsets `tau = slot mod T` whose smallest selected divisor is
    /// `c`. Exactly one cycle owns each covered offset, so coverage is kept
    /// without stacking nodes on shared multiples.
    #[default]
    Owner,
    /// Wake at every multiple of `c`.
    Multiples,
}

/// The wake pattern shared by every cycle-based policy in a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSchedule {
    pub set: DutyCycleSet,
    pub rule: WakeRule,
    owners: Vec<Option<u16>>,
}

impl CycleSchedule {
    pub fn new(set: DutyCycleSet, rule: WakeRule) -> Self {
        let owners = set.owner_table();
        Self { set, rule, owners }
    }

    pub fn cycle(&self, idx: usize) -> u64 {
        self.set.cycles[idx]
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    #[inline]
    pub fn scheduled(&self, cycle_idx: usize, local_slot: u64) -> bool {
        match self.rule {
            WakeRule::Owner => {
                self.owners[(local_slot % self.set.hyperperiod) as usize] == Some(cycle_idx as u16)
            }
            WakeRule::Multiples => local_slot.is_multiple_of(self.set.cycles[cycle_idx]),
        }
    }

    /// Average wake-ups per slot for a node holding cycle `idx`.
    pub fn wake_rate(&self, idx: usize) -> f64 {
        match self.rule {
            WakeRule::Owner => {
                let owned = self.owners.iter().filter(|o| **o == Some(idx as u16)).count();
                owned as f64 / self.set.hyperperiod as f64
            }
            WakeRule::Multiples => 1.0 / self.set.cycles[idx] as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcpDecision {
    pub decision: Decision,
    /// The schedule called for a wake-up the store could not fund.
    pub idle_violation: bool,
}

/// Static offline schedule: wake when the schedule says so and a full
/// activation can be funded; otherwise stay asleep and flag the miss.
pub fn pcp_static_decide(
    schedule: &CycleSchedule,
    cycle_idx: usize,
    local_slot: u64,
    available: f64,
    activation_cost: f64,
) -> PcpDecision {
    if !schedule.scheduled(cycle_idx, local_slot) {
        return PcpDecision {
            decision: Decision::Sleep,
            idle_violation: false,
        };
    }
    let funded = available >= activation_cost;
    PcpDecision {
        decision: if funded { Decision::Wake } else { Decision::Sleep },
        idle_violation: !funded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::select_duty_cycles;

    fn fig2(rule: WakeRule) -> CycleSchedule {
        CycleSchedule::new(select_duty_cycles(3, 15).unwrap(), rule)
    }

    #[test]
    fn examples() {
        for rule in [WakeRule::Owner, WakeRule::Multiples] {
            let s = fig2(rule);
            let three = s.set.index_of(3).unwrap();
            let d = pcp_static_decide(&s, three, 9, 30.0, 26.72);
            assert_eq!(d, PcpDecision { decision: Decision::Wake, idle_violation: false });
            let d = pcp_static_decide(&s, three, 10, 30.0, 26.72);
            assert_eq!(d.decision, Decision::Sleep);
            assert!(!d.idle_violation);
            let d = pcp_static_decide(&s, three, 9, 20.0, 26.72);
            assert_eq!(d, PcpDecision { decision: Decision::Sleep, idle_violation: true });
        }
    }

    #[test]
    fn owner_rule_gives_each_offset_one_node() {
        let s = fig2(WakeRule::Owner);
        for slot in 0..45u64 {
            let tau = slot % 15;
            let n = (0..s.len()).filter(|&i| s.scheduled(i, slot)).count();
            let expected = usize::from(!(tau == 1 || tau == 2));
            assert_eq!(n, expected, "slot {slot}");
        }
        let total: f64 = (0..s.len()).map(|i| s.wake_rate(i)).sum();
        assert!((total - 13.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn multiples_rule_stacks_on_shared_multiples() {
        let s = fig2(WakeRule::Multiples);
        let n = (0..s.len()).filter(|&i| s.scheduled(i, 12)).count();
        assert_eq!(n, 2);
    }
}

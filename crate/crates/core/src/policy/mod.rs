//! Wake/sleep policies: the oracle, greedy, common duty cycle and ACES
//! baselines, static PCP scheduling, and the two online heuristics (RBS and
//! SRL) together with their shared reward.

mod aces;
mod dc;
mod dec_pomdp;
mod greedy;
mod oracle;
mod pcp_static;
mod qtable;
mod rbs;
mod srl;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::energy::EnergyLevel;
use crate::error::{Error, Result};
use crate::model::SlotTime;

pub use self::aces::{aces_decide, aces_period_slots, Aces, ACES_EPOCH_S, ACES_PERIODS_S};
pub use self::dc::{dc_schedule, DutyCycled};
pub use self::dec_pomdp::DecPomdpSpec;
pub use self::greedy::{greedy_decide, Greedy};
pub use self::oracle::oracle_decide;
pub use self::pcp_static::{pcp_static_decide, CycleSchedule, PcpDecision, WakeRule};
pub use self::qtable::{argmax, epsilon_greedy, epsilon_greedy_spread, QTable};
pub use self::rbs::{rbs_transition, Rbs, RbsMemory, RbsTrigger};
pub use self::srl::{srl_update, Srl, SrlPrior};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "ORCL")]
    Oracle,
    #[serde(rename = "GRDY")]
    Greedy,
    #[serde(rename = "DC")]
    DutyCycle,
    #[serde(rename = "PCP_STATIC", alias = "PCP")]
    PcpStatic,
    #[serde(rename = "ACES")]
    Aces,
    #[serde(rename = "RBS")]
    Rbs,
    #[serde(rename = "SRL")]
    Srl,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Oracle,
        PolicyKind::Greedy,
        PolicyKind::DutyCycle,
        PolicyKind::PcpStatic,
        PolicyKind::Aces,
        PolicyKind::Rbs,
        PolicyKind::Srl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Oracle => "ORCL",
            PolicyKind::Greedy => "GRDY",
            PolicyKind::DutyCycle => "DC",
            PolicyKind::PcpStatic => "PCP_STATIC",
            PolicyKind::Aces => "ACES",
            PolicyKind::Rbs => "RBS",
            PolicyKind::Srl => "SRL",
        }
    }

    /// Policies whose nodes hold a cycle from the PCP list.
    pub fn uses_cycles(self) -> bool {
        matches!(self, PolicyKind::PcpStatic | PolicyKind::Rbs | PolicyKind::Srl)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ORCL" | "ORACLE" => Ok(PolicyKind::Oracle),
            "GRDY" | "GREEDY" => Ok(PolicyKind::Greedy),
            "DC" => Ok(PolicyKind::DutyCycle),
            "PCP" | "PCP_STATIC" => Ok(PolicyKind::PcpStatic),
            "ACES" => Ok(PolicyKind::Aces),
            "RBS" => Ok(PolicyKind::Rbs),
            "SRL" => Ok(PolicyKind::Srl),
            other => Err(Error::Config(format!("unknown policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Wake,
    Sleep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CaptureFeedback {
    #[default]
    None,
    CapturedFromStart,
    /// Woke while an event was already under way: the start was missed.
    CapturedMidEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum JobOutcome {
    #[default]
    None,
    ProcessedInDeadline,
    MissedDeadline,
}

/// What a node learns about itself at the end of a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub slot: SlotTime,
    /// Quantized harvest available this slot.
    pub local_energy: EnergyLevel,
    pub stored: f64,
    pub capture_feedback: CaptureFeedback,
    pub job_outcome: JobOutcome,
}

/// +1 for an event captured from its start and processed in time, a random
/// penalty in `[-1, 0)` for waking mid-event, 0 otherwise.
pub fn reward<R: Rng + ?Sized>(obs: &Observation, rng: &mut R) -> f64 {
    match (obs.capture_feedback, obs.job_outcome) {
        (CaptureFeedback::CapturedFromStart, JobOutcome::ProcessedInDeadline) => 1.0,
        (CaptureFeedback::CapturedMidEvent, _) => -rng.random::<f64>().max(f64::MIN_POSITIVE),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Multiplier applied to ε after each decision.
    pub epsilon_decay: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.2,
            epsilon_decay: 0.999,
        }
    }
}

impl LearningParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) || !(0.0..=1.0).contains(&self.epsilon_decay) {
            return Err(Error::Config("epsilon and its decay must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Maps a harvest rate to a small number of levels, two per doubling of
/// `rate / unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBuckets {
    pub unit: f64,
    pub count: usize,
}

impl EnergyBuckets {
    pub fn new(unit: f64, count: usize) -> Self {
        Self {
            unit,
            count: count.max(1),
        }
    }

    #[inline]
    pub fn bucket(&self, rate: f64) -> usize {
        let x = 2.0 * (1.0 + rate.max(0.0) / self.unit).log2();
        (x as usize).min(self.count - 1)
    }

    /// A rate in the middle of bucket `b`.
    pub fn representative(&self, b: usize) -> f64 {
        self.unit * (2f64.powf((b as f64 + 0.5) / 2.0) - 1.0)
    }
}

/// Policy selection and parameters as they appear in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Restrict the policy to the `k` nodes with the highest mean harvest;
    /// the rest stay asleep. `None` uses every node.
    pub node_limit: Option<usize>,
    /// Lowest allowed duty cycle for the PCP sieve.
    pub min_cycle: u64,
    /// Hyperperiod for the PCP sieve. `None` derives it from the event
    /// period range.
    pub hyperperiod: Option<u64>,
    pub wake_rule: WakeRule,
    /// Greedy turn-on threshold, mJ. Defaults to one activation.
    pub e_on: Option<f64>,
    /// Cost of an awake greedy slot with no job, mJ. Defaults to one slot of
    /// execution (sensing plus compute).
    pub greedy_slot_mj: Option<f64>,
    /// Oracle minimum operating energy, mJ. Defaults to one activation.
    pub e_min: Option<f64>,
    /// DC active window `t_e` in slots. Defaults to the task runtime.
    pub dc_active_slots: Option<u64>,
    /// DC harvest window `t_h` in slots. Defaults to `(N - 1) * t_e`.
    pub dc_sleep_slots: Option<u64>,
    pub aces_periods_s: [f64; 4],
    pub aces_epoch_s: f64,
    pub learning: LearningParams,
    /// Relative harvest-rate change that restarts the RBS search.
    pub rbs_threshold: f64,
    pub energy_buckets: usize,
    /// Relative prior preference of SRL for its current cycle.
    pub srl_stay_bonus: f64,
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self {
            kind: PolicyKind::PcpStatic,
            node_limit: None,
            min_cycle: 2,
            hyperperiod: None,
            wake_rule: WakeRule::Owner,
            e_on: None,
            greedy_slot_mj: None,
            e_min: None,
            dc_active_slots: None,
            dc_sleep_slots: None,
            aces_periods_s: ACES_PERIODS_S,
            aces_epoch_s: ACES_EPOCH_S,
            learning: LearningParams::default(),
            rbs_threshold: 0.2,
            energy_buckets: 12,
            srl_stay_bonus: 0.1,
        }
    }
}

impl PolicySpec {
    pub fn of(kind: PolicyKind) -> Self {
        Self {
            kind,
            ..Default::default()
        }
    }

    pub fn with_node_limit(mut self, k: usize) -> Self {
        self.node_limit = Some(k);
        self
    }

    /// Short label such as `GRDY(1)` or `SRL`.
    pub fn label(&self) -> String {
        match self.node_limit {
            Some(k) => format!("{}({k})", self.kind),
            None if matches!(self.kind, PolicyKind::Greedy | PolicyKind::Aces) => format!("{}(N)", self.kind),
            None => self.kind.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.learning.validate()?;
        if self.node_limit == Some(0) {
            return Err(Error::Config("node_limit must be at least 1".into()));
        }
        if self.min_cycle < 2 {
            return Err(Error::Config(format!("min_cycle must be at least 2, got {}", self.min_cycle)));
        }
        if !(self.rbs_threshold > 0.0) {
            return Err(Error::Config("rbs_threshold must be positive".into()));
        }
        if self.energy_buckets == 0 {
            return Err(Error::Config("energy_buckets must be at least 1".into()));
        }
        for (name, v) in [("e_on", self.e_on), ("greedy_slot_mj", self.greedy_slot_mj), ("e_min", self.e_min)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.dc_active_slots == Some(0) {
            return Err(Error::Config("dc_active_slots must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(c: CaptureFeedback, j: JobOutcome) -> Observation {
        Observation {
            slot: SlotTime::new(0, 1.0).unwrap(),
            local_energy: EnergyLevel { level: 0, unit_energy: 1.0 },
            stored: 0.0,
            capture_feedback: c,
            job_outcome: j,
        }
    }

    #[test]
    fn reward_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(reward(&obs(CaptureFeedback::CapturedFromStart, JobOutcome::ProcessedInDeadline), &mut rng), 1.0);
        assert_eq!(reward(&obs(CaptureFeedback::None, JobOutcome::None), &mut rng), 0.0);
        let penalties: Vec<f64> = (0..200)
            .map(|_| reward(&obs(CaptureFeedback::CapturedMidEvent, JobOutcome::None), &mut rng))
            .collect();
        assert!(penalties.iter().all(|r| (-1.0..0.0).contains(r)));
        assert!(penalties.windows(2).any(|w| w[0] != w[1]));
        let mut a = ChaCha8Rng::seed_from_u64(8);
        let mut b = ChaCha8Rng::seed_from_u64(8);
        let o = obs(CaptureFeedback::CapturedMidEvent, JobOutcome::MissedDeadline);
        assert_eq!(reward(&o, &mut a), reward(&o, &mut b));
    }

    #[test]
    fn buckets() {
        let b = EnergyBuckets::new(1.0, 6);
        assert_eq!(b.bucket(0.0), 0);
        assert_eq!(b.bucket(1.0), 2);
        assert_eq!(b.bucket(3.0), 4);
        assert_eq!(b.bucket(1e6), 5);
        for k in 0..6 {
            assert_eq!(b.bucket(b.representative(k)), k);
        }
    }

    #[test]
    fn kind_parsing_and_labels() {
        assert_eq!("pcp".parse::<PolicyKind>().unwrap(), PolicyKind::PcpStatic);
        assert_eq!("ORCL".parse::<PolicyKind>().unwrap(), PolicyKind::Oracle);
        assert!("nope".parse::<PolicyKind>().is_err());
        assert_eq!(PolicySpec::of(PolicyKind::Greedy).with_node_limit(1).label(), "GRDY(1)");
        assert_eq!(PolicySpec::of(PolicyKind::Aces).label(), "ACES(N)");
        assert_eq!(PolicySpec::of(PolicyKind::Srl).label(), "SRL");
    }
}

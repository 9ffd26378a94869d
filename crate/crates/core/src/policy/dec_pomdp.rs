use crate::pcp::DutyCycleSet;

/// The decentralized decision problem the online heuristics approximate.
/// Descriptive only: no planner consumes it.
#[derive(Debug, Clone, PartialEq)]
pub struct DecPomdpSpec {
    pub n_agents: usize,
    /// Per-agent action space: the duty-cycle list.
    pub actions: DutyCycleSet,
    /// Horizon in slots.
    pub horizon: u64,
    /// Number of local energy levels an agent can observe.
    pub observation_levels: usize,
}

impl DecPomdpSpec {
    /// Joint states are the orderings of distinct cycles over the agents,
    /// `|A|! / (|A| - N)!` of them. `None` when the agents outnumber the
    /// cycles or the count overflows.
    pub fn state_count(&self) -> Option<u128> {
        let a = self.actions.len();
        if self.n_agents > a {
            return None;
        }
        (0..self.n_agents).try_fold(1u128, |acc, i| acc.checked_mul((a - i) as u128))
    }

    /// Initial belief mass on each joint state (uniform).
    pub fn initial_belief(&self) -> Option<f64> {
        self.state_count().map(|n| 1.0 / n as f64)
    }

    /// Local observations: energy level times the three capture signals.
    pub fn observation_count(&self) -> usize {
        self.observation_levels * 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::select_duty_cycles;

    #[test]
    fn sizes() {
        let spec = DecPomdpSpec {
            n_agents: 6,
            actions: select_duty_cycles(3, 15).unwrap(),
            horizon: 1000,
            observation_levels: 8,
        };
        assert_eq!(spec.state_count(), Some(720));
        assert_eq!(spec.observation_count(), 24);
        assert!((spec.initial_belief().unwrap() * 720.0 - 1.0).abs() < 1e-12);
    }
}

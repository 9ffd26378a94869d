use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Event;

pub type EventTimeline = Vec<Event>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EventGenParams {
    pub count: usize,
    /// Minimum and maximum gap between consecutive event starts, in slots.
    pub period_range: [u64; 2],
    pub duration_range: [u32; 2],
    /// Fixed processing window in slots; `None` uses the drawn gap.
    pub deadline_slots: Option<u64>,
    pub seed: u64,
}

impl Default for EventGenParams {
    fn default() -> Self {
        Self {
            count: 1000,
            period_range: [3, 5],
            duration_range: [1, 3],
            deadline_slots: None,
            seed: 0,
        }
    }
}

impl EventGenParams {
    pub fn validate(&self) -> Result<()> {
        let [pmin, pmax] = self.period_range;
        let [dmin, dmax] = self.duration_range;
        if pmin < 1 || dmin < 1 {
            return Err(Error::InvalidArgument(
                "event period and duration minimums must be at least 1".into(),
            ));
        }
        if pmin > pmax || dmin > dmax {
            return Err(Error::InvalidArgument(format!(
                "inverted event ranges: period {:?}, duration {:?}",
                self.period_range, self.duration_range
            )));
        }
        if self.deadline_slots == Some(0) {
            return Err(Error::InvalidArgument("deadline must be at least 1 slot".into()));
        }
        Ok(())
    }
}

/// Draw a non-overlapping sporadic timeline. Each event's duration is capped
/// by the gap to the next start, and its deadline is that next start unless a
/// fixed window is configured.
pub fn gen_events(p: &EventGenParams, horizon: u64) -> Result<EventTimeline> {
    p.validate()?;
    let [pmin, pmax] = p.period_range;
    let [dmin, dmax] = p.duration_range;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut events = Vec::new();
    let mut start = rng.random_range(pmin..=pmax);
    while events.len() < p.count && start < horizon {
        let gap = rng.random_range(pmin..=pmax);
        let duration = rng.random_range(dmin..=dmax).min(gap.min(u32::MAX as u64) as u32);
        events.push(Event {
            id: events.len() as u32,
            start_slot: start,
            duration_slots: duration,
            deadline_slot: start + p.deadline_slots.unwrap_or(gap),
        });
        start += gap;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate_ranges_give_fixed_spacing() {
        let p = EventGenParams {
            count: 3,
            period_range: [10, 10],
            duration_range: [3, 3],
            ..Default::default()
        };
        let ev = gen_events(&p, 1000).unwrap();
        assert_eq!(ev.len(), 3);
        assert_eq!(ev.iter().map(|e| e.start_slot).collect::<Vec<_>>(), vec![10, 20, 30]);
        assert!(ev.iter().all(|e| e.duration_slots == 3 && e.deadline_slot == e.start_slot + 10));
    }

    #[test]
    fn duration_capped_by_period() {
        let p = EventGenParams {
            count: 500,
            period_range: [10, 10],
            duration_range: [5, 20],
            ..Default::default()
        };
        assert!(gen_events(&p, 100_000).unwrap().iter().all(|e| e.duration_slots <= 10));
    }

    #[test]
    fn same_seed_same_timeline() {
        let p = EventGenParams {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(gen_events(&p, 10_000).unwrap(), gen_events(&p, 10_000).unwrap());
    }

    #[test]
    fn stops_at_horizon() {
        let p = EventGenParams {
            count: 1000,
            period_range: [10, 10],
            duration_range: [1, 1],
            ..Default::default()
        };
        let ev = gen_events(&p, 55).unwrap();
        assert_eq!(ev.len(), 5);
    }

    #[test]
    fn inverted_ranges_rejected() {
        let p = EventGenParams {
            period_range: [5, 3],
            ..Default::default()
        };
        assert!(gen_events(&p, 100).is_err());
        let p = EventGenParams {
            duration_range: [0, 3],
            ..Default::default()
        };
        assert!(gen_events(&p, 100).is_err());
    }

    proptest! {
        #[test]
        fn never_overlapping(
            pmin in 1u64..30, pspan in 0u64..30,
            dmin in 1u32..40, dspan in 0u32..40,
            seed in any::<u64>(),
        ) {
            let p = EventGenParams {
                count: 300,
                period_range: [pmin, pmin + pspan],
                duration_range: [dmin, dmin + dspan],
                deadline_slots: None,
                seed,
            };
            let ev = gen_events(&p, 1_000_000).unwrap();
            for w in ev.windows(2) {
                prop_assert!(w[0].end_slot() <= w[1].start_slot);
                prop_assert!(w[0].deadline_slot <= w[1].start_slot);
            }
            prop_assert!(ev.iter().all(|e| e.deadline_slot > e.start_slot));
        }
    }
}

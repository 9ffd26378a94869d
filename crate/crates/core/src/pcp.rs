//! Prime-Co-Prime duty-cycle selection.
//!
//! Given the lowest duty cycle `Q` any node can sustain and the hyperperiod
//! `T` of the event periods, an ascending sieve over `[Q, T]` keeps every
//! value not divisible by an earlier pick. For `Q = 2` this yields exactly the
//! primes up to `T`; for larger `Q` it adds the co-primes needed to cover the
//! composites whose small factors fell below `Q`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::energy::CapacitorBank;
use crate::error::{Error, Result};
use crate::model::TaskSpec;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple of all `periods`, failing loudly on overflow.
pub fn hyperperiod(periods: &[u64]) -> Result<u64> {
    let (&first, rest) = periods
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("hyperperiod of an empty period list".into()))?;
    if periods.contains(&0) {
        return Err(Error::InvalidArgument("periods must be at least 1".into()));
    }
    rest.iter().try_fold(first, |acc, &p| {
        (acc / gcd(acc, p))
            .checked_mul(p)
            .ok_or_else(|| Error::Overflow(format!("lcm of {periods:?} exceeds u64")))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DutyCycleSet {
    /// Lowest allowed duty cycle.
    pub min_cycle: u64,
    pub hyperperiod: u64,
    /// Selected cycle lengths, ascending.
    pub cycles: Vec<u64>,
}

impl DutyCycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn index_of(&self, cycle: u64) -> Option<usize> {
        self.cycles.binary_search(&cycle).ok()
    }

    /// For each offset `tau` in `[0, T)`, the index of the smallest selected
    /// cycle dividing `tau`, or `None` when no cycle does. Offset 0 belongs to
    /// the smallest cycle.
    pub fn owner_table(&self) -> Vec<Option<u16>> {
        let t = self.hyperperiod as usize;
        let mut owners = vec![None; t];
        for (idx, &c) in self.cycles.iter().enumerate().rev() {
            for tau in (0..t).step_by(c as usize) {
                owners[tau] = Some(idx as u16);
            }
        }
        owners
    }
}

fn check_bounds(min_cycle: u64, hyperperiod: u64) -> Result<()> {
    if min_cycle < 2 {
        return Err(Error::InvalidArgument(format!(
            "lowest duty cycle must be at least 2, got {min_cycle}"
        )));
    }
    if hyperperiod < min_cycle {
        return Err(Error::InvalidArgument(format!(
            "hyperperiod {hyperperiod} is below the lowest duty cycle {min_cycle}"
        )));
    }
    if hyperperiod > u32::MAX as u64 {
        return Err(Error::InvalidArgument(format!(
            "hyperperiod {hyperperiod} too large to sieve"
        )));
    }
    Ok(())
}

/// Sieve `[min_cycle, hyperperiod]` ascending, keeping each value that no
/// earlier pick divides.
pub fn select_duty_cycles(min_cycle: u64, hyperperiod: u64) -> Result<DutyCycleSet> {
    check_bounds(min_cycle, hyperperiod)?;
    let (q, t) = (min_cycle as usize, hyperperiod as usize);
    let mut struck = vec![false; t - q + 1];
    let mut cycles = Vec::new();
    for v in q..=t {
        if struck[v - q] {
            continue;
        }
        cycles.push(v as u64);
        for m in (v..=t).step_by(v) {
            struck[m - q] = true;
        }
    }
    Ok(DutyCycleSet {
        min_cycle,
        hyperperiod,
        cycles,
    })
}

/// Minimum swarm size that keeps a node active at every offset in `[Q, T]`.
pub fn min_node_count(min_cycle: u64, hyperperiod: u64) -> Result<usize> {
    Ok(select_duty_cycles(min_cycle, hyperperiod)?.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub covered: bool,
    pub uncovered_slots: Vec<u64>,
    /// Offset -> number of selected cycles dividing it, over `[Q, T]`.
    pub multiplicity: BTreeMap<u64, u32>,
}

pub fn verify_coverage(set: &DutyCycleSet) -> CoverageReport {
    let mut multiplicity = BTreeMap::new();
    let mut uncovered_slots = Vec::new();
    for t in set.min_cycle..=set.hyperperiod {
        let count = set.cycles.iter().filter(|&&c| t % c == 0).count() as u32;
        if count == 0 {
            uncovered_slots.push(t);
        }
        multiplicity.insert(t, count);
    }
    CoverageReport {
        covered: uncovered_slots.is_empty(),
        uncovered_slots,
        multiplicity,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `(node_id, cycle)` in ascending cycle order.
    pub pairs: Vec<(usize, u64)>,
    /// Start offset per assigned node, parallel to `pairs`.
    pub phase: Vec<u64>,
}

impl Assignment {
    pub fn cycle_of(&self, node_id: usize) -> Option<u64> {
        self.pairs
            .iter()
            .find(|(n, _)| *n == node_id)
            .map(|&(_, c)| c)
    }
}

/// Give the smallest cycles to the nodes with the highest harvest rates.
/// Nodes beyond the cycle count stay unassigned.
pub fn assign_duty_cycles(harvest_rates: &[(usize, f64)], set: &DutyCycleSet) -> Result<Assignment> {
    if harvest_rates.len() < set.len() {
        return Err(Error::InsufficientNodes {
            required: set.len(),
            available: harvest_rates.len(),
        });
    }
    let mut ranked = harvest_rates.to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let pairs: Vec<(usize, u64)> = ranked
        .iter()
        .zip(&set.cycles)
        .map(|(&(node, _), &c)| (node, c))
        .collect();
    Ok(Assignment {
        phase: vec![0; pairs.len()],
        pairs,
    })
}

/// Whether a node harvesting `rate` mJ/slot can bank one full activation per
/// `cycle` slots, and its capacitor can hold that activation.
pub fn feasibility_check(cycle: u64, rate: f64, bank: &CapacitorBank, task: &TaskSpec) -> bool {
    let cost = task.activation_energy();
    bank.charge_efficiency * rate * cycle as f64 >= cost && bank.capacity >= cost
}

/// Smallest cycle (at least 2) that [`feasibility_check`] accepts, if any
/// within `limit`.
pub fn lowest_sustainable_cycle(
    rate: f64,
    bank: &CapacitorBank,
    task: &TaskSpec,
    limit: u64,
) -> Option<u64> {
    if bank.capacity < task.activation_energy() || !(rate > 0.0) {
        return None;
    }
    let needed = (task.activation_energy() / (bank.charge_efficiency * rate)).ceil() as u64;
    let c = needed.max(2);
    (c <= limit && feasibility_check(c, rate, bank, task)).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(q: u64, t: u64, cycles: &[u64]) -> DutyCycleSet {
        DutyCycleSet {
            min_cycle: q,
            hyperperiod: t,
            cycles: cycles.to_vec(),
        }
    }

    #[test]
    fn hyperperiod_examples() {
        assert_eq!(hyperperiod(&[3, 5]).unwrap(), 15);
        assert_eq!(hyperperiod(&[7]).unwrap(), 7);
        assert_eq!(hyperperiod(&[4, 6]).unwrap(), 12);
    }

    #[test]
    fn hyperperiod_errors() {
        assert!(matches!(hyperperiod(&[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(hyperperiod(&[0, 3]), Err(Error::InvalidArgument(_))));
        let big = [u64::MAX - 1, u64::MAX - 2];
        assert!(matches!(hyperperiod(&big), Err(Error::Overflow(_))));
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(select_duty_cycles(3, 15).unwrap().cycles, vec![3, 4, 5, 7, 11, 13]);
        assert_eq!(select_duty_cycles(2, 7).unwrap().cycles, vec![2, 3, 5, 7]);
        assert_eq!(select_duty_cycles(5, 5).unwrap().cycles, vec![5]);
    }

    #[test]
    fn sieve_rejects_bad_bounds() {
        assert!(select_duty_cycles(1, 10).is_err());
        assert!(select_duty_cycles(6, 5).is_err());
    }

    #[test]
    fn node_count_examples() {
        assert_eq!(min_node_count(3, 15).unwrap(), 6);
        assert_eq!(min_node_count(2, 10).unwrap(), 4);
        assert_eq!(min_node_count(2, 2).unwrap(), 1);
    }

    #[test]
    fn coverage_examples() {
        let r = verify_coverage(&set(3, 15, &[3, 4, 5, 7, 11, 13]));
        assert!(r.covered);
        assert!(r.uncovered_slots.is_empty());
        assert_eq!(r.multiplicity[&12], 2);
        assert_eq!(r.multiplicity[&15], 2);

        let r = verify_coverage(&set(3, 15, &[3, 5]));
        assert!(!r.covered);
        assert_eq!(r.uncovered_slots, vec![4, 7, 8, 11, 13, 14]);

        let r = verify_coverage(&set(2, 2, &[2]));
        assert!(r.covered);
        assert_eq!(r.multiplicity.into_iter().collect::<Vec<_>>(), vec![(2, 1)]);
    }

    #[test]
    fn owner_table_picks_smallest_divisor() {
        let s = select_duty_cycles(3, 15).unwrap();
        let owners = s.owner_table();
        let cycle = |tau: usize| owners[tau].map(|i| s.cycles[i as usize]);
        assert_eq!(cycle(0), Some(3));
        assert_eq!(cycle(1), None);
        assert_eq!(cycle(2), None);
        assert_eq!(cycle(8), Some(4));
        assert_eq!(cycle(12), Some(3));
        assert_eq!(cycle(14), Some(7));
        assert!((3..15).all(|tau| owners[tau].is_some()));
    }

    #[test]
    fn assignment_examples() {
        let s = set(3, 5, &[3, 5]);
        let a = assign_duty_cycles(&[(0, 5.0), (1, 2.0)], &s).unwrap();
        assert_eq!(a.pairs, vec![(0, 3), (1, 5)]);
        let a = assign_duty_cycles(&[(0, 2.0), (1, 5.0)], &s).unwrap();
        assert_eq!(a.pairs, vec![(1, 3), (0, 5)]);
        assert_eq!(
            assign_duty_cycles(&[(0, 1.0)], &s).unwrap_err(),
            Error::InsufficientNodes {
                required: 2,
                available: 1
            }
        );
    }

    #[test]
    fn assignment_ties_prefer_lower_id_and_surplus_sleeps() {
        let s = set(3, 5, &[3, 5]);
        let a = assign_duty_cycles(&[(2, 4.0), (1, 4.0), (0, 1.0)], &s).unwrap();
        assert_eq!(a.pairs, vec![(1, 3), (2, 5)]);
        assert_eq!(a.cycle_of(0), None);
    }

    #[test]
    fn feasibility_examples() {
        let task = TaskSpec::new("dnn", 1, 26.72, 0.0).unwrap();
        let bank = CapacitorBank::new(100.0, 1.0, 0.0).unwrap();
        assert!(feasibility_check(3, 10.0, &bank, &task));
        assert!(!feasibility_check(1, 0.0, &bank, &task));

        let task = TaskSpec::new("big", 1, 50.0, 0.0).unwrap();
        let small = CapacitorBank::new(40.0, 1.0, 0.0).unwrap();
        assert!(!feasibility_check(5, 10.0, &small, &task));
    }

    #[test]
    fn lowest_cycle_matches_feasibility() {
        let task = TaskSpec::new("dnn", 1, 26.72, 0.0).unwrap();
        let bank = CapacitorBank::new(100.0, 1.0, 0.0).unwrap();
        assert_eq!(lowest_sustainable_cycle(10.0, &bank, &task, 100), Some(3));
        assert_eq!(lowest_sustainable_cycle(100.0, &bank, &task, 100), Some(2));
        assert_eq!(lowest_sustainable_cycle(0.0, &bank, &task, 100), None);
    }

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn coverage_and_minimality_exhaustive_small() {
        for t in 2..=120u64 {
            for q in 2..=t {
                let s = select_duty_cycles(q, t).unwrap();
                assert!(verify_coverage(&s).covered, "Q={q} T={t}");
                for skip in 0..s.len() {
                    let mut reduced = s.clone();
                    reduced.cycles.remove(skip);
                    assert!(!verify_coverage(&reduced).covered);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q2_selects_primes(t in 2u64..2000) {
            let primes: Vec<u64> = (2..=t).filter(|&n| is_prime(n)).collect();
            prop_assert_eq!(select_duty_cycles(2, t).unwrap().cycles, primes);
        }

        #[test]
        fn assignment_is_permutation_invariant(
            rates in prop::collection::vec(0.0f64..100.0, 6..12),
            seed in any::<u64>(),
        ) {
            let s = select_duty_cycles(3, 15).unwrap();
            let mut input: Vec<(usize, f64)> = rates.iter().copied().enumerate().collect();
            let base = assign_duty_cycles(&input, &s).unwrap();
            let mut state = seed | 1;
            for i in (1..input.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                input.swap(i, (state % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(assign_duty_cycles(&input, &s).unwrap(), base);
        }

        #[test]
        fn hyperperiod_is_least(xs in prop::collection::vec(1u64..40, 1..5)) {
            let h = hyperperiod(&xs).unwrap();
            prop_assert!(xs.iter().all(|x| h.is_multiple_of(*x)));
            prop_assert!((1..h).all(|m| xs.iter().any(|x| m % x != 0)));
        }
    }
}

/// An in-progress job on one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    /// Index of the captured event in the timeline.
    pub event: usize,
    pub remaining_slots: u32,
    pub deadline: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskProgress {
    InProgress,
    ProcessedInDeadline,
    MissedDeadline,
}

/// Run one funded execution slot of `job` at `now`. Progress is kept across
/// power failures, so slots need not be consecutive.
pub fn advance_task(job: &mut Job, now: u64) -> TaskProgress {
    if now > job.deadline {
        return TaskProgress::MissedDeadline;
    }
    job.remaining_slots = job.remaining_slots.saturating_sub(1);
    if job.remaining_slots == 0 {
        TaskProgress::ProcessedInDeadline
    } else {
        TaskProgress::InProgress
    }
}

/// Whether an unfinished job has run out of time at `now`.
#[inline]
pub fn expired(job: &Job, now: u64) -> bool {
    now > job.deadline && job.remaining_slots > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(remaining: u32, deadline: u64) -> Job {
        Job { event: 0, remaining_slots: remaining, deadline }
    }

    #[test]
    fn single_slot_in_time() {
        assert_eq!(advance_task(&mut job(1, 10), 7), TaskProgress::ProcessedInDeadline);
    }

    #[test]
    fn deadline_semantics() {
        let mut j = job(3, 8);
        assert_eq!(advance_task(&mut j, 8), TaskProgress::InProgress);
        assert!(expired(&j, 9));
        assert_eq!(advance_task(&mut j, 9), TaskProgress::MissedDeadline);
    }

    #[test]
    fn progress_survives_brownout_gap() {
        // Slots 5..=8 are unfunded; progress from slot 4 persists.
        let mut j = job(2, 9);
        assert_eq!(advance_task(&mut j, 4), TaskProgress::InProgress);
        assert!(!expired(&j, 8));
        assert_eq!(advance_task(&mut j, 9), TaskProgress::ProcessedInDeadline);
    }
}

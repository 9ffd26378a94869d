use super::Decision;

/// Wake as soon as the store reaches the turn-on threshold.
pub fn greedy_decide(stored: f64, e_on: f64) -> Decision {
    if stored >= e_on {
        Decision::Wake
    } else {
        Decision::Sleep
    }
}

/// Per-node greedy state: asleep until `e_on` is reached, then awake for as
/// long as one more slot can be paid for.
#[derive(Debug, Clone, PartialEq)]
pub struct Greedy {
    pub e_on: f64,
    pub slot_cost: f64,
    pub on: bool,
}

impl Greedy {
    pub fn new(e_on: f64, slot_cost: f64) -> Self {
        Self {
            e_on,
            slot_cost,
            on: false,
        }
    }

    pub fn decide(&mut self, available: f64) -> Decision {
        self.on = if self.on {
            available >= self.slot_cost
        } else {
            greedy_decide(available, self.e_on) == Decision::Wake
        };
        if self.on {
            Decision::Wake
        } else {
            Decision::Sleep
        }
    }
}

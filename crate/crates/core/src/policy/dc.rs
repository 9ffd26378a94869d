use crate::error::{Error, Result};

/// Common duty cycle shared by all nodes, with node `n` (1-based) shifted by
/// `(n - 1) * t_e` so the active windows tile the cycle.
pub fn dc_schedule(t_e: u64, t_h: u64, n: u64) -> Result<(u64, u64)> {
    if t_e < 1 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "DC needs t_e >= 1 and a 1-based node index, got t_e={t_e}, n={n}"
        )));
    }
    let cycle = if t_h.is_multiple_of(t_e) { t_e + t_h } else { t_e + t_h + 1 };
    Ok((cycle, (n - 1) * t_e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DutyCycled {
    pub cycle: u64,
    pub offset: u64,
    pub active_slots: u64,
}

impl DutyCycled {
    #[inline]
    pub fn scheduled(&self, local_slot: u64) -> bool {
        let c = self.cycle;
        let r = local_slot % c;
        let o = if self.offset < c { self.offset } else { self.offset % c };
        let phase = if r >= o { r - o } else { r + c - o };
        phase < self.active_slots
    }
}

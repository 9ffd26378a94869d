use crate::error::{Error, Result};

/// Pick the single node allowed to stay awake: the one with the most harvest
/// plus stored energy, provided that total reaches `e_min`. Ties go to the
/// lower node id.
pub fn oracle_decide(nodes: &[(usize, f64, f64)], e_min: f64) -> Result<Option<usize>> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("oracle needs at least one node".into()));
    }
    if !(e_min > 0.0) {
        return Err(Error::InvalidArgument(format!("E_min must be positive, got {e_min}")));
    }
    let mut best: Option<(usize, f64)> = None;
    for &(id, harvest, stored) in nodes {
        let total = harvest + stored;
        best = match best {
            Some((bid, bt)) if bt > total || (bt == total && bid < id) => Some((bid, bt)),
            _ => Some((id, total)),
        };
    }
    Ok(best.filter(|&(_, total)| total >= e_min).map(|(id, _)| id))
}

use super::ImagingError;
use crate::channel::ChannelCurve;
use crate::geometry::Point;
use crate::netgraph::{positions_connected, positions_connectivity};

/// Greedily removes relays the team can do without.
///
/// Each round drops the relay whose removal keeps the team connected and
/// leaves the highest algebraic connectivity (lowest index on ties). The
/// result is minimal: removing any one remaining relay disconnects the team.
pub fn prune_redundant(
    task_positions: &[Point],
    comm_positions: &[Point],
    curve: &ChannelCurve,
) -> Result<Vec<Point>, ImagingError> {
    let team = |relays: &[Point]| -> Vec<Point> {
        task_positions.iter().chain(relays).copied().collect()
    };
    if !positions_connected(&team(comm_positions), curve) {
        return Err(ImagingError::Disconnected);
    }
    let mut kept = comm_positions.to_vec();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..kept.len() {
            let mut without = kept.clone();
            without.remove(i);
            let all = team(&without);
            if !positions_connected(&all, curve) {
                continue;
            }
            let lambda2 = positions_connectivity(&all, curve);
            if best.is_none_or(|(_, b)| lambda2 > b) {
                best = Some((i, lambda2));
            }
        }
        match best {
            Some((i, _)) => {
                kept.remove(i);
            }
            None => return Ok(kept),
        }
    }
}

use super::{count_peaks, lloyd_extract, prune_redundant, ImagingError, IntensityImage};
use crate::channel::{ChannelCurve, ChannelParams};
use crate::geometry::Point;
use crate::netgraph::min_connecting_power_for;

/// Relays recovered from an output image and the power that connects them.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub comm_positions: Vec<Point>,
    /// `None` when the team stays disconnected at the power ceiling.
    pub power_dbm: Option<f64>,
}

/// Turns a planner output image into relay positions: count blobs, cover the
/// intensity with that many Lloyd sites, find the least connecting transmit
/// power, then prune redundant relays at that power.
pub fn extract_config(
    img: &IntensityImage,
    task_positions: &[Point],
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Extraction, ImagingError> {
    let img = img.clamped();
    let k = count_peaks(&img);
    let sites = lloyd_extract(&img, k)?;
    let team = |relays: &[Point]| -> Vec<Point> {
        task_positions.iter().chain(relays).copied().collect()
    };
    let Some(power) = min_connecting_power_for(&team(&sites), params, p_max_dbm)? else {
        return Ok(Extraction {
            comm_positions: sites,
            power_dbm: None,
        });
    };
    let curve = ChannelCurve::new(params.with_transmit_power(power))?;
    let pruned = prune_redundant(task_positions, &sites, &curve)?;
    // same ceiling as the first search, so an unchanged team gets the same answer
    let pruned_power = min_connecting_power_for(&team(&pruned), params, p_max_dbm)?;
    Ok(Extraction {
        comm_positions: pruned,
        power_dbm: Some(pruned_power.map_or(power, |p| p.min(power))),
    })
}

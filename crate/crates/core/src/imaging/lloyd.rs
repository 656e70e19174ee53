use super::peaks::components;
use super::{ImagingError, IntensityImage};
use crate::geometry::Point;

pub const LLOYD_MAX_ITERATIONS: usize = 50;
/// Iteration stops once no site moves more than this, pixels.
pub const LLOYD_TOLERANCE_PX: f64 = 0.5;

// Offsets for seeding more sites than there are components.
const JITTER: [(f64, f64); 8] = [
    (0.0, 1.0),
    (1.0, 0.0),
    (0.0, -1.0),
    (-1.0, 0.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (-1.0, 1.0),
    (-1.0, -1.0),
];

/// Places `k` sites that locally optimally cover the intensity distribution
/// of `img` (a weighted centroidal Voronoi configuration), returned in world
/// coordinates.
///
/// Sites start at the intensity centroids of the brightest components. If
/// `k` exceeds the component count, the extra sites are seeded at pixel
/// offsets from existing ones.
pub fn lloyd_extract(img: &IntensityImage, k: usize) -> Result<Vec<Point>, ImagingError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let res = img.resolution();
    let mass: Vec<(f64, f64, f64)> = img
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| ((i / res) as f64, (i % res) as f64, v as f64))
        .collect();
    if mass.is_empty() {
        return Err(ImagingError::InvalidArgument(format!(
            "cannot place {k} sites on an image without intensity"
        )));
    }

    let comps = components(img);
    let anchors: Vec<(f64, f64)> = if comps.is_empty() {
        let (r, c, _) = mass
            .iter()
            .copied()
            .fold((0.0, 0.0, f64::NEG_INFINITY), |best, m| if m.2 > best.2 { m } else { best });
        vec![(r, c)]
    } else {
        comps.iter().map(|c| c.centroid).collect()
    };
    let mut sites: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            if i < comps.len() {
                return anchors[i];
            }
            let extra = i - comps.len();
            let (r, c) = anchors[extra % anchors.len()];
            let (dr, dc) = JITTER[extra % JITTER.len()];
            let scale = 1.0 + (extra / JITTER.len()) as f64;
            (r + dr * scale, c + dc * scale)
        })
        .collect();

    for _ in 0..LLOYD_MAX_ITERATIONS {
        let mut acc = vec![(0.0f64, 0.0f64, 0.0f64); k];
        for &(r, c, w) in &mass {
            let mut nearest = 0;
            let mut best = f64::INFINITY;
            for (s, &(sr, sc)) in sites.iter().enumerate() {
                let d = (sr - r).powi(2) + (sc - c).powi(2);
                if d < best {
                    best = d;
                    nearest = s;
                }
            }
            let a = &mut acc[nearest];
            a.0 += w * r;
            a.1 += w * c;
            a.2 += w;
        }
        let mut moved = 0.0f64;
        for (site, (sr, sc, w)) in sites.iter_mut().zip(acc) {
            if w > 0.0 {
                let next = (sr / w, sc / w);
                moved = moved.max((next.0 - site.0).hypot(next.1 - site.1));
                *site = next;
            }
        }
        if moved < LLOYD_TOLERANCE_PX {
            break;
        }
    }
    let grid = img.grid();
    Ok(sites.into_iter().map(|(r, c)| grid.pixel_to_world(r, c)).collect())
}

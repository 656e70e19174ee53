use super::IntensityImage;

/// Threshold as a fraction of the image maximum.
pub const THRESHOLD_FRACTION: f32 = 0.25;
/// Images dimmer than this contain no peaks.
pub const FLOOR_INTENSITY: f32 = 0.05;
/// Components smaller than this many pixels are ignored.
pub const MIN_COMPONENT_AREA: usize = 3;

/// An 8-connected region above the adaptive threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub area: usize,
    pub peak_value: f32,
    /// Row-major index of the brightest pixel (first in scan order).
    pub peak_index: usize,
    /// Intensity-weighted centroid, `(row, col)` in pixels.
    pub centroid: (f64, f64),
}

/// Components of the thresholded image, brightest first (ties broken by
/// the position of the peak pixel in row-major order).
pub fn components(img: &IntensityImage) -> Vec<Component> {
    let max = img.max();
    if max < FLOOR_INTENSITY {
        return Vec::new();
    }
    let threshold = THRESHOLD_FRACTION * max;
    let res = img.resolution();
    let values = img.values();
    let mut visited = vec![false; values.len()];
    let mut found = Vec::new();
    let mut stack = Vec::new();
    for start in 0..values.len() {
        if visited[start] || values[start] < threshold {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        let mut comp = Component {
            area: 0,
            peak_value: f32::NEG_INFINITY,
            peak_index: start,
            centroid: (0.0, 0.0),
        };
        let (mut mass, mut sr, mut sc) = (0.0f64, 0.0f64, 0.0f64);
        while let Some(i) = stack.pop() {
            let v = values[i];
            let (r, c) = (i / res, i % res);
            comp.area += 1;
            if v > comp.peak_value || (v == comp.peak_value && i < comp.peak_index) {
                comp.peak_value = v;
                comp.peak_index = i;
            }
            mass += v as f64;
            sr += v as f64 * r as f64;
            sc += v as f64 * c as f64;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= res as i64 || nc >= res as i64 {
                        continue;
                    }
                    let j = nr as usize * res + nc as usize;
                    if !visited[j] && values[j] >= threshold {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if comp.area >= MIN_COMPONENT_AREA {
            comp.centroid = (sr / mass, sc / mass);
            found.push(comp);
        }
    }
    found.sort_by(|a, b| {
        b.peak_value
            .total_cmp(&a.peak_value)
            .then(a.peak_index.cmp(&b.peak_index))
    });
    found
}

/// Number of distinct blobs, which is the number of relays to deploy.
pub fn count_peaks(img: &IntensityImage) -> usize {
    components(img).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::imaging::{render, GridSpec};

    #[test]
    fn blank_image_has_no_peaks() {
        assert_eq!(count_peaks(&IntensityImage::zeros(GridSpec::default())), 0);
    }

    #[test]
    fn separated_agents_are_counted() {
        let pts = [Point::new(0.0, 0.0), Point::new(20.0, 0.0), Point::new(0.0, 25.0)];
        let img = render(&pts, &GridSpec::default()).unwrap();
        assert_eq!(count_peaks(&img), 3);
    }

    #[test]
    fn adjacent_agents_merge() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.25, 0.0)];
        let img = render(&pts, &GridSpec::default()).unwrap();
        assert_eq!(count_peaks(&img), 1);
    }

    #[test]
    fn tiny_specks_are_ignored() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut v = vec![0.0f32; 64];
        v[9] = 1.0;
        v[10] = 1.0;
        assert_eq!(count_peaks(&IntensityImage::new(g, v).unwrap()), 0);
    }
}

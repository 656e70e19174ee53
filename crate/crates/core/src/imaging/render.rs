use super::{GridSpec, ImagingError, IntensityImage};
use crate::geometry::Point;

/// Gaussian kernel width, pixels.
pub const KERNEL_SIGMA_PX: f64 = 2.0;
/// Half-width of the square stamp window (13 × 13 pixels).
pub const KERNEL_RADIUS_PX: i64 = 6;
/// Agents must stay this many pixels inside the image border.
pub const RENDER_MARGIN_PX: f64 = 4.0;

/// Marks each agent with an isotropic Gaussian sampled at pixel centers.
///
/// Each stamp is scaled so its brightest sample is exactly 1; overlapping
/// stamps combine by maximum.
pub fn render(positions: &[Point], grid: &GridSpec) -> Result<IntensityImage, ImagingError> {
    let res = grid.resolution_px;
    let hi = res as f64 - 1.0 - RENDER_MARGIN_PX;
    let mut img = IntensityImage::zeros(*grid);
    let two_var = 2.0 * KERNEL_SIGMA_PX * KERNEL_SIGMA_PX;
    for (index, &p) in positions.iter().enumerate() {
        let (row, col) = grid.world_to_pixel(p);
        if !(row >= RENDER_MARGIN_PX && row <= hi && col >= RENDER_MARGIN_PX && col <= hi) {
            return Err(ImagingError::OutOfBounds { index, point: p });
        }
        let (r0, c0) = (row.round() as i64, col.round() as i64);
        let mut stamp = [[0.0f64; 13]; 13];
        let mut peak = 0.0f64;
        for (dr, line) in stamp.iter_mut().enumerate() {
            for (dc, cell) in line.iter_mut().enumerate() {
                let r = (r0 + dr as i64 - KERNEL_RADIUS_PX) as f64;
                let c = (c0 + dc as i64 - KERNEL_RADIUS_PX) as f64;
                let d2 = (r - row).powi(2) + (c - col).powi(2);
                *cell = (-d2 / two_var).exp();
                peak = peak.max(*cell);
            }
        }
        let values = img.values_mut();
        for (dr, line) in stamp.iter().enumerate() {
            let r = r0 + dr as i64 - KERNEL_RADIUS_PX;
            if r < 0 || r >= res as i64 {
                continue;
            }
            for (dc, cell) in line.iter().enumerate() {
                let c = c0 + dc as i64 - KERNEL_RADIUS_PX;
                if c < 0 || c >= res as i64 {
                    continue;
                }
                let v = (cell / peak) as f32;
                let slot = &mut values[r as usize * res + c as usize];
                *slot = slot.max(v);
            }
        }
    }
    Ok(img)
}

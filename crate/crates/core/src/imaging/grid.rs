use std::io::Cursor;
use std::path::Path;

use super::ImagingError;
use crate::geometry::Point;

/// Square pixel grid centered on the world origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub resolution_px: usize,
    pub meters_per_pixel: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution_px: 256,
            meters_per_pixel: 1.25,
        }
    }
}

impl GridSpec {
    pub fn new(resolution_px: usize, meters_per_pixel: f64) -> Result<Self, ImagingError> {
        if resolution_px == 0 || !(meters_per_pixel > 0.0 && meters_per_pixel.is_finite()) {
            return Err(ImagingError::InvalidArgument(format!(
                "bad grid {resolution_px} px at {meters_per_pixel} m/px"
            )));
        }
        Ok(GridSpec {
            resolution_px,
            meters_per_pixel,
        })
    }

    /// Side length of the covered square, meters.
    pub fn extent_m(&self) -> f64 {
        self.resolution_px as f64 * self.meters_per_pixel
    }

    pub fn pixel_count(&self) -> usize {
        self.resolution_px * self.resolution_px
    }

    fn center(&self) -> f64 {
        (self.resolution_px as f64 - 1.0) / 2.0
    }

    /// Real-valued `(row, col)` of a world point. Columns grow with `x`, rows
    /// grow with `y`; the origin sits at the center of the grid.
    pub fn world_to_pixel(&self, p: Point) -> (f64, f64) {
        let c = self.center();
        (c + p.y / self.meters_per_pixel, c + p.x / self.meters_per_pixel)
    }

    pub fn pixel_to_world(&self, row: f64, col: f64) -> Point {
        let c = self.center();
        Point::new(
            (col - c) * self.meters_per_pixel,
            (row - c) * self.meters_per_pixel,
        )
    }
}

/// Row-major scalar image over a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityImage {
    grid: GridSpec,
    values: Vec<f32>,
}

impl IntensityImage {
    pub fn zeros(grid: GridSpec) -> Self {
        IntensityImage {
            grid,
            values: vec![0.0; grid.pixel_count()],
        }
    }

    /// Wraps values that must already lie in `[0, 1]`.
    pub fn new(grid: GridSpec, values: Vec<f32>) -> Result<Self, ImagingError> {
        let img = Self::from_raw(grid, values)?;
        if img.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(ImagingError::InvalidArgument("intensity outside [0, 1]".into()));
        }
        Ok(img)
    }

    /// Wraps unnormalized finite values, such as raw network output.
    pub fn from_raw(grid: GridSpec, values: Vec<f32>) -> Result<Self, ImagingError> {
        if values.len() != grid.pixel_count() {
            return Err(ImagingError::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.pixel_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ImagingError::InvalidArgument("non-finite intensity".into()));
        }
        Ok(IntensityImage { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn resolution(&self) -> usize {
        self.grid.resolution_px
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.grid.resolution_px + col]
    }

    pub fn max(&self) -> f32 {
        self.values.iter().copied().fold(0.0, f32::max)
    }

    pub fn clamped(&self) -> IntensityImage {
        IntensityImage {
            grid: self.grid,
            values: self.values.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }

    /// 8-bit grayscale PNG with `byte = round(255 · v)`.
    pub fn to_png_bytes(&self) -> Result<Vec<u8>, ImagingError> {
        let r = self.grid.resolution_px as u32;
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, r, r);
            encoder.set_color(png::ColorType::Grayscale);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder.write_header().map_err(png_err)?;
            let bytes: Vec<u8> = self
                .values
                .iter()
                .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
                .collect();
            writer.write_image_data(&bytes).map_err(png_err)?;
        }
        Ok(out)
    }

    /// Decodes a square 8-bit grayscale PNG, mapping `v = byte / 255`.
    pub fn from_png_bytes(bytes: &[u8], meters_per_pixel: f64) -> Result<Self, ImagingError> {
        let mut decoder = png::Decoder::new_with_limits(
            Cursor::new(bytes),
            png::Limits {
                bytes: MAX_DECODED_BYTES,
            },
        );
        decoder.set_transformations(png::Transformations::IDENTITY);
        let mut reader = decoder.read_info().map_err(png_err)?;
        let info = reader.info();
        if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
            return Err(ImagingError::Png(format!(
                "expected 8-bit grayscale, got {:?} {:?}",
                info.color_type, info.bit_depth
            )));
        }
        let (w, h) = (info.width as usize, info.height as usize);
        if w != h {
            return Err(ImagingError::Png(format!("image is not square: {w}x{h}")));
        }
        let size = reader
            .output_buffer_size()
            .filter(|&s| s <= MAX_DECODED_BYTES)
            .ok_or_else(|| ImagingError::Png("image too large".into()))?;
        let mut buf = vec![0u8; size];
        let frame = reader.next_frame(&mut buf).map_err(png_err)?;
        let grid = GridSpec::new(w, meters_per_pixel)?;
        let values = buf[..frame.buffer_size()]
            .chunks(frame.line_size)
            .take(h)
            .flat_map(|line| line[..w].iter().map(|&b| b as f32 / 255.0))
            .collect();
        Self::new(grid, values)
    }

    pub fn save_png(&self, path: &Path) -> Result<(), ImagingError> {
        std::fs::write(path, self.to_png_bytes()?)
            .map_err(|e| ImagingError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load_png(path: &Path, meters_per_pixel: f64) -> Result<Self, ImagingError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ImagingError::Io(format!("{}: {e}", path.display())))?;
        Self::from_png_bytes(&bytes, meters_per_pixel)
    }
}

const MAX_DECODED_BYTES: usize = 16 * 1024 * 1024;

fn png_err<E: std::fmt::Display>(e: E) -> ImagingError {
    ImagingError::Png(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_convention() {
        let g = GridSpec::default();
        assert_eq!(g.world_to_pixel(Point::ORIGIN), (127.5, 127.5));
        assert_eq!(g.world_to_pixel(Point::new(1.25, 0.0)), (127.5, 128.5));
        assert_eq!(g.extent_m(), 320.0);
    }

    #[test]
    fn png_quantizes_to_bytes() {
        let g = GridSpec::new(4, 1.0).unwrap();
        let mut vals = vec![0.0f32; 16];
        vals[5] = 1.0;
        vals[6] = 0.5;
        let img = IntensityImage::new(g, vals).unwrap();
        let back = IntensityImage::from_png_bytes(&img.to_png_bytes().unwrap(), 1.0).unwrap();
        assert_eq!(back.get(1, 1), 1.0);
        assert_eq!(back.get(1, 2), 128.0 / 255.0);
        assert_eq!(back.get(0, 0), 0.0);
    }

    #[test]
    fn rejects_garbage_png() {
        assert!(IntensityImage::from_png_bytes(b"not a png", 1.25).is_err());
    }

    #[test]
    fn range_checks() {
        let g = GridSpec::new(2, 1.0).unwrap();
        assert!(IntensityImage::new(g, vec![0.0, 1.5, 0.0, 0.0]).is_err());
        assert!(IntensityImage::from_raw(g, vec![0.0, 1.5, 0.0, 0.0]).is_ok());
        assert!(IntensityImage::from_raw(g, vec![0.0; 3]).is_err());
    }
}

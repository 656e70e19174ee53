//! Inference for the relay-painting convolutional autoencoder.
//!
//! Six stride-2 convolutions (LeakyReLU) shrink a grayscale team image to a
//! `128 × R/64 × R/64` volume; six stride-2 transposed convolutions (ReLU)
//! grow it back to `R × R`.

mod ops;
mod tensor;
mod weights;

pub use ops::{conv2d, conv_transpose2d, leaky_relu, relu, ConvGeometry};
pub use tensor::Tensor;
pub use weights::{architecture, Activation, Layer, LayerKind, LayerSpec, ModelWeights,
    DEFAULT_LEAKY_SLOPE, FORMAT_VERSION, HIDDEN_CHANNELS, LAYER_COUNT, MAGIC};

use thiserror::Error;

use crate::channel::ChannelParams;
use crate::geometry::Point;
use crate::imaging::{extract_config, render, Extraction, GridSpec, ImagingError, IntensityImage};

/// Side lengths must be a multiple of this, and at least four times it.
pub const RESOLUTION_QUANTUM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CnnError {
    #[error("malformed weight file: {0}")]
    Format(String),
    #[error("architecture mismatch: {0}")]
    Architecture(String),
    #[error("weight file truncated at byte {offset}: need {needed}, have {available}")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("resolution {0} is not (N + 4) * 64")]
    Resolution(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
}

pub fn is_admissible_resolution(px: usize) -> bool {
    px >= 4 * RESOLUTION_QUANTUM && px % RESOLUTION_QUANTUM == 0
}

/// Network output together with the shape of the encoder's last activation.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardOutput {
    pub image: IntensityImage,
    /// `(channels, height, width)`
    pub bottleneck: (usize, usize, usize),
}

/// Runs the network. Output values are raw (unclamped).
pub fn forward(img: &IntensityImage, w: &ModelWeights) -> Result<IntensityImage, CnnError> {
    Ok(forward_detailed(img, w)?.image)
}

pub fn forward_detailed(img: &IntensityImage, w: &ModelWeights) -> Result<ForwardOutput, CnnError> {
    let res = img.resolution();
    if !is_admissible_resolution(res) {
        return Err(CnnError::Resolution(res));
    }
    let mut x = Tensor::new(1, res, res, img.values().to_vec())?;
    let mut bottleneck = x.shape();
    for layer in w.layers() {
        let g = layer.spec.geometry();
        x = match layer.spec.kind {
            LayerKind::Conv => conv2d(&x, &layer.weight, &layer.bias, &g)?,
            LayerKind::TransposedConv => conv_transpose2d(&x, &layer.weight, &layer.bias, &g)?,
        };
        match layer.spec.activation {
            Activation::LeakyRelu => leaky_relu(&mut x, w.leaky_slope()),
            Activation::Relu => relu(&mut x),
        }
        if layer.spec.kind == LayerKind::Conv {
            bottleneck = x.shape();
        }
    }
    let image = IntensityImage::from_raw(*img.grid(), x.into_data())?;
    Ok(ForwardOutput { image, bottleneck })
}

/// The CNN planner: render the tasks, run the network, extract relays.
pub fn plan_inference(
    task_positions: &[Point],
    w: &ModelWeights,
    grid: &GridSpec,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Extraction, CnnError> {
    let input = render(task_positions, grid)?;
    let output = forward(&input, w)?;
    Ok(extract_config(&output, task_positions, params, p_max_dbm)?)
}

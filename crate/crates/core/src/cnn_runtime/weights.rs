use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ops::ConvGeometry;
use super::CnnError;

pub const MAGIC: &[u8; 4] = b"CAEW";
pub const FORMAT_VERSION: u32 = 1;
pub const LAYER_COUNT: usize = 12;
/// Channel width of every hidden layer in the standard network.
pub const HIDDEN_CHANNELS: usize = 128;
pub const DEFAULT_LEAKY_SLOPE: f32 = 0.01;
const STRIDE: usize = 2;
// Kernel of each layer, input to output.
const KERNELS: [usize; LAYER_COUNT] = [8, 8, 4, 4, 4, 4, 4, 4, 4, 4, 8, 8];
const ENCODER_LAYERS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Conv,
    TransposedConv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    LeakyRelu,
    Relu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub output_padding: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn geometry(&self) -> ConvGeometry {
        ConvGeometry {
            in_channels: self.in_channels,
            out_channels: self.out_channels,
            kernel: self.kernel,
            stride: self.stride,
            padding: self.padding,
            output_padding: self.output_padding,
        }
    }

    pub fn weight_len(&self) -> usize {
        self.geometry().weight_len()
    }
}

/// The layer sequence of the autoencoder for a given hidden width.
pub fn architecture(hidden_channels: usize) -> Vec<LayerSpec> {
    KERNELS
        .iter()
        .enumerate()
        .map(|(i, &kernel)| {
            let encoder = i < ENCODER_LAYERS;
            LayerSpec {
                kind: if encoder { LayerKind::Conv } else { LayerKind::TransposedConv },
                in_channels: if i == 0 { 1 } else { hidden_channels },
                out_channels: if i == LAYER_COUNT - 1 { 1 } else { hidden_channels },
                kernel,
                stride: STRIDE,
                // the only paddings for which stride 2 exactly halves or doubles
                padding: if kernel == 8 { 3 } else { 1 },
                output_padding: 0,
                activation: if encoder { Activation::LeakyRelu } else { Activation::Relu },
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub spec: LayerSpec,
    /// `[out][in][kh][kw]`
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

/// Parameters of the 12-layer convolutional autoencoder.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelWeights {
    leaky_slope: f32,
    layers: Vec<Layer>,
}

impl ModelWeights {
    /// Accepts any uniform hidden width so reduced models can be built for
    /// testing. Serialized files must use [`HIDDEN_CHANNELS`].
    pub fn new(leaky_slope: f32, layers: Vec<Layer>) -> Result<Self, CnnError> {
        if !leaky_slope.is_finite() {
            return Err(CnnError::Format(format!("leaky slope {leaky_slope}")));
        }
        if layers.len() != LAYER_COUNT {
            return Err(CnnError::Architecture(format!(
                "{} layers, expected {LAYER_COUNT}",
                layers.len()
            )));
        }
        let expected = architecture(layers[0].spec.out_channels);
        for (i, (layer, want)) in layers.iter().zip(&expected).enumerate() {
            if layer.spec != *want {
                return Err(CnnError::Architecture(format!(
                    "layer {i} is {:?}, expected {want:?}",
                    layer.spec
                )));
            }
            if layer.weight.len() != want.weight_len() || layer.bias.len() != want.out_channels {
                return Err(CnnError::Shape(format!("layer {i} tensor sizes")));
            }
        }
        Ok(ModelWeights { leaky_slope, layers })
    }

    pub fn zeros(hidden_channels: usize) -> Self {
        let layers = architecture(hidden_channels)
            .into_iter()
            .map(|spec| Layer {
                weight: vec![0.0; spec.weight_len()],
                bias: vec![0.0; spec.out_channels],
                spec,
            })
            .collect();
        ModelWeights {
            leaky_slope: DEFAULT_LEAKY_SLOPE,
            layers,
        }
    }

    /// He-uniform weights and small uniform biases, deterministic in `seed`.
    pub fn random(hidden_channels: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Self::zeros(hidden_channels);
        for layer in &mut w.layers {
            let s = layer.spec;
            let fan_in = (s.in_channels * s.kernel * s.kernel) as f32;
            let bound = (6.0 / fan_in).sqrt();
            for v in &mut layer.weight {
                *v = rng.random_range(-bound..bound);
            }
            let bias_bound = 1.0 / fan_in.sqrt();
            for v in &mut layer.bias {
                *v = rng.random_range(-bias_bound..bias_bound);
            }
        }
        w
    }

    pub fn leaky_slope(&self) -> f32 {
        self.leaky_slope
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn hidden_channels(&self) -> usize {
        self.layers[0].spec.out_channels
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let floats: usize = self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum();
        let mut out = Vec::with_capacity(16 + LAYER_COUNT * 30 + 4 * floats);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.leaky_slope.to_le_bytes());
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for layer in &self.layers {
            let s = &layer.spec;
            out.push(match s.kind {
                LayerKind::Conv => 0,
                LayerKind::TransposedConv => 1,
            });
            for v in [s.in_channels, s.out_channels, s.kernel, s.stride, s.padding, s.output_padding] {
                out.extend_from_slice(&(v as u32).to_le_bytes());
            }
            out.push(match s.activation {
                Activation::LeakyRelu => 0,
                Activation::Relu => 1,
            });
            for v in layer.weight.iter().chain(&layer.bias) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses a weight file. Every layer header is checked against the
    /// standard architecture before its tensors are allocated.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CnnError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(CnnError::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(CnnError::Format(format!("unsupported version {version}")));
        }
        let leaky_slope = f32::from_bits(r.u32()?);
        let count = r.u32()? as usize;
        if count != LAYER_COUNT {
            return Err(CnnError::Architecture(format!(
                "{count} layers, expected {LAYER_COUNT}"
            )));
        }
        let expected = architecture(HIDDEN_CHANNELS);
        let mut layers = Vec::with_capacity(LAYER_COUNT);
        for (i, want) in expected.iter().enumerate() {
            let kind = match r.u8()? {
                0 => LayerKind::Conv,
                1 => LayerKind::TransposedConv,
                k => return Err(CnnError::Format(format!("layer {i}: unknown kind {k}"))),
            };
            let mut dims = [0usize; 6];
            for d in &mut dims {
                *d = r.u32()? as usize;
            }
            let activation = match r.u8()? {
                0 => Activation::LeakyRelu,
                1 => Activation::Relu,
                a => return Err(CnnError::Format(format!("layer {i}: unknown activation {a}"))),
            };
            let spec = LayerSpec {
                kind,
                in_channels: dims[0],
                out_channels: dims[1],
                kernel: dims[2],
                stride: dims[3],
                padding: dims[4],
                output_padding: dims[5],
                activation,
            };
            if spec != *want {
                return Err(CnnError::Architecture(format!(
                    "layer {i} is {spec:?}, expected {want:?}"
                )));
            }
            let weight = r.f32s(spec.weight_len())?;
            let bias = r.f32s(spec.out_channels)?;
            layers.push(Layer { spec, weight, bias });
        }
        if r.pos != bytes.len() {
            return Err(CnnError::Format(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Self::new(leaky_slope, layers)
    }

    pub fn load(path: &Path) -> Result<Self, CnnError> {
        let bytes =
            std::fs::read(path).map_err(|e| CnnError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), CnnError> {
        std::fs::write(path, self.to_bytes())
            .map_err(|e| CnnError::Io(format!("{}: {e}", path.display())))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CnnError> {
        let available = self.bytes.len() - self.pos;
        if n > available {
            return Err(CnnError::Truncated {
                offset: self.pos,
                needed: n,
                available,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CnnError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CnnError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, CnnError> {
        let raw = self.take(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|b| f32::from_bits(u32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn architecture_shape() {
        let a = architecture(128);
        assert_eq!(a.iter().filter(|l| l.kind == LayerKind::Conv).count(), 6);
        assert_eq!(a[0].in_channels, 1);
        assert_eq!(a[11].out_channels, 1);
        assert_eq!(a[5].activation, Activation::LeakyRelu);
        assert_eq!(a[6].activation, Activation::Relu);
    }

    #[test]
    fn small_width_is_constructible_but_not_loadable() {
        let w = ModelWeights::random(4, 1);
        assert_eq!(w.hidden_channels(), 4);
        let err = ModelWeights::from_bytes(&w.to_bytes()).unwrap_err();
        assert!(matches!(err, CnnError::Architecture(_)));
    }

    #[test]
    fn wrong_layer_count_in_constructor() {
        let mut layers = ModelWeights::zeros(2).layers().to_vec();
        layers.pop();
        assert!(matches!(
            ModelWeights::new(0.01, layers),
            Err(CnnError::Architecture(_))
        ));
    }
}

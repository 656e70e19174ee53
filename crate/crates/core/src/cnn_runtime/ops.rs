//! Strided convolution primitives lowered to single-precision GEMM.

use super::{CnnError, Tensor};

// Upper bound on the lowered column buffer, in floats.
const MAX_COLUMN_FLOATS: usize = 1 << 22;

/// Geometry shared by both convolution kinds. Weights are always laid out
/// `[out][in][kh][kw]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvGeometry {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub output_padding: usize,
}

impl ConvGeometry {
    pub fn weight_len(&self) -> usize {
        self.out_channels * self.in_channels * self.kernel * self.kernel
    }

    fn check(&self, input: &Tensor, weight: &[f32], bias: &[f32]) -> Result<(), CnnError> {
        if self.kernel == 0 || self.stride == 0 {
            return Err(CnnError::Shape("kernel and stride must be positive".into()));
        }
        if input.channels() != self.in_channels {
            return Err(CnnError::Shape(format!(
                "input has {} channels, layer expects {}",
                input.channels(),
                self.in_channels
            )));
        }
        if weight.len() != self.weight_len() || bias.len() != self.out_channels {
            return Err(CnnError::Shape(format!(
                "weight/bias lengths {}/{} do not match {}/{}",
                weight.len(),
                bias.len(),
                self.weight_len(),
                self.out_channels
            )));
        }
        Ok(())
    }

    /// Output side of a strided convolution, if the padded input fits the kernel.
    pub fn conv_output(&self, side: usize) -> Option<usize> {
        let padded = side + 2 * self.padding;
        (padded >= self.kernel).then(|| (padded - self.kernel) / self.stride + 1)
    }

    /// Output side of a transposed convolution.
    pub fn transposed_output(&self, side: usize) -> Option<usize> {
        let full = side.checked_sub(1)? * self.stride + self.kernel + self.output_padding;
        full.checked_sub(2 * self.padding).filter(|&s| s > 0)
    }
}

/// `y[o, i, j] = b[o] + Σ w[o, c, kh, kw] · x[c, i·s + kh − p, j·s + kw − p]`,
/// with zeros outside the input.
pub fn conv2d(input: &Tensor, weight: &[f32], bias: &[f32], g: &ConvGeometry) -> Result<Tensor, CnnError> {
    g.check(input, weight, bias)?;
    let (c_in, h_in, w_in) = input.shape();
    let (Some(h_out), Some(w_out)) = (g.conv_output(h_in), g.conv_output(w_in)) else {
        return Err(CnnError::Shape(format!(
            "{h_in}x{w_in} input is smaller than the {}-wide kernel",
            g.kernel
        )));
    };
    let k = g.kernel;
    let depth = c_in * k * k;
    let positions = h_out * w_out;
    let mut out = Tensor::zeros(g.out_channels, h_out, w_out);
    let chunk = (MAX_COLUMN_FLOATS / depth).clamp(1, positions);
    let mut cols = vec![0.0f32; depth * chunk];
    let x = input.data();

    let mut start = 0;
    while start < positions {
        let n = chunk.min(positions - start);
        for c in 0..c_in {
            for kh in 0..k {
                for kw in 0..k {
                    let row = &mut cols[((c * k + kh) * k + kw) * n..][..n];
                    for (slot, pos) in row.iter_mut().zip(start..start + n) {
                        let ih = (pos / w_out * g.stride + kh) as isize - g.padding as isize;
                        let iw = (pos % w_out * g.stride + kw) as isize - g.padding as isize;
                        *slot = if ih >= 0 && iw >= 0 && (ih as usize) < h_in && (iw as usize) < w_in {
                            x[(c * h_in + ih as usize) * w_in + iw as usize]
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
        // out[:, start..start+n] = W (out × depth) · cols (depth × n)
        let y = &mut out.data_mut()[start..];
        // SAFETY: all three operands are in bounds for the given dimensions
        // and strides; `y` spans out_channels rows of stride `positions`
        // starting at column `start`, with n ≤ positions − start.
        unsafe {
            matrixmultiply::sgemm(
                g.out_channels,
                depth,
                n,
                1.0,
                weight.as_ptr(),
                depth as isize,
                1,
                cols.as_ptr(),
                n as isize,
                1,
                0.0,
                y.as_mut_ptr(),
                positions as isize,
                1,
            );
        }
        start += n;
    }
    add_bias(&mut out, bias);
    Ok(out)
}

/// Adjoint of the strided convolution map:
/// `y[o, i·s + kh − p, j·s + kw − p] += w[o, c, kh, kw] · x[c, i, j]`, plus `b[o]`.
/// Output side is `(n − 1)·s − 2p + k + output_padding`.
pub fn conv_transpose2d(
    input: &Tensor,
    weight: &[f32],
    bias: &[f32],
    g: &ConvGeometry,
) -> Result<Tensor, CnnError> {
    g.check(input, weight, bias)?;
    let (c_in, h_in, w_in) = input.shape();
    let (Some(h_out), Some(w_out)) = (g.transposed_output(h_in), g.transposed_output(w_in)) else {
        return Err(CnnError::Shape(format!(
            "{h_in}x{w_in} input yields an empty transposed output"
        )));
    };
    let k = g.kernel;
    let taps = k * k;
    let rows = g.out_channels * taps;
    // Wt[(o, kh, kw), c] = w[o, c, kh, kw]
    let mut wt = vec![0.0f32; rows * c_in];
    for o in 0..g.out_channels {
        for c in 0..c_in {
            for t in 0..taps {
                wt[(o * taps + t) * c_in + c] = weight[(o * c_in + c) * taps + t];
            }
        }
    }
    let positions = h_in * w_in;
    let mut out = Tensor::zeros(g.out_channels, h_out, w_out);
    let chunk = (MAX_COLUMN_FLOATS / rows).clamp(1, positions);
    let mut cols = vec![0.0f32; rows * chunk];
    let x = input.data();

    let mut start = 0;
    while start < positions {
        let n = chunk.min(positions - start);
        // cols (rows × n) = Wt (rows × c_in) · x[:, start..start+n]
        // SAFETY: `x[start..]` holds c_in rows of stride `positions` with at
        // least n columns each; `cols` holds rows × n floats.
        unsafe {
            matrixmultiply::sgemm(
                rows,
                c_in,
                n,
                1.0,
                wt.as_ptr(),
                c_in as isize,
                1,
                x[start..].as_ptr(),
                positions as isize,
                1,
                0.0,
                cols.as_mut_ptr(),
                n as isize,
                1,
            );
        }
        let y = out.data_mut();
        for o in 0..g.out_channels {
            for kh in 0..k {
                for kw in 0..k {
                    let row = &cols[((o * k + kh) * k + kw) * n..][..n];
                    for (&v, pos) in row.iter().zip(start..start + n) {
                        let oh = (pos / w_in * g.stride + kh) as isize - g.padding as isize;
                        let ow = (pos % w_in * g.stride + kw) as isize - g.padding as isize;
                        if oh >= 0 && ow >= 0 && (oh as usize) < h_out && (ow as usize) < w_out {
                            y[(o * h_out + oh as usize) * w_out + ow as usize] += v;
                        }
                    }
                }
            }
        }
        start += n;
    }
    add_bias(&mut out, bias);
    Ok(out)
}

fn add_bias(t: &mut Tensor, bias: &[f32]) {
    let plane = t.height() * t.width();
    for (values, &b) in t.data_mut().chunks_mut(plane).zip(bias) {
        for v in values {
            *v += b;
        }
    }
}

pub fn leaky_relu(t: &mut Tensor, slope: f32) {
    for v in t.data_mut() {
        if *v < 0.0 {
            *v *= slope;
        }
    }
}

pub fn relu(t: &mut Tensor) {
    for v in t.data_mut() {
        *v = v.max(0.0);
    }
}

//! Independent reference implementations for the integration tests. Nothing
//! here calls into the library under test except for plain data types.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaynet::geometry::Point;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.random_range(-half..half), rng.random_range(-half..half)))
        .collect()
}

/// erf by the positive-term series `2/√π · e^{−x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!`.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x > 6.0 {
        return 1.0;
    }
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    while term > 1e-18 * sum {
        k += 1.0;
        term *= 2.0 * x * x / (2.0 * k + 1.0);
        sum += term;
    }
    2.0 / PI.sqrt() * (-x * x).exp() * sum
}

/// Channel constants for the reference model, with powers in dBm.
#[derive(Clone, Copy, Debug)]
pub struct RefChannel {
    pub pt_dbm: f64,
    pub noise_dbm: f64,
    pub k: f64,
    pub n: f64,
    pub cutoff: f64,
}

impl RefChannel {
    pub fn defaults(pt_dbm: f64) -> Self {
        RefChannel {
            pt_dbm,
            noise_dbm: -70.0,
            k: 5.01e-6,
            n: 2.52,
            cutoff: 0.25,
        }
    }

    pub fn nominal(&self, d: f64) -> f64 {
        if d == 0.0 {
            return 1.0;
        }
        let pt = 10f64.powf(self.pt_dbm / 10.0);
        let pn = 10f64.powf(self.noise_dbm / 10.0);
        erf((pt * self.k * d.powf(-self.n) / pn).sqrt())
    }

    /// Bisection for the knot, a central difference for the slope, and the
    /// tangent's zero crossing.
    pub fn curve(&self) -> RefCurve {
        let (mut lo, mut hi) = (1e-3, 1e4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.nominal(mid) > self.cutoff {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let dt = 0.5 * (lo + hi);
        let h = 1e-5;
        let slope = (self.nominal(dt + h) - self.nominal(dt - h)) / (2.0 * h);
        RefCurve {
            ch: *self,
            dt,
            slope,
            dc: dt - self.cutoff / slope,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RefCurve {
    pub ch: RefChannel,
    pub dt: f64,
    pub slope: f64,
    pub dc: f64,
}

impl RefCurve {
    pub fn rate(&self, d: f64) -> f64 {
        if d < self.dt {
            self.ch.nominal(d)
        } else if d <= self.dc {
            (self.ch.cutoff + self.slope * (d - self.dt)).max(0.0)
        } else {
            0.0
        }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn laplacian(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = w.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { w[i].iter().sum::<f64>() - w[i][i] } else { -w[i][j] })
                .collect()
        })
        .collect()
}

pub fn lambda2(w: &[Vec<f64>]) -> f64 {
    jacobi_eigenvalues(&laplacian(w))[1].max(0.0)
}

pub fn weights_of(points: &[Point], rate: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let n = points.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { rate(points[i].distance(points[j])) })
                .collect()
        })
        .collect()
}

/// Connectivity by union-find over positive weights.
pub fn connected(w: &[Vec<f64>]) -> bool {
    let n = w.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == root)
}

/// Direct sliding-window convolution on `[c][h][w]` data with
/// `[o][c][kh][kw]` weights.
#[allow(clippy::too_many_arguments)]
pub fn naive_conv(
    x: &[f32],
    c_in: usize,
    h: usize,
    w: usize,
    wt: &[f32],
    bias: &[f32],
    c_out: usize,
    k: usize,
    stride: usize,
    pad: usize,
) -> (Vec<f32>, usize, usize) {
    let ho = (h + 2 * pad - k) / stride + 1;
    let wo = (w + 2 * pad - k) / stride + 1;
    let mut y = vec![0.0f32; c_out * ho * wo];
    for o in 0..c_out {
        for i in 0..ho {
            for j in 0..wo {
                let mut acc = bias[o] as f64;
                for c in 0..c_in {
                    for kh in 0..k {
                        for kw in 0..k {
                            let r = (i * stride + kh) as isize - pad as isize;
                            let s = (j * stride + kw) as isize - pad as isize;
                            if r < 0 || s < 0 || r as usize >= h || s as usize >= w {
                                continue;
                            }
                            acc += x[(c * h + r as usize) * w + s as usize] as f64
                                * wt[((o * c_in + c) * k + kh) * k + kw] as f64;
                        }
                    }
                }
                y[(o * ho + i) * wo + j] = acc as f32;
            }
        }
    }
    (y, ho, wo)
}

/// Transposed convolution by gathering: output pixel `(i, j)` collects every
/// input pixel that a stride-`s` scatter would land on it.
#[allow(clippy::too_many_arguments)]
pub fn naive_conv_transpose(
    x: &[f32],
    c_in: usize,
    h: usize,
    w: usize,
    wt: &[f32],
    bias: &[f32],
    c_out: usize,
    k: usize,
    stride: usize,
    pad: usize,
    out_pad: usize,
) -> (Vec<f32>, usize, usize) {
    let ho = (h - 1) * stride + k + out_pad - 2 * pad;
    let wo = (w - 1) * stride + k + out_pad - 2 * pad;
    let mut y = vec![0.0f32; c_out * ho * wo];
    for o in 0..c_out {
        for i in 0..ho {
            for j in 0..wo {
                let mut acc = bias[o] as f64;
                for c in 0..c_in {
                    for kh in 0..k {
                        for kw in 0..k {
                            let r = i as isize + pad as isize - kh as isize;
                            let s = j as isize + pad as isize - kw as isize;
                            if r < 0 || s < 0 || r % stride as isize != 0 || s % stride as isize != 0 {
                                continue;
                            }
                            let (r, s) = (r as usize / stride, s as usize / stride);
                            if r >= h || s >= w {
                                continue;
                            }
                            acc += x[(c * h + r) * w + s] as f64
                                * wt[((o * c_in + c) * k + kh) * k + kw] as f64;
                        }
                    }
                }
                y[(o * ho + i) * wo + j] = acc as f32;
            }
        }
    }
    (y, ho, wo)
}

/// Size of the smallest relay subset that keeps the team connected, by
/// enumerating all subsets.
pub fn min_connecting_subset(tasks: &[Point], relays: &[Point], rate: impl Fn(f64) -> f64) -> Option<usize> {
    let m = relays.len();
    (0u32..1 << m)
        .filter(|mask| {
            let mut team = tasks.to_vec();
            team.extend((0..m).filter(|i| mask >> i & 1 == 1).map(|i| relays[i]));
            connected(&weights_of(&team, &rate))
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

/// Best λ2 over a square grid of single-relay positions between two tasks.
pub fn grid_search_relay(
    tasks: &[Point],
    center: Point,
    half: f64,
    step: f64,
    rate: impl Fn(f64) -> f64,
) -> (Point, f64) {
    let steps = (2.0 * half / step).round() as i64;
    let mut best = (center, f64::NEG_INFINITY);
    for a in 0..=steps {
        for b in 0..=steps {
            let p = Point::new(center.x - half + a as f64 * step, center.y - half + b as f64 * step);
            let mut team = tasks.to_vec();
            team.push(p);
            let l2 = lambda2(&weights_of(&team, &rate));
            if l2 > best.1 {
                best = (p, l2);
            }
        }
    }
    best
}

//! Reference implementations used only by the integration tests. None of
//! them call into the code paths they check.

#![allow(dead_code)]

use aliasfree::{ImageTensor, Kernel2D, PaddingMode, Shape};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

// ---------------------------------------------------------------------------
// Extended-precision power series (fixed point, 320 fractional bits).

const FRAC_BITS: u32 = 320;

fn to_fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    // Every f64 with |x| ≥ 2^-200 has its lowest set bit above 2^-320.
    let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(x);
    let shift = exponent as i64 + FRAC_BITS as i64;
    assert!(shift >= 0, "{x} too small for the fixed-point oracle");
    let v = BigInt::from(mantissa) << shift as usize;
    if sign < 0 {
        -v
    } else {
        v
    }
}

fn from_fixed(v: &BigInt) -> f64 {
    // Round to 64 significant bits before handing the value to f64.
    let bits = v.bits() as i64;
    let drop = (bits - 64).max(0);
    let head = (v >> drop as usize).to_f64().expect("fits");
    head * 2f64.powi((drop - FRAC_BITS as i64) as i32)
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS as usize
}

/// `J₁(x) = Σ (−1)^k (x/2)^{2k+1} / (k!(k+1)!)` over `terms` terms.
pub fn j1_series(x: f64, terms: usize) -> f64 {
    let xf = to_fixed(x);
    let x2 = mul(&xf, &xf);
    let mut term: BigInt = &xf >> 1usize;
    let mut sum = term.clone();
    for k in 1..terms as u64 {
        term = -mul(&term, &x2) / BigInt::from(4 * k * (k + 1));
        sum += &term;
    }
    from_fixed(&sum)
}

/// `I₀(x) = Σ (x/2)^{2k} / (k!)²`.
pub fn i0_series(x: f64, terms: usize) -> f64 {
    let xf = to_fixed(x);
    let x2 = mul(&xf, &xf);
    let one = BigInt::from(1) << FRAC_BITS as usize;
    let mut term = one.clone();
    let mut sum = one;
    for k in 1..terms as u64 {
        term = mul(&term, &x2) / BigInt::from(4 * k * k);
        sum += &term;
    }
    from_fixed(&sum)
}

/// `J₁(x)/x = Σ (−1)^k (x/2)^{2k} / (2·k!(k+1)!)`.
pub fn jinc_series(x: f64, terms: usize) -> f64 {
    let xf = to_fixed(x);
    let x2 = mul(&xf, &xf);
    let mut term: BigInt = (BigInt::from(1) << FRAC_BITS as usize) >> 1usize;
    let mut sum = term.clone();
    for k in 1..terms as u64 {
        term = -mul(&term, &x2) / BigInt::from(4 * k * (k + 1));
        sum += &term;
    }
    from_fixed(&sum)
}

/// `erf(x) = 2/√π · Σ (−1)^n x^{2n+1} / (n!(2n+1))`.
pub fn erf_series(x: f64, terms: usize) -> f64 {
    let xf = to_fixed(x);
    let x2 = mul(&xf, &xf);
    let mut power = xf.clone(); // (−1)^n x^{2n+1} / n!
    let mut sum = xf;
    for n in 1..terms as u64 {
        power = -mul(&power, &x2) / BigInt::from(n);
        sum += &power / BigInt::from(2 * n + 1);
    }
    assert!(!sum.is_negative() || x < 0.0);
    from_fixed(&sum) * std::f64::consts::FRAC_2_SQRT_PI
}

// ---------------------------------------------------------------------------
// Direct DFT.

/// `X[k₁,k₂] = Σ x[n₁,n₂]·e^{−2πi(k₁n₁ + k₂n₂)/N}`, natural order.
pub fn direct_dft(plane: &[f64], n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n * n];
    for k1 in 0..n {
        for k2 in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            for n1 in 0..n {
                for n2 in 0..n {
                    let phase = ((k1 * n1 + k2 * n2) % n) as f64 * std::f64::consts::TAU / n as f64;
                    let v = plane[n1 * n + n2];
                    re += v * phase.cos();
                    im -= v * phase.sin();
                }
            }
            out[k1 * n + k2] = (re, im);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Convolution and decimation by explicit padding.

/// Pads one plane by `pad` on every side, then returns a lookup.
fn padded_plane(img: &ImageTensor, c: usize, pad: usize, mode: PaddingMode) -> Vec<Vec<f64>> {
    let (h, w) = (img.height() as i64, img.width() as i64);
    let mirror = |i: i64, n: i64| -> Option<i64> {
        let mut i = i;
        if n == 1 {
            return Some(0);
        }
        // Reflect repeatedly without repeating edge samples.
        while i < 0 || i >= n {
            if i < 0 {
                i = -i;
            }
            if i >= n {
                i = 2 * (n - 1) - i;
            }
        }
        Some(i)
    };
    let p = pad as i64;
    (-p..h + p)
        .map(|y| {
            (-p..w + p)
                .map(|x| {
                    let inside = (0..h).contains(&y) && (0..w).contains(&x);
                    match (inside, mode) {
                        (true, _) => img.get(c, y as usize, x as usize),
                        (false, PaddingMode::Zero) => 0.0,
                        (false, PaddingMode::Reflect) => {
                            let yy = mirror(y, h).unwrap();
                            let xx = mirror(x, w).unwrap();
                            img.get(c, yy as usize, xx as usize)
                        }
                    }
                })
                .collect()
        })
        .collect()
}

pub fn brute_convolve(img: &ImageTensor, kernel: &Kernel2D, mode: PaddingMode) -> ImageTensor {
    let r = kernel.radius();
    let taps: Vec<&[f64]> = kernel.rows().collect();
    let mut out = ImageTensor::zeros(img.shape());
    for c in 0..img.channels() {
        let padded = padded_plane(img, c, r, mode);
        for y in 0..img.height() {
            for x in 0..img.width() {
                let mut acc = 0.0;
                for a in 0..kernel.size() {
                    for b in 0..kernel.size() {
                        // taps[a][b] is h[a − r, b − r]; it meets x[y − (a − r), x − (b − r)].
                        acc += taps[a][b] * padded[y + 2 * r - a][x + 2 * r - b];
                    }
                }
                out.set(c, y, x, acc);
            }
        }
    }
    out
}

pub fn brute_downsample_af(img: &ImageTensor, kernel: &Kernel2D, mode: PaddingMode) -> ImageTensor {
    let full = brute_convolve(img, kernel, mode);
    let shape = Shape::new(img.channels(), img.height() / 2, img.width() / 2);
    let mut out = ImageTensor::zeros(shape);
    for c in 0..shape.channels {
        for y in 0..shape.height {
            for x in 0..shape.width {
                out.set(c, y, x, full.get(c, 2 * y, 2 * x));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Rotation by an explicit inverse matrix and four-neighbour weights.

pub fn brute_rotate(img: &ImageTensor, phi: f64, replicate: bool) -> ImageTensor {
    let (h, w) = (img.height(), img.width());
    let cy = (h as f64 - 1.0) / 2.0;
    let cx = (w as f64 - 1.0) / 2.0;
    // Display coordinates (x right, y down); counter-clockwise on screen is
    // the matrix [[cos, sin], [−sin, cos]] acting on (x, y). Its inverse:
    let inv = [[phi.cos(), -phi.sin()], [phi.sin(), phi.cos()]];
    let mut out = ImageTensor::zeros(img.shape());
    for r in 0..h {
        for c in 0..w {
            let (x, y) = (c as f64 - cx, r as f64 - cy);
            let sx = inv[0][0] * x + inv[0][1] * y + cx;
            let sy = inv[1][0] * x + inv[1][1] * y + cy;
            let (sx, sy) = (snap(sx), snap(sy));
            let outside = sx < 0.0 || sy < 0.0 || sx > (w - 1) as f64 || sy > (h - 1) as f64;
            for ch in 0..img.channels() {
                let v = if outside && !replicate {
                    0.0
                } else {
                    let sx = sx.clamp(0.0, (w - 1) as f64);
                    let sy = sy.clamp(0.0, (h - 1) as f64);
                    let mut acc = 0.0;
                    for yy in [sy.floor(), sy.floor() + 1.0] {
                        for xx in [sx.floor(), sx.floor() + 1.0] {
                            let wy = 1.0 - (sy - yy).abs();
                            let wx = 1.0 - (sx - xx).abs();
                            if wy > 0.0 && wx > 0.0 {
                                acc += wy * wx * img.get(ch, yy as usize, xx as usize);
                            }
                        }
                    }
                    acc
                };
                out.set(ch, r, c, v);
            }
        }
    }
    out
}

fn snap(v: f64) -> f64 {
    if (v - v.round()).abs() < 1e-9 {
        v.round()
    } else {
        v
    }
}

// ---------------------------------------------------------------------------
// Exact per-element moments of the reverse process for Gaussian data.

/// Mean and variance of `x_0` when the reverse sampler runs with the exact
/// Gaussian denoiser. Every step is affine in `x_t` plus independent noise,
/// so the moments propagate in closed form from `x_T ~ N(0, 1)`.
pub fn reverse_moments(betas: &[f64], sigma_is_beta: bool, mu: f64, sigma0: f64) -> (f64, f64) {
    let mut alpha_bar = Vec::with_capacity(betas.len());
    let mut acc = 1.0;
    for b in betas {
        acc *= 1.0 - b;
        alpha_bar.push(acc);
    }
    let (mut mean, mut var) = (0.0, 1.0);
    for t in (0..betas.len()).rev() {
        let (alpha, ab) = (1.0 - betas[t], alpha_bar[t]);
        let slope = (1.0 - ab).sqrt() / (ab * sigma0 * sigma0 + 1.0 - ab);
        let k = betas[t] / (1.0 - ab).sqrt();
        let a = (1.0 - k * slope) / alpha.sqrt();
        let b = k * slope * ab.sqrt() * mu / alpha.sqrt();
        let noise = if t > 0 && sigma_is_beta { betas[t] } else { 0.0 };
        mean = a * mean + b;
        var = a * a * var + noise;
    }
    (mean, var)
}

pub fn linear_betas(steps: usize, start: f64, end: f64) -> Vec<f64> {
    (0..steps)
        .map(|i| start + (end - start) * i as f64 / (steps - 1).max(1) as f64)
        .collect()
}

/// Deterministic pseudo-random values in `[-1, 1)` for test inputs
/// (SplitMix64), independent of the library's generator.
pub struct TestValues(u64);

impl TestValues {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    pub fn image(&mut self, shape: Shape) -> ImageTensor {
        ImageTensor::from_fn(shape, |_, _, _| self.next())
    }
}

//! Two-times resampling: the naive max-pool / bilinear baseline and the
//! filtered (alias-free) variants, plus the shared convolution engine.

use crate::error::{Error, Result};
use crate::filter::Kernel2D;
use crate::tensor::{ImageTensor, Shape};

/// Boundary extension used by [`convolve2d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaddingMode {
    /// Mirror about the edge sample without repeating it (`-1 → 1`).
    #[default]
    Reflect,
    /// Samples outside the image are zero.
    Zero,
}

/// Gain applied after zero-interleaving and filtering in [`upsample2x_af_with_gain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpsampleGain {
    /// Each of the four output phases is scaled so that its DC gain equals
    /// the kernel's tap sum. Constants map to constants for any normalized
    /// kernel.
    #[default]
    PhaseBalanced,
    /// Every output sample is multiplied by 4.
    Uniform,
}

/// Maps `i` into `0..n` by whole-sample mirroring; `None` under zero padding
/// when `i` falls outside.
#[inline]
fn source_index(i: i64, n: usize, padding: PaddingMode) -> Option<usize> {
    if (0..n as i64).contains(&i) {
        return Some(i as usize);
    }
    match padding {
        PaddingMode::Zero => None,
        PaddingMode::Reflect => {
            if n == 1 {
                return Some(0);
            }
            let period = 2 * (n as i64 - 1);
            let m = i.rem_euclid(period);
            Some(if m >= n as i64 { period - m } else { m } as usize)
        }
    }
}

/// `out[n₁,n₂] = Σ h[i,j]·x[n₁−i, n₂−j]` per channel, same shape as the input.
pub fn convolve2d(img: &ImageTensor, kernel: &Kernel2D, padding: PaddingMode) -> Result<ImageTensor> {
    let (h, w) = (img.height(), img.width());
    if padding == PaddingMode::Reflect && kernel.size() > 2 * h.min(w) + 1 {
        return Err(Error::Geometry(format!(
            "{0}x{0} kernel exceeds reflect padding of a {h}x{w} image",
            kernel.size()
        )));
    }
    let r = kernel.radius() as i64;
    let mut out = ImageTensor::zeros(img.shape());
    for c in 0..img.channels() {
        let src = img.plane(c);
        let dst = out.plane_mut(c);
        for n1 in 0..h as i64 {
            for n2 in 0..w as i64 {
                let mut acc = 0.0;
                for i in -r..=r {
                    let Some(y) = source_index(n1 - i, h, padding) else {
                        continue;
                    };
                    let row = &src[y * w..(y + 1) * w];
                    for j in -r..=r {
                        if let Some(x) = source_index(n2 - j, w, padding) {
                            acc += kernel.at(i, j) * row[x];
                        }
                    }
                }
                dst[n1 as usize * w + n2 as usize] = acc;
            }
        }
    }
    Ok(out)
}

fn require_even(img: &ImageTensor) -> Result<()> {
    if !img.height().is_multiple_of(2) || !img.width().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "2x downsampling needs even height and width, got {}x{}",
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

/// 2×2 max pooling with stride 2.
pub fn downsample2x_naive(img: &ImageTensor) -> Result<ImageTensor> {
    require_even(img)?;
    let shape = Shape::new(img.channels(), img.height() / 2, img.width() / 2);
    Ok(ImageTensor::from_fn(shape, |c, r, k| {
        let (y, x) = (2 * r, 2 * k);
        img.get(c, y, x)
            .max(img.get(c, y, x + 1))
            .max(img.get(c, y + 1, x))
            .max(img.get(c, y + 1, x + 1))
    }))
}

/// Bilinear 2× upsampling with aligned corners: output coordinate `u`
/// samples input coordinate `u·(n−1)/(2n−1)` on each axis.
pub fn upsample2x_naive(img: &ImageTensor) -> Result<ImageTensor> {
    let (h, w) = (img.height(), img.width());
    if h < 2 || w < 2 {
        return Err(Error::Shape(format!(
            "aligned-corner upsampling needs at least 2x2 input, got {h}x{w}"
        )));
    }
    let axis = |n: usize| -> Vec<(usize, usize, f64)> {
        (0..2 * n)
            .map(|u| {
                let pos = (u * (n - 1)) as f64 / (2 * n - 1) as f64;
                let lo = (pos.floor() as usize).min(n - 1);
                let hi = (lo + 1).min(n - 1);
                (lo, hi, pos - lo as f64)
            })
            .collect()
    };
    let rows = axis(h);
    let cols = axis(w);
    let shape = Shape::new(img.channels(), 2 * h, 2 * w);
    Ok(ImageTensor::from_fn(shape, |c, u, v| {
        let (y0, y1, fy) = rows[u];
        let (x0, x1, fx) = cols[v];
        let top = img.get(c, y0, x0) * (1.0 - fx) + img.get(c, y0, x1) * fx;
        let bottom = img.get(c, y1, x0) * (1.0 - fx) + img.get(c, y1, x1) * fx;
        top * (1.0 - fy) + bottom * fy
    }))
}

/// Low-pass filter, then keep even-indexed rows and columns.
pub fn downsample2x_af(img: &ImageTensor, kernel: &Kernel2D, padding: PaddingMode) -> Result<ImageTensor> {
    require_even(img)?;
    let filtered = convolve2d(img, kernel, padding)?;
    let shape = Shape::new(img.channels(), img.height() / 2, img.width() / 2);
    Ok(ImageTensor::from_fn(shape, |c, r, k| filtered.get(c, 2 * r, 2 * k)))
}

/// Zero-interleave to twice the resolution (input samples on even indices),
/// low-pass filter, and apply the phase-balanced gain.
pub fn upsample2x_af(img: &ImageTensor, kernel: &Kernel2D, padding: PaddingMode) -> Result<ImageTensor> {
    upsample2x_af_with_gain(img, kernel, padding, UpsampleGain::PhaseBalanced)
}

pub fn upsample2x_af_with_gain(
    img: &ImageTensor,
    kernel: &Kernel2D,
    padding: PaddingMode,
    gain: UpsampleGain,
) -> Result<ImageTensor> {
    let shape = Shape::new(img.channels(), 2 * img.height(), 2 * img.width());
    let mut stuffed = ImageTensor::zeros(shape);
    for c in 0..img.channels() {
        for r in 0..img.height() {
            for k in 0..img.width() {
                stuffed.set(c, 2 * r, 2 * k, img.get(c, r, k));
            }
        }
    }
    let mut out = convolve2d(&stuffed, kernel, padding)?;
    let gains = phase_gains(kernel, gain);
    for c in 0..shape.channels {
        let plane = out.plane_mut(c);
        for (u, row) in plane.chunks_mut(shape.width).enumerate() {
            for (v, value) in row.iter_mut().enumerate() {
                *value *= gains[u % 2][v % 2];
            }
        }
    }
    Ok(out)
}

/// Sum of the taps that reach input samples from output phase `(a, b)`:
/// taps `(i, j)` with `i ≡ a` and `j ≡ b` (mod 2).
pub fn phase_sums(kernel: &Kernel2D) -> [[f64; 2]; 2] {
    let r = kernel.radius() as i64;
    let mut sums = [[0.0; 2]; 2];
    for i in -r..=r {
        for j in -r..=r {
            sums[i.rem_euclid(2) as usize][j.rem_euclid(2) as usize] += kernel.at(i, j);
        }
    }
    sums
}

fn phase_gains(kernel: &Kernel2D, gain: UpsampleGain) -> [[f64; 2]; 2] {
    match gain {
        UpsampleGain::Uniform => [[4.0; 2]; 2],
        UpsampleGain::PhaseBalanced => {
            let total = kernel.sum();
            let sums = phase_sums(kernel);
            // A phase with no taps receives no input; its output is zero anyway.
            sums.map(|row| row.map(|s| if s == 0.0 { 0.0 } else { total / s }))
        }
    }
}

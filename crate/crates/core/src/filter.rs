//! Windowed jinc anti-aliasing kernels.
//!
//! A tap at offset `(n₁, n₂)` is the ideal circular low-pass response
//! `ω_c²/(2π) · jinc(ω_c·ρ)` with `ρ = √(n₁² + n₂²)`, multiplied by a
//! separable Kaiser window `w(n₁)·w(n₂)` whose extent `L = size − 1`
//! ends on the outermost taps.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use crate::error::{ensure_finite, Error, Result};
use crate::special::{i0_unchecked, jinc_unchecked};

/// Parameters of one anti-aliasing filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Cutoff in radians per sample, in `(0, π]`.
    pub cutoff: f64,
    /// Odd side length of the square kernel.
    pub kernel_size: usize,
    /// Kaiser shape parameter; `0` disables windowing.
    pub kaiser_beta: f64,
    /// Rescale taps so they sum to one.
    pub normalized: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            cutoff: FRAC_PI_2,
            kernel_size: 3,
            kaiser_beta: 0.0,
            normalized: false,
        }
    }
}

impl FilterSpec {
    /// A 3×3 kernel with cutoff π/2 and the given window shape.
    pub fn new(kaiser_beta: f64, normalized: bool) -> Self {
        Self {
            kaiser_beta,
            normalized,
            ..Self::default()
        }
    }

    pub fn radius(&self) -> usize {
        self.kernel_size / 2
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.cutoff, "cutoff")?;
        ensure_finite(self.kaiser_beta, "kaiser beta")?;
        if self.kernel_size.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "kernel size must be odd, got {}",
                self.kernel_size
            )));
        }
        if !(self.cutoff > 0.0 && self.cutoff <= PI) {
            return Err(Error::Domain(format!("cutoff must lie in (0, π], got {}", self.cutoff)));
        }
        if self.kaiser_beta < 0.0 {
            return Err(Error::Domain(format!(
                "kaiser beta must be non-negative, got {}",
                self.kaiser_beta
            )));
        }
        Ok(())
    }
}

/// Unwindowed ideal low-pass tap at integer offset `(n1, n2)`.
pub fn jinc_tap(spec: &FilterSpec, n1: i64, n2: i64) -> Result<f64> {
    spec.validate()?;
    let r = spec.radius() as i64;
    if n1.abs() > r || n2.abs() > r {
        return Err(Error::Domain(format!(
            "tap ({n1}, {n2}) outside a {0}x{0} kernel",
            spec.kernel_size
        )));
    }
    Ok(ideal_tap(spec.cutoff, n1, n2))
}

fn ideal_tap(cutoff: f64, n1: i64, n2: i64) -> f64 {
    let scale = cutoff * cutoff / (2.0 * PI);
    if n1 == 0 && n2 == 0 {
        // jinc(0) = 1/2
        return cutoff * cutoff / (4.0 * PI);
    }
    let rho = ((n1 * n1 + n2 * n2) as f64).sqrt();
    scale * jinc_unchecked(cutoff * rho)
}

/// One-dimensional Kaiser window of extent `extent`, evaluated at `n`.
pub fn kaiser_weight(beta: f64, n: i64, extent: f64) -> Result<f64> {
    ensure_finite(beta, "kaiser beta")?;
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::Domain(format!("window extent must be positive, got {extent}")));
    }
    let n = n as f64;
    if n.abs() > extent / 2.0 {
        return Ok(0.0);
    }
    let ratio = 2.0 * n / extent;
    let arg = (1.0 - ratio * ratio).max(0.0).sqrt();
    Ok(i0_unchecked(beta * arg) / i0_unchecked(beta))
}

/// Builds the windowed (and optionally normalized) kernel for `spec`.
pub fn design_kernel(spec: &FilterSpec) -> Result<Kernel2D> {
    spec.validate()?;
    let r = spec.radius() as i64;
    let extent = (spec.kernel_size - 1) as f64;
    let window: Vec<f64> = (-r..=r)
        .map(|n| {
            if spec.kernel_size == 1 {
                Ok(1.0)
            } else {
                kaiser_weight(spec.kaiser_beta, n, extent)
            }
        })
        .collect::<Result<_>>()?;

    let size = spec.kernel_size;
    let mut taps = Vec::with_capacity(size * size);
    for (i, n1) in (-r..=r).enumerate() {
        for (j, n2) in (-r..=r).enumerate() {
            // w(n1)·w(n2) is formed first so taps[n1,n2] == taps[n2,n1] bitwise.
            taps.push(ideal_tap(spec.cutoff, n1, n2) * (window[i] * window[j]));
        }
    }
    if spec.normalized {
        let sum: f64 = taps.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Design(format!(
                "cannot normalize a kernel whose taps sum to {sum}"
            )));
        }
        taps.iter_mut().for_each(|t| *t /= sum);
    }
    Ok(Kernel2D { size, taps })
}

/// Odd-sized square filter kernel, indexed by signed offsets in `[-r, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    size: usize,
    taps: Vec<f64>,
}

impl Kernel2D {
    /// The 1×1 identity kernel `[[1]]`.
    pub fn identity() -> Self {
        Self {
            size: 1,
            taps: vec![1.0],
        }
    }

    /// Wraps explicit taps, row `n₁ = −r` first. The rows must form an odd
    /// square of finite values with the mirror and transpose symmetries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::Shape(format!("kernel side must be odd, got {size}")));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::Shape(format!(
                "kernel must be square: row of length {} in a {size}-row kernel",
                bad.len()
            )));
        }
        let taps = rows.concat();
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("kernel taps must be finite".into()));
        }
        let kernel = Self { size, taps };
        if !kernel.is_symmetric() {
            return Err(Error::Domain(
                "kernel taps must be mirror- and transpose-symmetric".into(),
            ));
        }
        Ok(kernel)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    /// Tap at signed offset `(n1, n2)`.
    #[inline]
    pub fn at(&self, n1: i64, n2: i64) -> f64 {
        let r = self.radius() as i64;
        debug_assert!(n1.abs() <= r && n2.abs() <= r);
        self.taps[((n1 + r) as usize) * self.size + (n2 + r) as usize]
    }

    /// Row-major taps, row `n₁ = −r` first.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.taps.chunks(self.size)
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    pub fn center(&self) -> f64 {
        self.at(0, 0)
    }

    /// Exact check of `h[n₁,n₂] = h[−n₁,n₂] = h[n₁,−n₂] = h[n₂,n₁]`.
    pub fn is_symmetric(&self) -> bool {
        let r = self.radius() as i64;
        (-r..=r).all(|a| {
            (-r..=r).all(|b| {
                let v = self.at(a, b);
                v == self.at(-a, b) && v == self.at(a, -b) && v == self.at(b, a)
            })
        })
    }

    /// One row per line, taps separated by single spaces. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let mut first = true;
            for t in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{t:?}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Kernel2D::to_text`]. Blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let content = line.trim();
            if !content.is_empty() {
                let row = content
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>().map_err(|_| Error::Parse {
                            offset: offset + line.find(tok).unwrap_or(0),
                            message: format!("invalid tap {tok:?}"),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
            offset += line.len();
        }
        Self::from_rows(&rows)
    }
}

//! Rotation about the image center by inverse mapping with bilinear sampling.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_finite, Error, Result};
use crate::tensor::ImageTensor;

/// Value used where the inverse-rotated coordinate leaves the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fill {
    /// Clamp the coordinate onto the image border.
    #[default]
    ReplicateEdge,
    Zero,
}

impl fmt::Display for Fill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fill::ReplicateEdge => "replicate",
            Fill::Zero => "zero",
        })
    }
}

impl FromStr for Fill {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicate" | "replicate-edge" | "edge" => Ok(Fill::ReplicateEdge),
            "zero" => Ok(Fill::Zero),
            _ => Err(Error::Parse {
                offset: 0,
                message: format!("unknown fill mode {s:?}"),
            }),
        }
    }
}

/// Angle in radians, counter-clockwise as displayed with row 0 on top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub angle: f64,
    pub fill: Fill,
}

impl RotationParams {
    pub fn new(angle: f64, fill: Fill) -> Self {
        Self { angle, fill }
    }
}

// Coordinates this close to a grid line are treated as lying on it, so
// quarter turns permute pixels without interpolation residue.
const SNAP: f64 = 1e-9;

#[inline]
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < SNAP {
        r
    } else {
        v
    }
}

pub fn rotate(img: &ImageTensor, params: RotationParams) -> Result<ImageTensor> {
    ensure_finite(params.angle, "rotation angle")?;
    let (h, w) = (img.height(), img.width());
    let (sin, cos) = params.angle.sin_cos();
    let cy = (h as f64 - 1.0) / 2.0;
    let cx = (w as f64 - 1.0) / 2.0;

    // For each output pixel, the input coordinate rotated by −angle.
    let mut coords = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let dy = r as f64 - cy;
            let dx = c as f64 - cx;
            let sx = snap(cx + dx * cos - dy * sin);
            let sy = snap(cy + dx * sin + dy * cos);
            coords.push((sy, sx));
        }
    }

    let mut out = ImageTensor::zeros(img.shape());
    for ch in 0..img.channels() {
        let src = img.plane(ch);
        for (dst, &(sy, sx)) in out.plane_mut(ch).iter_mut().zip(&coords) {
            *dst = sample_bilinear(src, h, w, sy, sx, params.fill);
        }
    }
    Ok(out)
}

fn sample_bilinear(src: &[f64], h: usize, w: usize, y: f64, x: f64, fill: Fill) -> f64 {
    let (ymax, xmax) = ((h - 1) as f64, (w - 1) as f64);
    let inside = (0.0..=ymax).contains(&y) && (0.0..=xmax).contains(&x);
    let (y, x) = match (inside, fill) {
        (true, _) => (y, x),
        (false, Fill::Zero) => return 0.0,
        (false, Fill::ReplicateEdge) => (y.clamp(0.0, ymax), x.clamp(0.0, xmax)),
    };
    let y0 = y.floor() as usize;
    let x0 = x.floor() as usize;
    let y1 = (y0 + 1).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let fy = y - y0 as f64;
    let fx = x - x0 as f64;
    let at = |r: usize, c: usize| src[r * w + c];
    if fy == 0.0 && fx == 0.0 {
        return at(y0, x0);
    }
    let top = at(y0, x0) * (1.0 - fx) + at(y0, x1) * fx;
    let bottom = at(y1, x0) * (1.0 - fx) + at(y1, x1) * fx;
    top * (1.0 - fy) + bottom * fy
}

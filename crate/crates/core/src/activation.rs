//! Pointwise nonlinearities and their oversampled (alias-free) wrapper.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::filter::Kernel2D;
use crate::resample::{downsample2x_af, upsample2x_af, PaddingMode};
use crate::tensor::ImageTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    ReLU,
    /// Exact `v·Φ(v)` with the normal CDF taken from `erf`.
    GeLU,
}

impl Activation {
    #[inline]
    pub fn eval(self, v: f64) -> f64 {
        match self {
            Activation::ReLU => v.max(0.0),
            Activation::GeLU => v * 0.5 * (1.0 + libm::erf(v * FRAC_1_SQRT_2)),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::ReLU => "relu",
            Activation::GeLU => "gelu",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::ReLU),
            "gelu" => Ok(Activation::GeLU),
            _ => Err(Error::Parse {
                offset: 0,
                message: format!("unknown activation {s:?}"),
            }),
        }
    }
}

pub fn apply_pointwise(img: &ImageTensor, act: Activation) -> ImageTensor {
    img.map(|v| act.eval(v))
}

/// Upsample 2× → nonlinearity → downsample 2×, with the same kernel on
/// both legs. The output has the input's shape.
pub fn wrapped_activation(
    img: &ImageTensor,
    act: Activation,
    kernel: &Kernel2D,
    padding: PaddingMode,
) -> Result<ImageTensor> {
    let up = upsample2x_af(img, kernel, padding)?;
    let activated = apply_pointwise(&up, act);
    downsample2x_af(&activated, kernel, padding)
}

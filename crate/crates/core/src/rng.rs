//! Seeded normal and uniform draws.
//!
//! The bit source is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Standard normals come from the Box–Muller transform over two 53-bit
//! uniforms; both outputs of each pair are used, cosine branch first.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{ImageTensor, Shape};

#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `(0, 1]`.
    fn open_unit(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }

    /// Uniform integer in `low..=high`.
    pub fn uniform_inclusive(&mut self, low: usize, high: usize) -> usize {
        self.inner.gen_range(low..=high)
    }

    /// Image of independent standard normals, drawn in row-major order.
    pub fn normal_image(&mut self, shape: Shape) -> ImageTensor {
        let mut img = ImageTensor::zeros(shape);
        for v in img.as_mut_slice() {
            *v = self.standard_normal();
        }
        img
    }
}

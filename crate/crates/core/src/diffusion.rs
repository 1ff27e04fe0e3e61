//! DDPM noise schedule, forward process, Monte-Carlo training objective and
//! the classical and rotation-distributed reverse samplers.
//!
//! Timesteps are 1-based (`t ∈ 1..=T`) at every public entry point.

use crate::error::{ensure_finite, Error, Result};
use crate::rng::Rng;
use crate::rotation::{rotate, Fill, RotationParams};
use crate::tensor::{ImageTensor, Shape};

/// How the reverse-step noise scale `σ_t` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaMode {
    /// `σ_t = √β_t`.
    #[default]
    Beta,
    /// `σ_t = 0`: a deterministic reverse trajectory.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    beta: Vec<f64>,
    alpha: Vec<f64>,
    alpha_bar: Vec<f64>,
    sigma: Vec<f64>,
}

/// `β_t` interpolated linearly from `beta_start` at `t = 1` to `beta_end`
/// at `t = steps`.
pub fn linear_schedule(steps: usize, beta_start: f64, beta_end: f64, sigma_mode: SigmaMode) -> Result<NoiseSchedule> {
    ensure_finite(beta_start, "beta_start")?;
    ensure_finite(beta_end, "beta_end")?;
    if steps == 0 {
        return Err(Error::Domain("schedule needs at least one step".into()));
    }
    if !(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < beta_start <= beta_end < 1, got {beta_start} and {beta_end}"
        )));
    }
    let beta: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                beta_start
            } else {
                beta_start + (beta_end - beta_start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    NoiseSchedule::from_betas(beta, sigma_mode)
}

impl NoiseSchedule {
    /// The training setup used throughout: 1000 steps, β from 1e-4 to 0.02.
    pub fn standard(sigma_mode: SigmaMode) -> Self {
        linear_schedule(1000, 1e-4, 0.02, sigma_mode).expect("valid constants")
    }

    pub fn from_betas(beta: Vec<f64>, sigma_mode: SigmaMode) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Domain("schedule needs at least one step".into()));
        }
        if let Some(b) = beta.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
            return Err(Error::Domain(format!("beta values must lie in (0, 1), got {b}")));
        }
        let alpha: Vec<f64> = beta.iter().map(|b| 1.0 - b).collect();
        let alpha_bar: Vec<f64> = alpha
            .iter()
            .scan(1.0, |acc, a| {
                *acc *= a;
                Some(*acc)
            })
            .collect();
        let sigma = match sigma_mode {
            SigmaMode::Beta => beta.iter().map(|b| b.sqrt()).collect(),
            SigmaMode::Zero => vec![0.0; beta.len()],
        };
        Ok(Self {
            beta,
            alpha,
            alpha_bar,
            sigma,
        })
    }

    pub fn steps(&self) -> usize {
        self.beta.len()
    }

    #[inline]
    fn idx(&self, t: usize) -> usize {
        assert!(
            (1..=self.steps()).contains(&t),
            "timestep {t} outside 1..={}",
            self.steps()
        );
        t - 1
    }

    pub fn beta(&self, t: usize) -> f64 {
        self.beta[self.idx(t)]
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha[self.idx(t)]
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[self.idx(t)]
    }

    pub fn sigma(&self, t: usize) -> f64 {
        self.sigma[self.idx(t)]
    }

    fn check_t(&self, t: usize) -> Result<()> {
        if (1..=self.steps()).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain(format!("timestep {t} outside 1..={}", self.steps())))
        }
    }
}

/// `√ᾱ_t·x0 + √(1−ᾱ_t)·eps`.
pub fn forward_noise(x0: &ImageTensor, t: usize, eps: &ImageTensor, sched: &NoiseSchedule) -> Result<ImageTensor> {
    sched.check_t(t)?;
    let ab = sched.alpha_bar(t);
    x0.axpby(ab.sqrt(), eps, (1.0 - ab).sqrt())
}

/// Predicts the noise component `ε̂` of a noised image at timestep `t`.
pub trait Denoiser: Send + Sync {
    fn predict(&self, x_t: &ImageTensor, t: usize) -> ImageTensor;
}

impl<D: Denoiser + ?Sized> Denoiser for &D {
    fn predict(&self, x_t: &ImageTensor, t: usize) -> ImageTensor {
        (**self).predict(x_t, t)
    }
}

impl<D: Denoiser + ?Sized> Denoiser for Box<D> {
    fn predict(&self, x_t: &ImageTensor, t: usize) -> ImageTensor {
        (**self).predict(x_t, t)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDenoiser;

impl Denoiser for ZeroDenoiser {
    fn predict(&self, x_t: &ImageTensor, _t: usize) -> ImageTensor {
        ImageTensor::zeros(x_t.shape())
    }
}

/// Predicts the same value everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ConstantDenoiser(pub f64);

impl Denoiser for ConstantDenoiser {
    fn predict(&self, x_t: &ImageTensor, _t: usize) -> ImageTensor {
        ImageTensor::filled(x_t.shape(), self.0)
    }
}

/// Adds a constant to another denoiser's prediction.
#[derive(Debug, Clone)]
pub struct OffsetDenoiser<D> {
    pub inner: D,
    pub offset: f64,
}

impl<D: Denoiser> Denoiser for OffsetDenoiser<D> {
    fn predict(&self, x_t: &ImageTensor, t: usize) -> ImageTensor {
        let offset = self.offset;
        self.inner.predict(x_t, t).map(|v| v + offset)
    }
}

/// Isotropic Gaussian data `x0 ~ N(mean, stddev²·I)` of a fixed shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDataSpec {
    pub mean: f64,
    pub stddev: f64,
    pub shape: Shape,
}

impl GaussianDataSpec {
    pub fn new(mean: f64, stddev: f64, shape: Shape) -> Result<Self> {
        ensure_finite(mean, "data mean")?;
        ensure_finite(stddev, "data stddev")?;
        if !(stddev > 0.0) {
            return Err(Error::Domain(format!("data stddev must be positive, got {stddev}")));
        }
        if shape.is_empty() {
            return Err(Error::Shape("data shape must be non-empty".into()));
        }
        Ok(Self { mean, stddev, shape })
    }

    pub fn sample(&self, rng: &mut Rng) -> ImageTensor {
        let (m, s) = (self.mean, self.stddev);
        rng.normal_image(self.shape).map(|z| m + s * z)
    }
}

/// The exact conditional expectation `E[ε | x_t]` for Gaussian data:
/// `√(1−ᾱ_t)·(x_t − √ᾱ_t·μ) / (ᾱ_t·σ₀² + 1 − ᾱ_t)`.
#[derive(Debug, Clone)]
pub struct AnalyticGaussianDenoiser {
    data: GaussianDataSpec,
    alpha_bar: Vec<f64>,
}

pub fn analytic_gaussian_denoiser(data: GaussianDataSpec, sched: &NoiseSchedule) -> AnalyticGaussianDenoiser {
    AnalyticGaussianDenoiser {
        data,
        alpha_bar: sched.alpha_bar.clone(),
    }
}

impl AnalyticGaussianDenoiser {
    /// Slope of `ε̂` in `x_t` at timestep `t`.
    pub fn coefficient(&self, t: usize) -> f64 {
        let ab = self.alpha_bar[t - 1];
        let var = self.data.stddev * self.data.stddev;
        (1.0 - ab).sqrt() / (ab * var + 1.0 - ab)
    }
}

impl Denoiser for AnalyticGaussianDenoiser {
    fn predict(&self, x_t: &ImageTensor, t: usize) -> ImageTensor {
        assert!((1..=self.alpha_bar.len()).contains(&t), "timestep {t} out of range");
        let coef = self.coefficient(t);
        let center = self.alpha_bar[t - 1].sqrt() * self.data.mean;
        x_t.map(|v| coef * (v - center))
    }
}

/// One Monte-Carlo sample of the training objective.
#[derive(Debug, Clone)]
pub struct TrainingDraw {
    pub x0: ImageTensor,
    pub t: usize,
    pub eps: ImageTensor,
    pub x_t: ImageTensor,
}

impl TrainingDraw {
    /// Draws `x0`, then `t`, then `ε`, in that order.
    pub fn sample(data: &GaussianDataSpec, sched: &NoiseSchedule, rng: &mut Rng) -> Self {
        let x0 = data.sample(rng);
        let t = rng.uniform_inclusive(1, sched.steps());
        let eps = rng.normal_image(data.shape);
        let x_t = forward_noise(&x0, t, &eps, sched).expect("shapes agree by construction");
        Self { x0, t, eps, x_t }
    }

    /// `‖ε − prediction‖²`.
    pub fn loss(&self, prediction: &ImageTensor) -> f64 {
        assert_eq!(prediction.shape(), self.eps.shape());
        self.eps
            .as_slice()
            .iter()
            .zip(prediction.as_slice())
            .map(|(e, p)| (e - p) * (e - p))
            .sum()
    }
}

/// Mean of `‖ε − ε̂(x_t, t)‖²` over `n_draws` seeded draws.
pub fn training_loss<D: Denoiser + ?Sized>(
    denoiser: &D,
    data: &GaussianDataSpec,
    sched: &NoiseSchedule,
    n_draws: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if n_draws == 0 {
        return Err(Error::Domain("n_draws must be at least 1".into()));
    }
    let total: f64 = (0..n_draws)
        .map(|_| {
            let draw = TrainingDraw::sample(data, sched, rng);
            draw.loss(&denoiser.predict(&draw.x_t, draw.t))
        })
        .sum();
    Ok(total / n_draws as f64)
}

/// Rotation applied after every reverse step by [`sample_rotated`].
pub fn per_step_angle(total: f64, steps: usize) -> f64 {
    total / steps as f64
}

fn reverse_process<D: Denoiser + ?Sized>(
    denoiser: &D,
    sched: &NoiseSchedule,
    mut x: ImageTensor,
    rng: &mut Rng,
    rotation: Option<RotationParams>,
) -> Result<ImageTensor> {
    for t in (1..=sched.steps()).rev() {
        let eps_hat = denoiser.predict(&x, t);
        x.ensure_same_shape(&eps_hat)?;
        let alpha = sched.alpha(t);
        let coef = (1.0 - alpha) / (1.0 - sched.alpha_bar(t)).sqrt();
        let inv_sqrt_alpha = 1.0 / alpha.sqrt();
        let sigma = sched.sigma(t);
        let noise = (t > 1).then(|| rng.normal_image(x.shape()));
        for (i, v) in x.as_mut_slice().iter_mut().enumerate() {
            let mut next = (*v - coef * eps_hat.as_slice()[i]) * inv_sqrt_alpha;
            if let Some(z) = &noise {
                next += sigma * z.as_slice()[i];
            }
            *v = next;
        }
        if let Some(params) = rotation {
            x = rotate(&x, params)?;
        }
    }
    Ok(x)
}

/// Ancestral DDPM sampling from `x_T ~ N(0, I)`.
pub fn sample_classical<D: Denoiser + ?Sized>(
    denoiser: &D,
    sched: &NoiseSchedule,
    shape: Shape,
    rng: &mut Rng,
) -> Result<ImageTensor> {
    let x_t = rng.normal_image(shape);
    reverse_process(denoiser, sched, x_t, rng, None)
}

/// Like [`sample_classical`] but starting from a given `x_T`.
pub fn sample_classical_from<D: Denoiser + ?Sized>(
    denoiser: &D,
    sched: &NoiseSchedule,
    x_t: ImageTensor,
    rng: &mut Rng,
) -> Result<ImageTensor> {
    reverse_process(denoiser, sched, x_t, rng, None)
}

/// Ancestral sampling with the target rotation `phi` spread evenly over
/// the steps: after each update the state is rotated by `phi / T`.
pub fn sample_rotated<D: Denoiser + ?Sized>(
    denoiser: &D,
    sched: &NoiseSchedule,
    shape: Shape,
    phi: f64,
    rng: &mut Rng,
    fill: Fill,
) -> Result<ImageTensor> {
    ensure_finite(phi, "rotation angle")?;
    let x_t = rng.normal_image(shape);
    sample_rotated_from(denoiser, sched, x_t, phi, rng, fill)
}

pub fn sample_rotated_from<D: Denoiser + ?Sized>(
    denoiser: &D,
    sched: &NoiseSchedule,
    x_t: ImageTensor,
    phi: f64,
    rng: &mut Rng,
    fill: Fill,
) -> Result<ImageTensor> {
    ensure_finite(phi, "rotation angle")?;
    let step = RotationParams::new(per_step_angle(phi, sched.steps()), fill);
    reverse_process(denoiser, sched, x_t, rng, Some(step))
}

//! DFT-based measurements: kernel frequency responses, energy beyond a
//! cutoff, and rotational equivariance of fixed resampling pipelines.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::activation::{apply_pointwise, wrapped_activation, Activation};
use crate::error::{Error, Result};
use crate::filter::{design_kernel, FilterSpec, Kernel2D};
use crate::resample::{downsample2x_af, downsample2x_naive, upsample2x_af, upsample2x_naive, PaddingMode};
use crate::rng::Rng;
use crate::rotation::{rotate, Fill, RotationParams};
use crate::tensor::{ImageTensor, Shape};

/// `N × N` DFT coefficients in natural order; index `k` stands for the
/// angular frequency `2πk/N` with `k` folded into `[−N/2, N/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    n: usize,
    data: Vec<Complex64>,
}

impl SpectrumGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Coefficient at signed frequency indices.
    pub fn at(&self, k1: i64, k2: i64) -> Complex64 {
        self.data[self.wrap(k1) * self.n + self.wrap(k2)]
    }

    pub fn magnitude(&self, k1: i64, k2: i64) -> f64 {
        self.at(k1, k2).norm()
    }

    /// Signed index in `[−N/2, N/2)` for a natural-order index.
    pub fn signed_index(&self, k: usize) -> i64 {
        signed(k, self.n)
    }

    /// Angular frequency of signed index `k`.
    pub fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.n as f64
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.data
    }

    /// `k1,k2,magnitude` rows with both indices running over `[−N/2, N/2)`.
    pub fn to_csv(&self) -> String {
        let n = self.n as i64;
        let lo = -(n / 2);
        let mut out = String::from("k1,k2,magnitude\n");
        for k1 in lo..lo + n {
            for k2 in lo..lo + n {
                writeln!(out, "{k1},{k2},{:?}", self.magnitude(k1, k2)).expect("writing to a String");
            }
        }
        out
    }
}

fn fft2_in_place(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            column[r] = data[r * n + c];
        }
        fft.process(&mut column);
        for r in 0..n {
            data[r * n + c] = column[r];
        }
    }
}

fn require_square_plane(img: &ImageTensor) -> Result<usize> {
    if img.height() != img.width() {
        return Err(Error::Shape(format!(
            "DFT needs a square image, got {}x{}",
            img.height(),
            img.width()
        )));
    }
    Ok(img.height())
}

/// Unnormalized 2D DFT of a single-channel square image.
pub fn dft2(img: &ImageTensor) -> Result<SpectrumGrid> {
    if img.channels() != 1 {
        return Err(Error::Shape(format!("DFT takes one channel, got {}", img.channels())));
    }
    let n = require_square_plane(img)?;
    Ok(plane_spectrum(img.plane(0), n))
}

fn plane_spectrum(plane: &[f64], n: usize) -> SpectrumGrid {
    let mut data: Vec<Complex64> = plane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_in_place(&mut data, n, false);
    SpectrumGrid { n, data }
}

/// Inverse of [`dft2`], keeping the real part.
pub fn idft2_real(spectrum: &SpectrumGrid) -> ImageTensor {
    let n = spectrum.n;
    let mut data = spectrum.data.clone();
    fft2_in_place(&mut data, n, true);
    let scale = 1.0 / (n * n) as f64;
    ImageTensor::new(1, n, n, data.iter().map(|z| z.re * scale).collect()).expect("finite spectrum")
}

/// Zero-phase response of `kernel` sampled on an `n × n` frequency grid:
/// taps are embedded with offset `(0, 0)` at the origin, wrapping negative
/// offsets, so `H(0,0)` equals the tap sum.
pub fn freq_response(kernel: &Kernel2D, n: usize) -> Result<SpectrumGrid> {
    if n < kernel.size() {
        return Err(Error::Shape(format!(
            "grid of {n} cannot hold a {0}x{0} kernel",
            kernel.size()
        )));
    }
    let r = kernel.radius() as i64;
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in -r..=r {
        for j in -r..=r {
            let y = i.rem_euclid(n as i64) as usize;
            let x = j.rem_euclid(n as i64) as usize;
            data[y * n + x] = Complex64::new(kernel.at(i, j), 0.0);
        }
    }
    fft2_in_place(&mut data, n, false);
    Ok(SpectrumGrid { n, data })
}

/// `Σ h[i,j]·(−1)^{i+j}`: the kernel's response at `(π, π)`.
pub fn nyquist_gain(kernel: &Kernel2D) -> f64 {
    let r = kernel.radius() as i64;
    (-r..=r)
        .flat_map(|i| (-r..=r).map(move |j| (i, j)))
        .map(|(i, j)| {
            if (i + j) % 2 == 0 {
                kernel.at(i, j)
            } else {
                -kernel.at(i, j)
            }
        })
        .sum()
}

/// Fraction of spectral energy at frequencies with `max(|ω₁|, |ω₂|) > cutoff`,
/// summed over channels. Zero for an all-zero image.
pub fn alias_energy(img: &ImageTensor, cutoff: f64) -> Result<f64> {
    let n = require_square_plane(img)?;
    let mut above = 0.0;
    let mut total = 0.0;
    for c in 0..img.channels() {
        let spec = plane_spectrum(img.plane(c), n);
        for k1 in 0..n {
            let w1 = spec.omega(signed(k1, n)).abs();
            for k2 in 0..n {
                let w2 = spec.omega(signed(k2, n)).abs();
                let e = spec.data[k1 * n + k2].norm_sqr();
                total += e;
                if w1.max(w2) > cutoff {
                    above += e;
                }
            }
        }
    }
    Ok(if total == 0.0 { 0.0 } else { above / total })
}

#[inline]
fn signed(k: usize, n: usize) -> i64 {
    if 2 * k >= n {
        k as i64 - n as i64
    } else {
        k as i64
    }
}

/// Band edge of the standard test corpus: `0.8 · π/2`.
pub const CORPUS_BAND: f64 = 0.8 * FRAC_PI_2;
/// Side length of the standard corpus images.
pub const CORPUS_SIZE: usize = 64;
/// Number of standard corpus images; image `i` uses seed `i`.
pub const CORPUS_LEN: usize = 8;

/// Square single-channel image whose spectrum is confined to
/// `max(|ω₁|, |ω₂|) ≤ band`, scaled to unit RMS.
///
/// White Gaussian noise from `Rng::new(seed)` is transformed, masked and
/// transformed back. The mask is symmetric under `k → −k`, so the result is
/// real up to rounding.
pub fn band_limited_image(n: usize, band: f64, seed: u64) -> ImageTensor {
    let mut rng = Rng::new(seed);
    let noise = rng.normal_image(Shape::new(1, n, n));
    let mut spec = plane_spectrum(noise.plane(0), n);
    for k1 in 0..n {
        for k2 in 0..n {
            let w1 = spec.omega(signed(k1, n)).abs();
            let w2 = spec.omega(signed(k2, n)).abs();
            if w1.max(w2) > band {
                spec.data[k1 * n + k2] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let img = idft2_real(&spec);
    let rms = (img.sum_squares() / (n * n) as f64).sqrt();
    img.scale(1.0 / rms)
}

/// The fixed-seed band-limited images used for comparative measurements.
pub fn standard_corpus() -> Vec<ImageTensor> {
    (0..CORPUS_LEN as u64)
        .map(|seed| band_limited_image(CORPUS_SIZE, CORPUS_BAND, seed))
        .collect()
}

/// Band-limited resampling of a periodic image to `factor` times its size,
/// done exactly in the frequency domain. Used as the continuous reference.
pub fn fourier_upsample(img: &ImageTensor, factor: usize) -> Result<ImageTensor> {
    let n = require_square_plane(img)?;
    if img.channels() != 1 {
        return Err(Error::Shape("fourier_upsample takes one channel".into()));
    }
    let m = n * factor;
    let spec = plane_spectrum(img.plane(0), n);
    let mut big = vec![Complex64::new(0.0, 0.0); m * m];
    for k1 in 0..n {
        for k2 in 0..n {
            let (s1, s2) = (signed(k1, n), signed(k2, n));
            // Drop the unpaired Nyquist bin of even sizes.
            if 2 * s1.unsigned_abs() as usize == n || 2 * s2.unsigned_abs() as usize == n {
                continue;
            }
            let y = s1.rem_euclid(m as i64) as usize;
            let x = s2.rem_euclid(m as i64) as usize;
            big[y * m + x] = spec.data[k1 * n + k2];
        }
    }
    let scale = (factor * factor) as f64;
    let up = idft2_real(&SpectrumGrid { n: m, data: big });
    Ok(up.scale(scale))
}

/// Ideal low-pass back onto an `n × n` grid from a grid `factor` times finer.
pub fn fourier_downsample(img: &ImageTensor, factor: usize) -> Result<ImageTensor> {
    let m = require_square_plane(img)?;
    if img.channels() != 1 || m % factor != 0 {
        return Err(Error::Shape(format!("cannot reduce {m}x{m} by {factor}")));
    }
    let n = m / factor;
    let spec = plane_spectrum(img.plane(0), m);
    let mut small = vec![Complex64::new(0.0, 0.0); n * n];
    for k1 in 0..n {
        for k2 in 0..n {
            let (s1, s2) = (signed(k1, n), signed(k2, n));
            if 2 * s1.unsigned_abs() as usize == n || 2 * s2.unsigned_abs() as usize == n {
                continue;
            }
            let y = s1.rem_euclid(m as i64) as usize;
            let x = s2.rem_euclid(m as i64) as usize;
            small[k1 * n + k2] = spec.data[y * m + x];
        }
    }
    let scale = 1.0 / (factor * factor) as f64;
    Ok(idft2_real(&SpectrumGrid { n, data: small }).scale(scale))
}

/// The nonlinearity applied to the continuous band-limited interpolant of
/// `img` (approximated on a grid 4× finer) and ideally low-passed back to
/// the original grid. This is what an alias-free pointwise nonlinearity
/// would return.
pub fn ideal_activation(img: &ImageTensor, act: Activation) -> Result<ImageTensor> {
    const OVERSAMPLE: usize = 4;
    let fine = fourier_upsample(img, OVERSAMPLE)?;
    fourier_downsample(&apply_pointwise(&fine, act), OVERSAMPLE)
}

/// Energy of `output − reference` relative to the reference energy.
pub fn residual_energy(output: &ImageTensor, reference: &ImageTensor) -> f64 {
    let r = output.relative_l2(reference);
    r * r
}

/// Pipeline variant: A is the max-pool / bilinear baseline; B swaps in
/// filtered resampling; C wraps the nonlinearity in 2× filtered
/// resampling; D does both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigKind {
    A,
    B,
    C,
    D,
}

/// Window shape and normalization carried by configs B–D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub beta: f64,
    pub normalized: bool,
}

impl FilterParams {
    pub fn spec(&self) -> FilterSpec {
        FilterSpec::new(self.beta, self.normalized)
    }
}

/// A named configuration such as `A`, `B-0`, `C-1N` or `D-2N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    kind: ConfigKind,
    filter: Option<FilterParams>,
}

impl PipelineConfig {
    pub fn baseline() -> Self {
        Self {
            kind: ConfigKind::A,
            filter: None,
        }
    }

    /// Config A rejects filter parameters; B–D require them.
    pub fn new(kind: ConfigKind, filter: Option<FilterParams>) -> Result<Self> {
        match (kind, filter) {
            (ConfigKind::A, None) => Ok(Self::baseline()),
            (ConfigKind::A, Some(_)) => Err(Error::Domain("config A carries no filter".into())),
            (_, None) => Err(Error::Domain(format!("config {kind:?} needs filter parameters"))),
            (_, Some(f)) => {
                f.spec().validate()?;
                Ok(Self { kind, filter })
            }
        }
    }

    pub fn with_filter(kind: ConfigKind, beta: f64, normalized: bool) -> Result<Self> {
        Self::new(kind, Some(FilterParams { beta, normalized }))
    }

    pub fn kind(&self) -> ConfigKind {
        self.kind
    }

    pub fn filter(&self) -> Option<FilterParams> {
        self.filter
    }

    fn kernel(&self) -> Result<Option<Kernel2D>> {
        self.filter.map(|f| design_kernel(&f.spec())).transpose()
    }

    /// Downsample → nonlinearity → upsample with this config's operators.
    /// Output shape equals input shape.
    pub fn run(&self, img: &ImageTensor, act: Activation) -> Result<ImageTensor> {
        let kernel = self.kernel()?;
        let pad = PaddingMode::Reflect;
        let filtered_resampling = matches!(self.kind, ConfigKind::B | ConfigKind::D);
        let wrapped = matches!(self.kind, ConfigKind::C | ConfigKind::D);

        let down = match &kernel {
            Some(k) if filtered_resampling => downsample2x_af(img, k, pad)?,
            _ => downsample2x_naive(img)?,
        };
        let activated = match &kernel {
            Some(k) if wrapped => wrapped_activation(&down, act, k, pad)?,
            _ => apply_pointwise(&down, act),
        };
        match &kernel {
            Some(k) if filtered_resampling => upsample2x_af(&activated, k, pad),
            _ => upsample2x_naive(&activated),
        }
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(p) = self.filter {
            write!(f, "-{}", p.beta)?;
            if p.normalized {
                f.write_str("N")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PipelineConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse { offset: 0, message };
        let s = s.trim();
        let s = s.strip_prefix("Config").map(str::trim_start).unwrap_or(s);
        let s = s.strip_prefix('.').map(str::trim_start).unwrap_or(s);
        let (head, tail) = match s.split_once('-') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let kind = match head {
            "A" => ConfigKind::A,
            "B" => ConfigKind::B,
            "C" => ConfigKind::C,
            "D" => ConfigKind::D,
            _ => return Err(bad(format!("unknown configuration {s:?}"))),
        };
        let filter = match tail {
            None => None,
            Some(t) => {
                let (num, normalized) = match t.strip_suffix('N') {
                    Some(n) => (n, true),
                    None => (t, false),
                };
                let beta: f64 = num.parse().map_err(|_| bad(format!("invalid Kaiser beta in {s:?}")))?;
                Some(FilterParams { beta, normalized })
            }
        };
        PipelineConfig::new(kind, filter)
    }
}

/// Relative L2 distance between `pipeline(rotate(img, φ))` and
/// `rotate(pipeline(img), φ)`, both rotations with edge replication.
///
/// Only pixels inside the inscribed disk (distance from the center at most
/// `(min(H, W) − 1)/2`) are compared: outside it the rotation extrapolates
/// and neither side carries image content.
pub fn equivariance_error(config: &PipelineConfig, img: &ImageTensor, phi: f64) -> Result<f64> {
    equivariance_error_with(config, img, phi, Activation::ReLU)
}

pub fn equivariance_error_with(config: &PipelineConfig, img: &ImageTensor, phi: f64, act: Activation) -> Result<f64> {
    let params = RotationParams::new(phi, Fill::ReplicateEdge);
    let rotated_first = config.run(&rotate(img, params)?, act)?;
    let processed_first = rotate(&config.run(img, act)?, params)?;
    Ok(disk_relative_l2(&rotated_first, &processed_first))
}

/// `‖a − reference‖₂ / ‖reference‖₂` restricted to the inscribed disk;
/// zero when the difference vanishes there.
pub fn disk_relative_l2(a: &ImageTensor, reference: &ImageTensor) -> f64 {
    assert_eq!(a.shape(), reference.shape());
    let (h, w) = (a.height(), a.width());
    let cy = (h as f64 - 1.0) / 2.0;
    let cx = (w as f64 - 1.0) / 2.0;
    let radius = (h.min(w) as f64 - 1.0) / 2.0;
    let (mut num, mut den) = (0.0, 0.0);
    for c in 0..a.channels() {
        for r in 0..h {
            for k in 0..w {
                let (dy, dx) = (r as f64 - cy, k as f64 - cx);
                if dy * dy + dx * dx <= radius * radius {
                    let (u, v) = (a.get(c, r, k), reference.get(c, r, k));
                    num += (u - v) * (u - v);
                    den += v * v;
                }
            }
        }
    }
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).sqrt()
    }
}

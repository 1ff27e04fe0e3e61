//! Command-line grammar.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::str::FromStr;

use aliasfree::activation::Activation;
use aliasfree::diffusion::SigmaMode;
use aliasfree::filter::FilterSpec;
use aliasfree::resample::PaddingMode;
use aliasfree::rotation::Fill;
use aliasfree::spectral::{ConfigKind, PipelineConfig};
use aliasfree::Shape;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "aliasfree",
    version,
    about = "Alias-free resampling, spectral analysis and diffusion sampling"
)]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (a directory for `sample`). Text outputs go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a windowed jinc kernel and print its taps.
    Kernel(KernelArgs),
    /// Frequency response magnitude of a kernel as CSV.
    Freq(FreqArgs),
    /// Halve or double the resolution of an image.
    Resample(ResampleArgs),
    /// Apply a pointwise nonlinearity, optionally wrapped in 2x resampling.
    Activate(ActivateArgs),
    /// Rotate an image about its center.
    Rotate(RotateArgs),
    /// Draw images with the reverse diffusion process.
    Sample(SampleArgs),
    /// Aliasing or equivariance report over the built-in corpus or given images.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    /// Kaiser window shape parameter.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Rescale the taps to sum to one.
    #[arg(long)]
    pub normalized: bool,
    /// Odd kernel side length.
    #[arg(long, default_value_t = 3)]
    pub size: usize,
    /// Cutoff in radians per sample: a decimal or `half-pi`.
    #[arg(long, default_value = "half-pi", value_parser = parse_angle)]
    pub cutoff: f64,
}

impl KernelArgs {
    pub fn spec(&self) -> FilterSpec {
        FilterSpec {
            cutoff: self.cutoff,
            kernel_size: self.size,
            kaiser_beta: self.beta,
            normalized: self.normalized,
        }
    }
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Read the taps from a kernel text file instead of designing them.
    #[arg(long)]
    pub taps: Option<PathBuf>,
    /// DFT grid size.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Naive,
    Af,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Padding {
    Reflect,
    Zero,
}

impl From<Padding> for PaddingMode {
    fn from(p: Padding) -> Self {
        match p {
            Padding::Reflect => PaddingMode::Reflect,
            Padding::Zero => PaddingMode::Zero,
        }
    }
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    /// Input PGM/PPM image.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Af)]
    pub mode: Mode,
    #[arg(long, value_enum)]
    pub dir: Direction,
    #[arg(long, value_enum, default_value_t = Padding::Reflect)]
    pub padding: Padding,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Args)]
pub struct ActivateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "relu", value_parser = parse_from_str::<Activation>)]
    pub act: Activation,
    /// Upsample, activate, then downsample with the kernel below.
    #[arg(long)]
    pub wrapped: bool,
    #[arg(long, value_enum, default_value_t = Padding::Reflect)]
    pub padding: Padding,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Args)]
pub struct RotateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Counter-clockwise angle in radians.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
    /// `replicate` or `zero`.
    #[arg(long, default_value = "replicate", value_parser = parse_from_str::<Fill>)]
    pub fill: Fill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Classical,
    Rotated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sigma {
    Beta,
    Zero,
}

impl From<Sigma> for SigmaMode {
    fn from(s: Sigma) -> Self {
        match s {
            Sigma::Beta => SigmaMode::Beta,
            Sigma::Zero => SigmaMode::Zero,
        }
    }
}

/// Noise predictor used by `sample`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DenoiserChoice {
    Zero,
    Constant(f64),
    Gaussian { mu: f64, sigma0: f64 },
}

impl FromStr for DenoiserChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "zero" if rest.is_empty() => Ok(DenoiserChoice::Zero),
            "constant" => rest
                .parse()
                .map(DenoiserChoice::Constant)
                .map_err(|_| format!("expected constant:<value>, got {s:?}")),
            "gaussian" => {
                let (mut mu, mut sigma0) = (None, None);
                for part in rest.split(',') {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| format!("expected key=value in {part:?}"))?;
                    let value: f64 = value.parse().map_err(|_| format!("bad number {value:?}"))?;
                    match key {
                        "mu" => mu = Some(value),
                        "sigma0" => sigma0 = Some(value),
                        _ => return Err(format!("unknown gaussian parameter {key:?}")),
                    }
                }
                match (mu, sigma0) {
                    (Some(mu), Some(sigma0)) => Ok(DenoiserChoice::Gaussian { mu, sigma0 }),
                    _ => Err("gaussian needs mu=<v>,sigma0=<v>".into()),
                }
            }
            _ => Err(format!(
                "unknown denoiser {s:?}; use zero, constant:<v> or gaussian:mu=<v>,sigma0=<v>"
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = SamplerKind::Classical)]
    pub config: SamplerKind,
    /// Number of diffusion steps.
    #[arg(long = "T", default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub beta_start: f64,
    #[arg(long, default_value_t = 0.02)]
    pub beta_end: f64,
    /// Image shape as CxHxW (C is 1 or 3).
    #[arg(long, default_value = "1x8x8", value_parser = parse_from_str::<Shape>)]
    pub shape: Shape,
    #[arg(long, default_value = "zero", value_parser = parse_from_str::<DenoiserChoice>)]
    pub denoiser: DenoiserChoice,
    /// Number of trajectories.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Total rotation for `--config rotated`.
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value_t = Sigma::Beta)]
    pub sigma: Sigma,
    #[arg(long, default_value = "replicate", value_parser = parse_from_str::<Fill>)]
    pub fill: Fill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Alias,
    Equivariance,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub report: Report,
    /// A, B, C or D, or a full name such as `D-1N`.
    #[arg(long, default_value = "A")]
    pub pipeline: String,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub normalized: bool,
    /// Rotation angle for the equivariance report.
    #[arg(long, default_value = "0.7853981633974483", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value = "relu", value_parser = parse_from_str::<Activation>)]
    pub act: Activation,
    /// Square single-channel images to analyze instead of the built-in corpus.
    #[arg(long = "in", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
}

impl AnalyzeArgs {
    pub fn pipeline_config(&self) -> Result<PipelineConfig, String> {
        let kind = match self.pipeline.as_str() {
            "A" => Some(ConfigKind::A),
            "B" => Some(ConfigKind::B),
            "C" => Some(ConfigKind::C),
            "D" => Some(ConfigKind::D),
            _ => None,
        };
        match kind {
            Some(ConfigKind::A) if self.beta.is_some() || self.normalized => {
                Err("pipeline A takes no filter parameters".into())
            }
            Some(ConfigKind::A) => Ok(PipelineConfig::baseline()),
            Some(kind) => {
                PipelineConfig::with_filter(kind, self.beta.unwrap_or(0.0), self.normalized).map_err(|e| e.to_string())
            }
            None if self.beta.is_some() || self.normalized => Err(format!(
                "{:?} already names its filter; drop --beta/--normalized",
                self.pipeline
            )),
            None => self.pipeline.parse().map_err(|e: aliasfree::Error| e.to_string()),
        }
    }
}

/// Radians as a decimal, or one of `half-pi`, `pi`, `-half-pi`, `-pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) if rest.chars().next().is_some_and(char::is_alphabetic) => (-1.0, rest),
        _ => (1.0, s),
    };
    let v = match body {
        "half-pi" => FRAC_PI_2,
        "pi" => std::f64::consts::PI,
        _ => {
            return s
                .parse::<f64>()
                .map_err(|_| format!("expected radians or half-pi, got {s:?}"))
                .and_then(finite)
        }
    };
    Ok(sign * v)
}

fn finite(v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("angle must be finite, got {v}"))
    }
}

fn parse_from_str<T>(s: &str) -> Result<T, String>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

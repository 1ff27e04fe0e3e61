//! Subcommand implementations.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use aliasfree::activation::{apply_pointwise, wrapped_activation};
use aliasfree::diffusion::{
    analytic_gaussian_denoiser, linear_schedule, sample_classical, sample_rotated, ConstantDenoiser, Denoiser,
    GaussianDataSpec, ZeroDenoiser,
};
use aliasfree::io::{read_raster, write_raster, RasterFormat};
use aliasfree::resample::{downsample2x_af, downsample2x_naive, upsample2x_af, upsample2x_naive};
use aliasfree::rotation::{rotate, RotationParams};
use aliasfree::spectral::{alias_energy, equivariance_error_with, freq_response, standard_corpus};
use aliasfree::{design_kernel, ImageTensor, Kernel2D, Rng};
use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::args::*;

/// Bad flag combinations found after parsing; reported like parse errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Kernel(args) => {
            let kernel = design_kernel(&args.spec())?;
            emit_text(out, &kernel.to_text())
        }
        Command::Freq(args) => {
            let kernel = match &args.taps {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    Kernel2D::from_text(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => design_kernel(&args.kernel.spec())?,
            };
            emit_text(out, &freq_response(&kernel, args.n)?.to_csv())
        }
        Command::Resample(args) => {
            let img = load(&args.input)?;
            let result = match (args.mode, args.dir) {
                (Mode::Naive, Direction::Down) => downsample2x_naive(&img)?,
                (Mode::Naive, Direction::Up) => upsample2x_naive(&img)?,
                (Mode::Af, dir) => {
                    let kernel = design_kernel(&args.kernel.spec())?;
                    match dir {
                        Direction::Down => downsample2x_af(&img, &kernel, args.padding.into())?,
                        Direction::Up => upsample2x_af(&img, &kernel, args.padding.into())?,
                    }
                }
            };
            emit_image(out, &result)
        }
        Command::Activate(args) => {
            let img = load(&args.input)?;
            let result = if args.wrapped {
                let kernel = design_kernel(&args.kernel.spec())?;
                wrapped_activation(&img, args.act, &kernel, args.padding.into())?
            } else {
                apply_pointwise(&img, args.act)
            };
            emit_image(out, &result)
        }
        Command::Rotate(args) => {
            let img = load(&args.input)?;
            emit_image(out, &rotate(&img, RotationParams::new(args.phi, args.fill))?)
        }
        Command::Sample(args) => sample(args, cli.seed, out),
        Command::Analyze(args) => emit_text(out, &analyze(args)?),
    }
}

fn load(path: &Path) -> Result<ImageTensor> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_raster(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_image(out: Option<&Path>, img: &ImageTensor) -> Result<()> {
    let path = out.ok_or_else(|| usage("this subcommand writes an image; pass --out <file>"))?;
    let format = RasterFormat::for_channels(img.channels())?;
    let bytes = write_raster(img, format)?;
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn sample(args: &SampleArgs, seed: u64, out: Option<&Path>) -> Result<()> {
    let dir = out.ok_or_else(|| usage("sample writes one image per trajectory; pass --out <directory>"))?;
    if args.config == SamplerKind::Classical && args.phi != 0.0 {
        return Err(usage("--phi only applies to --config rotated"));
    }
    let format = RasterFormat::for_channels(args.shape.channels)?;
    let sched = linear_schedule(args.steps, args.beta_start, args.beta_end, args.sigma.into())?;
    let denoiser: Box<dyn Denoiser> = match args.denoiser {
        DenoiserChoice::Zero => Box::new(ZeroDenoiser),
        DenoiserChoice::Constant(v) => Box::new(ConstantDenoiser(v)),
        DenoiserChoice::Gaussian { mu, sigma0 } => Box::new(analytic_gaussian_denoiser(
            GaussianDataSpec::new(mu, sigma0, args.shape)?,
            &sched,
        )),
    };
    let images: Vec<Vec<u8>> = (0..args.n)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::new(seed ^ i as u64);
            let x0 = match args.config {
                SamplerKind::Classical => sample_classical(&denoiser, &sched, args.shape, &mut rng)?,
                SamplerKind::Rotated => sample_rotated(&denoiser, &sched, args.shape, args.phi, &mut rng, args.fill)?,
            };
            Ok(write_raster(&x0, format)?)
        })
        .collect::<Result<_>>()?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, bytes) in images.iter().enumerate() {
        let path = dir.join(sample_name(i, format));
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn sample_name(i: usize, format: RasterFormat) -> PathBuf {
    PathBuf::from(format!("sample_{i:03}.{}", format.extension()))
}

fn analyze(args: &AnalyzeArgs) -> Result<String> {
    let config = args.pipeline_config().map_err(usage)?;
    let images = if args.inputs.is_empty() {
        standard_corpus()
    } else {
        args.inputs.iter().map(|p| load(p)).collect::<Result<_>>()?
    };
    let mut csv = String::new();
    match args.report {
        Report::Alias => {
            csv.push_str("image,pipeline,input_alias,output_alias\n");
            for (i, img) in images.iter().enumerate() {
                let output = config.run(img, args.act)?;
                let before = alias_energy(img, FRAC_PI_2)?;
                let after = alias_energy(&output, FRAC_PI_2)?;
                writeln!(csv, "{i},{config},{before:?},{after:?}")?;
            }
        }
        Report::Equivariance => {
            if !args.phi.is_finite() {
                bail!("rotation angle must be finite");
            }
            csv.push_str("image,pipeline,phi,error\n");
            for (i, img) in images.iter().enumerate() {
                let err = equivariance_error_with(&config, img, args.phi, args.act)?;
                writeln!(csv, "{i},{config},{:?},{err:?}", args.phi)?;
            }
        }
    }
    Ok(csv)
}

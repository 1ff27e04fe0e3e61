mod common;

use std::f64::consts::FRAC_PI_2;

use aliasfree::diffusion::*;
use aliasfree::rotation::{rotate, Fill, RotationParams};
use aliasfree::{ImageTensor, Rng, Shape};
use common::{linear_betas, reverse_moments};

fn gaussian() -> GaussianDataSpec {
    GaussianDataSpec::new(0.3, 0.05, Shape::new(1, 8, 8)).unwrap()
}

#[test]
fn schedule_matches_direct_products() {
    let betas = linear_betas(1000, 1e-4, 0.02);
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let mut prod = 1.0;
    for (i, b) in betas.iter().enumerate() {
        prod *= 1.0 - b;
        let t = i + 1;
        assert!((sched.beta(t) - b).abs() < 1e-17);
        assert!((sched.alpha_bar(t) - prod).abs() < 1e-14);
        assert!((sched.sigma(t) - b.sqrt()).abs() < 1e-15);
    }
    assert_eq!(NoiseSchedule::standard(SigmaMode::Zero).sigma(500), 0.0);
    assert!(linear_schedule(0, 1e-4, 0.02, SigmaMode::Beta).is_err());
    assert!(linear_schedule(10, 0.0, 0.02, SigmaMode::Beta).is_err());
    assert!(linear_schedule(10, 1e-4, 1.0, SigmaMode::Beta).is_err());
}

#[test]
fn forward_noise_mixes_signal_and_noise() {
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let x0 = ImageTensor::filled(Shape::new(1, 2, 2), 0.5);
    let eps = ImageTensor::filled(Shape::new(1, 2, 2), -1.0);
    let t = 250;
    let ab = sched.alpha_bar(t);
    let x = forward_noise(&x0, t, &eps, &sched).unwrap();
    for v in x.as_slice() {
        assert!((v - (ab.sqrt() * 0.5 - (1.0 - ab).sqrt())).abs() < 1e-15);
    }
    assert!(forward_noise(&x0, 0, &eps, &sched).is_err());
    assert!(forward_noise(&x0, 1001, &eps, &sched).is_err());
    let wrong = ImageTensor::zeros(Shape::new(1, 3, 2));
    assert!(forward_noise(&x0, 1, &wrong, &sched).is_err());
}

#[test]
fn analytic_denoiser_limits() {
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let den = analytic_gaussian_denoiser(gaussian(), &sched);
    for t in [1, 10, 500, 1000] {
        let mean = ImageTensor::filled(gaussian().shape, sched.alpha_bar(t).sqrt() * 0.3);
        assert!(den.predict(&mean, t).as_slice().iter().all(|v| v.abs() < 1e-15));
    }
    // With a vanishing data spread the prediction inverts the forward map.
    let sharp = GaussianDataSpec::new(0.3, 1e-12, Shape::new(1, 2, 2)).unwrap();
    let den = analytic_gaussian_denoiser(sharp, &sched);
    let x0 = ImageTensor::filled(Shape::new(1, 2, 2), 0.3);
    let eps = ImageTensor::from_rows(&[vec![0.4, -1.2], vec![2.0, 0.0]]).unwrap();
    for t in [3, 300, 1000] {
        let x_t = forward_noise(&x0, t, &eps, &sched).unwrap();
        assert!(den.predict(&x_t, t).max_abs_diff(&eps) < 1e-9);
    }
}

#[test]
fn analytic_coefficient_matches_regression() {
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let data = GaussianDataSpec::new(0.3, 0.05, Shape::new(1, 1, 1)).unwrap();
    let t = 500;
    let ab = sched.alpha_bar(t);
    let mut rng = Rng::new(2024);
    let n = 100_000;
    let (mut sx, mut se, mut sxx, mut sxe) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let x0 = 0.3 + 0.05 * rng.standard_normal();
        let e = rng.standard_normal();
        let x = ab.sqrt() * x0 + (1.0 - ab).sqrt() * e;
        sx += x;
        se += e;
        sxx += x * x;
        sxe += x * e;
    }
    let n = n as f64;
    let slope = (sxe - sx * se / n) / (sxx - sx * sx / n);
    let coef = analytic_gaussian_denoiser(data, &sched).coefficient(t);
    assert!(((slope - coef) / coef).abs() < 5e-4, "{slope} vs {coef}");
}

#[test]
fn zero_denoiser_telescopes() {
    let sched = NoiseSchedule::standard(SigmaMode::Zero);
    let shape = Shape::new(2, 4, 4);
    let x_t = Rng::new(1).normal_image(shape);
    let x0 = sample_classical_from(&ZeroDenoiser, &sched, x_t.clone(), &mut Rng::new(9)).unwrap();
    let scaled = x0.scale(sched.alpha_bar(1000).sqrt());
    assert!(scaled.relative_l2(&x_t) <= 1e-9);

    let one = linear_schedule(1, 0.3, 0.3, SigmaMode::Zero).unwrap();
    let x0 = sample_classical_from(&ZeroDenoiser, &one, x_t.clone(), &mut Rng::new(9)).unwrap();
    assert!(x0.max_abs_diff(&x_t.scale(1.0 / 0.7f64.sqrt())) < 1e-15);
}

#[test]
fn sampling_is_reproducible() {
    let sched = linear_schedule(50, 1e-4, 0.02, SigmaMode::Beta).unwrap();
    let den = analytic_gaussian_denoiser(gaussian(), &sched);
    let a = sample_classical(&den, &sched, gaussian().shape, &mut Rng::new(5)).unwrap();
    let b = sample_classical(&den, &sched, gaussian().shape, &mut Rng::new(5)).unwrap();
    let c = sample_classical(&den, &sched, gaussian().shape, &mut Rng::new(6)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let r = sample_rotated(
        &den,
        &sched,
        gaussian().shape,
        0.0,
        &mut Rng::new(5),
        Fill::ReplicateEdge,
    )
    .unwrap();
    assert_eq!(r.as_slice(), a.as_slice());
}

#[test]
fn rotated_zero_denoiser_is_scaled_rotation_chain() {
    let sched = linear_schedule(8, 1e-4, 0.02, SigmaMode::Zero).unwrap();
    let x_t = Rng::new(3).normal_image(Shape::new(1, 9, 9));
    let out = sample_rotated_from(
        &ZeroDenoiser,
        &sched,
        x_t.clone(),
        FRAC_PI_2,
        &mut Rng::new(0),
        Fill::ReplicateEdge,
    )
    .unwrap();
    let mut chain = x_t;
    for t in (1..=8).rev() {
        chain = chain.scale(1.0 / sched.alpha(t).sqrt());
        chain = rotate(&chain, RotationParams::new(FRAC_PI_2 / 8.0, Fill::ReplicateEdge)).unwrap();
    }
    assert!(out.max_abs_diff(&chain) < 1e-12);
    assert_eq!(per_step_angle(FRAC_PI_2, 1000), FRAC_PI_2 / 1000.0);
}

#[test]
fn short_chain_moments_match_recursion() {
    // 64 short chains × 64 elements; the recursion gives the exact law.
    let betas = linear_betas(100, 1e-3, 0.1);
    let sched = NoiseSchedule::from_betas(betas.clone(), SigmaMode::Beta).unwrap();
    let den = analytic_gaussian_denoiser(gaussian(), &sched);
    let (mean, var) = reverse_moments(&betas, true, 0.3, 0.05);
    let mut values = Vec::new();
    for i in 0..64u64 {
        let x = sample_classical(&den, &sched, gaussian().shape, &mut Rng::new(i)).unwrap();
        values.extend_from_slice(x.as_slice());
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let v = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    assert!((m - mean).abs() < 4.0 * (var / n).sqrt(), "{m} vs {mean}");
    assert!((v - var).abs() < 4.0 * var * (2.0 / (n - 1.0)).sqrt(), "{v} vs {var}");
}

#[test]
fn training_objective_prefers_the_analytic_denoiser() {
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let data = gaussian();
    let den = analytic_gaussian_denoiser(data, &sched);
    let base = training_loss(&den, &data, &sched, 500, &mut Rng::new(1)).unwrap();
    for delta in [-0.5, 0.5] {
        let off = OffsetDenoiser {
            inner: &den,
            offset: delta,
        };
        let worse = training_loss(&off, &data, &sched, 500, &mut Rng::new(1)).unwrap();
        assert!(worse > base);
    }
    assert!(training_loss(&den, &data, &sched, 0, &mut Rng::new(1)).is_err());
    let zero = training_loss(&ZeroDenoiser, &data, &sched, 500, &mut Rng::new(1)).unwrap();
    assert!(zero > base);
}

#[test]
fn training_draw_order_is_fixed() {
    let sched = NoiseSchedule::standard(SigmaMode::Beta);
    let data = gaussian();
    let draw = TrainingDraw::sample(&data, &sched, &mut Rng::new(12));
    let mut rng = Rng::new(12);
    let x0 = data.sample(&mut rng);
    let t = rng.uniform_inclusive(1, 1000);
    let eps = rng.normal_image(data.shape);
    assert_eq!((draw.x0, draw.t, draw.eps), (x0, t, eps));
}

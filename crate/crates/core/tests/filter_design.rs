use std::f64::consts::{FRAC_PI_2, PI};

use aliasfree::filter::{design_kernel, jinc_tap, kaiser_weight, FilterSpec};
use aliasfree::special::{bessel_i0, jinc};
use aliasfree::spectral::{freq_response, nyquist_gain};

fn design_grid() -> Vec<FilterSpec> {
    let mut specs = Vec::new();
    for beta in [0.0, 1.0, 2.0] {
        for normalized in [false, true] {
            specs.push(FilterSpec::new(beta, normalized));
        }
    }
    specs
}

#[test]
fn taps_follow_the_closed_form() {
    for spec in design_grid() {
        let k = design_kernel(&spec).unwrap();
        let raw: Vec<f64> = (-1..=1i64)
            .flat_map(|a| (-1..=1i64).map(move |b| (a, b)))
            .map(|(a, b)| {
                let rho = ((a * a + b * b) as f64).sqrt();
                let ideal = FRAC_PI_2 * FRAC_PI_2 / (2.0 * PI) * jinc(FRAC_PI_2 * rho).unwrap();
                let w = |n: i64| {
                    bessel_i0(spec.kaiser_beta * (1.0 - (n * n) as f64).max(0.0).sqrt()).unwrap()
                        / bessel_i0(spec.kaiser_beta).unwrap()
                };
                ideal * w(a) * w(b)
            })
            .collect();
        let total: f64 = raw.iter().sum();
        for (got, want) in k.taps().iter().zip(&raw) {
            let want = if spec.normalized { want / total } else { *want };
            assert!((got - want).abs() < 1e-15, "{spec:?}");
        }
    }
}

#[test]
fn center_tap_uses_the_limit() {
    let spec = FilterSpec::default();
    assert_eq!(jinc_tap(&spec, 0, 0).unwrap(), PI / 16.0);
    let other = FilterSpec { cutoff: 1.0, ..spec };
    assert!((jinc_tap(&other, 0, 0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-16);
}

#[test]
fn window_is_symmetric_and_bounded() {
    for beta in [0.0, 0.5, 1.0, 2.0, 8.0] {
        for extent in [2.0, 4.0, 6.0] {
            for n in -4..=4i64 {
                let w = kaiser_weight(beta, n, extent).unwrap();
                assert_eq!(w, kaiser_weight(beta, -n, extent).unwrap());
                assert!((0.0..=1.0).contains(&w));
            }
        }
    }
}

#[test]
fn dc_exceeds_nyquist_response() {
    for spec in design_grid() {
        let k = design_kernel(&spec).unwrap();
        let h = freq_response(&k, 16).unwrap();
        assert!(h.magnitude(8, 8) < h.magnitude(0, 0), "{spec:?}");
        assert!((h.at(8, 8).re - nyquist_gain(&k)).abs() < 1e-14);
    }
}

#[test]
fn larger_kernels_stay_symmetric() {
    for size in [5, 7, 9] {
        for beta in [0.0, 3.0] {
            let spec = FilterSpec {
                kernel_size: size,
                ..FilterSpec::new(beta, true)
            };
            let k = design_kernel(&spec).unwrap();
            assert!(k.is_symmetric());
            assert!((k.sum() - 1.0).abs() < 1e-12);
        }
    }
}

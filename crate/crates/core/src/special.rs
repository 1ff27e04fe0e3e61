//! Bessel-family scalar functions used by the filter designer.
//!
//! `J₁` is summed from its power series up to [`SERIES_LIMIT`] and from
//! the Hankel asymptotic expansion beyond it. `I₀` has no cancellation
//! in its series and is summed directly everywhere.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{ensure_finite, Result};

/// Largest |x| evaluated with the J₁ power series.
pub const SERIES_LIMIT: f64 = 12.0;

/// Below this |x|, jinc uses its two-term Taylor expansion.
const JINC_TAYLOR_LIMIT: f64 = 1e-4;

const MAX_TERMS: usize = 200;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    ensure_finite(x, "bessel_j1 argument")?;
    Ok(j1_unchecked(x))
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    ensure_finite(x, "bessel_i0 argument")?;
    Ok(i0_unchecked(x))
}

/// `J₁(x)/x`, continued by its limit `1/2` at the origin.
pub fn jinc(x: f64) -> Result<f64> {
    ensure_finite(x, "jinc argument")?;
    Ok(jinc_unchecked(x))
}

pub(crate) fn jinc_unchecked(x: f64) -> f64 {
    if x.abs() < JINC_TAYLOR_LIMIT {
        0.5 - x * x / 16.0
    } else {
        j1_unchecked(x) / x
    }
}

pub(crate) fn j1_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        j1_series(ax)
    } else {
        j1_asymptotic(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

// Σ (−1)^k (x/2)^{2k+1} / (k!(k+1)!)
fn j1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for k in 1..MAX_TERMS {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

// Hankel expansion: J₁(x) = √(2/(πx)) · (P cos χ − Q sin χ), χ = x − 3π/4.
// The series is asymptotic, so summation stops at the smallest term.
fn j1_asymptotic(x: f64) -> f64 {
    const MU: f64 = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (MU - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        // a_k / x^k enters P (even k) or Q (odd k) with alternating sign.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 3.0 * FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

// Σ (x²/4)^k / (k!)²
pub(crate) fn i0_unchecked(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term <= f64::EPSILON * 1e-3 * sum {
            break;
        }
    }
    sum
}

//! Unit normal helpers and Gaussian partial expectations.

use statrs::function::erf::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Unit normal density.
pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Unit normal cumulative distribution, accurate in both tails.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `E[(G - a)_+]` for `G ~ N(mean, sd^2)`.
///
/// Falls back to the deterministic limit `(mean - a)_+` when `sd` is zero.
pub fn upper_partial_expectation(mean: f64, sd: f64, a: f64) -> f64 {
    if sd <= 0.0 {
        return (mean - a).max(0.0);
    }
    let lam = (a - mean) / sd;
    sd * (pdf(lam) - lam * cdf(-lam))
}

/// `E[(b - G)_+]` for `G ~ N(mean, sd^2)`.
pub fn lower_partial_expectation(mean: f64, sd: f64, b: f64) -> f64 {
    if sd <= 0.0 {
        return (b - mean).max(0.0);
    }
    let lam = (b - mean) / sd;
    sd * (pdf(lam) + lam * cdf(lam))
}

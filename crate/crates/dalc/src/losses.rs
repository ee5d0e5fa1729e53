//! Probit-style loss family for linear classifiers and its derivatives.
//!
//! All losses are functions of the normalized margin `y * (w . x) / |x|`.
//! `phi` is the standard-normal upper-tail probability of the margin,
//! `phi_dis(x) = 2 * phi(x) * phi(-x)` scores the disagreement of two
//! independent posterior draws, and `phi_err(x) = phi(x)^2` scores their
//! joint error. The pointwise identity `phi_err(x) + phi_dis(x)/2 = phi(x)`
//! mirrors the decomposition of the Gibbs risk into disagreement and joint
//! error.

use crate::error::{DalcError, Result};

/// 1 / sqrt(2 * pi), the peak of the standard normal density.
const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
fn check_finite(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(DalcError::NonFinite(what))
    }
}

/// Standard-normal upper-tail probability of `x`.
///
/// Computed as `erfc(x / sqrt(2)) / 2`, which evaluates the tail directly and
/// stays accurate for large positive margins where `1 - cdf(x)` would cancel.
/// Underflows to 0 for x beyond roughly 38.
pub fn phi(x: f64) -> Result<f64> {
    check_finite(x, "phi")?;
    Ok(phi_raw(x))
}

/// Disagreement loss `2 * phi(x) * phi(-x)`. Even, peaks at 1/2 in x = 0.
pub fn phi_dis(x: f64) -> Result<f64> {
    check_finite(x, "phi_dis")?;
    Ok(phi_dis_raw(x))
}

/// Joint-error loss `phi(x)^2`. Strictly decreasing, 1/4 at x = 0.
pub fn phi_err(x: f64) -> Result<f64> {
    check_finite(x, "phi_err")?;
    Ok(phi_err_raw(x))
}

/// Derivative of `phi`: the negated standard normal density.
pub fn d_phi(x: f64) -> Result<f64> {
    check_finite(x, "d_phi")?;
    Ok(d_phi_raw(x))
}

/// Derivative of `phi_dis`: `2 * d_phi(x) * (1 - 2 * phi(x))`.
pub fn d_phi_dis(x: f64) -> Result<f64> {
    check_finite(x, "d_phi_dis")?;
    Ok(d_phi_dis_raw(x))
}

/// Derivative of `phi_err`: `2 * phi(x) * d_phi(x)`.
pub fn d_phi_err(x: f64) -> Result<f64> {
    check_finite(x, "d_phi_err")?;
    Ok(d_phi_err_raw(x))
}

// Unchecked variants for hot loops over margins that are already known to be
// finite (validated datasets, optimizer-guarded iterates).

#[inline]
pub(crate) fn phi_raw(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn phi_dis_raw(x: f64) -> f64 {
    2.0 * phi_raw(x) * phi_raw(-x)
}

#[inline]
pub(crate) fn phi_err_raw(x: f64) -> f64 {
    let p = phi_raw(x);
    p * p
}

#[inline]
pub(crate) fn d_phi_raw(x: f64) -> f64 {
    -FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub(crate) fn d_phi_dis_raw(x: f64) -> f64 {
    2.0 * d_phi_raw(x) * (1.0 - 2.0 * phi_raw(x))
}

#[inline]
pub(crate) fn d_phi_err_raw(x: f64) -> f64 {
    2.0 * phi_raw(x) * d_phi_raw(x)
}

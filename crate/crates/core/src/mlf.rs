//! One-parameter Mittag-Leffler function `E_alpha(z) = sum_k z^k / Gamma(alpha k + 1)`
//! on the real line, used as the exact solution of `D^alpha u = lambda u`.
//!
//! Evaluation strategy:
//! * `alpha = 1`: `exp(z)`.
//! * `-1 <= z <= 20`: Taylor series, terms formed through `ln Gamma` so that
//!   large positive arguments do not overflow intermediate factorials.
//! * `z < -1`: the Laplace-type representation
//!   `E_alpha(-x) = sin(alpha pi) / (alpha pi x) int_0^inf exp(-s^{1/alpha})
//!   / (1 + 2 cos(alpha pi) s/x + (s/x)^2) ds`, integrated by adaptive
//!   Gauss-Kronrod; for very large `x` the algebraic asymptotic series is
//!   used instead when its smallest term is below `1e-16` relative.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{integrate, ln_gamma, recip_gamma};

/// Largest positive argument accepted.
pub const MAX_POSITIVE_ARG: f64 = 20.0;

/// Validated `(alpha, z)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    pub z: f64,
}

impl MlParams {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Mittag-Leffler order must lie in (0, 1], got {alpha}"
            )));
        }
        if z.is_nan() {
            return Err(Error::InvalidArgument("argument is NaN".into()));
        }
        if z > MAX_POSITIVE_ARG || (z > 0.0 && z.powf(1.0 / alpha) > 700.0) {
            return Err(Error::UnsupportedDomain(format!(
                "E_{alpha}({z}) lies outside the positive-argument envelope"
            )));
        }
        if z == f64::NEG_INFINITY {
            return Err(Error::UnsupportedDomain("argument is -inf".into()));
        }
        Ok(MlParams { alpha, z })
    }

    pub fn eval(&self) -> Result<f64> {
        let MlParams { alpha, z } = *self;
        if alpha == 1.0 {
            return Ok(z.exp());
        }
        if z >= -1.0 {
            return Ok(taylor(alpha, z));
        }
        let x = -z;
        if let Some(v) = asymptotic_negative(alpha, x) {
            return Ok(v);
        }
        integral_negative(alpha, x)
    }
}

pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    MlParams::new(alpha, z)?.eval()
}

fn taylor(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let lz = z.abs().ln();
    let mut sum = 1.0;
    let mut peaked = false;
    let mut prev = f64::INFINITY;
    for k in 1..200_000 {
        let kf = k as f64;
        let mag = (kf * lz - ln_gamma(kf * alpha + 1.0)).exp();
        let term = if z < 0.0 && k % 2 == 1 { -mag } else { mag };
        sum += term;
        if mag < prev {
            peaked = true;
        }
        prev = mag;
        if peaked && mag < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `-sum_{k>=1} (-x)^{-k} / Gamma(1 - alpha k)`, if the series reaches
/// `1e-16` relative accuracy before its terms start growing.
fn asymptotic_negative(alpha: f64, x: f64) -> Option<f64> {
    if x < 50.0 {
        return None;
    }
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..=40 {
        pow *= -1.0 / x;
        let term = -pow * recip_gamma(1.0 - alpha * k as f64);
        if term == 0.0 {
            continue;
        }
        let size = term.abs();
        if size > last {
            return None;
        }
        last = size;
        sum += term;
        if size < 1e-17 * sum.abs() {
            return Some(sum);
        }
    }
    None
}

fn integral_negative(alpha: f64, x: f64) -> Result<f64> {
    let c = (alpha * PI).cos();
    let integrand = |s: f64| {
        let r = s / x;
        (-s.powf(1.0 / alpha)).exp() / (1.0 + r * (2.0 * c + r))
    };
    // exp(-s^{1/alpha}) < e^-60 beyond this point.
    let s_max = 60f64.powf(alpha);
    let split = x.min(s_max);
    let left = integrate(integrand, 0.0, split, 1e-300, 1e-14)?;
    let right = integrate(integrand, split, s_max, 1e-300, 1e-14)?;
    Ok((alpha * PI).sin() / (alpha * PI * x) * (left + right))
}

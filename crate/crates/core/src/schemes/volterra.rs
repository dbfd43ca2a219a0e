//! Quadrature weights `b` for convolutional Volterra equations
//! `u(t) = u_0 + int_0^t k(t - s) f(s, u(s)) ds`, discretized as
//! `u_n = u_0 + sum_{j=1}^n b_{n-j} f_j`.
//!
//! For the exponentially weighted kernel `k_alpha(t) e^{-gamma t}` the weights
//! are `b_j = h^alpha v_j` with `sum v_j z^j = (delta(z) + h gamma)^-alpha`.

use crate::error::{invalid, Result};
use crate::seqkit::{convolve, Seq};
use crate::special::{gamma, integrate};

use super::{binomial_series, cq_theta_weights, gl_weights, interp_weights};

/// Completely monotone convolution kernels supported by the Volterra solver.
#[derive(Debug, Clone, PartialEq)]
pub enum VolterraKernel {
    /// `k_alpha(t) = t^{alpha-1} / Gamma(alpha)`.
    StandardAlpha { alpha: f64 },
    /// `sum_i c_i k_{alpha_i}(t)`, all `c_i > 0`.
    SumOfStandard(Vec<(f64, f64)>),
    /// `k_alpha(t) e^{-gamma t}`.
    ExpWeighted { alpha: f64, gamma: f64 },
}

impl VolterraKernel {
    pub fn validate(&self) -> Result<()> {
        let order = |a: f64| {
            if a > 0.0 && a < 1.0 {
                Ok(())
            } else {
                Err(invalid(format!("kernel order must lie in (0, 1), got {a}")))
            }
        };
        match self {
            VolterraKernel::StandardAlpha { alpha } => order(*alpha),
            VolterraKernel::SumOfStandard(terms) => {
                if terms.is_empty() {
                    return Err(invalid("sum-of-standard kernel needs at least one term"));
                }
                for &(c, a) in terms {
                    if !(c > 0.0 && c.is_finite()) {
                        return Err(invalid(format!(
                            "kernel coefficient must be positive, got {c}"
                        )));
                    }
                    order(a)?;
                }
                Ok(())
            }
            VolterraKernel::ExpWeighted { alpha, gamma } => {
                order(*alpha)?;
                if !(*gamma >= 0.0 && gamma.is_finite()) {
                    return Err(invalid(format!("gamma must be >= 0, got {gamma}")));
                }
                Ok(())
            }
        }
    }

    /// Pointwise kernel value for `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        let std = |a: f64| t.powf(a - 1.0) / gamma(a);
        match self {
            VolterraKernel::StandardAlpha { alpha } => std(*alpha),
            VolterraKernel::SumOfStandard(terms) => terms.iter().map(|&(c, a)| c * std(a)).sum(),
            VolterraKernel::ExpWeighted { alpha, gamma } => std(*alpha) * (-gamma * t).exp(),
        }
    }
}

/// How the convolution integral is discretized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolterraVariant {
    /// Backward-Euler generated CQ, `delta(z) = 1 - z`.
    BackwardEulerCq,
    /// Theta-method CQ, `delta(z) = (1 - z) / (theta + (1 - theta) z)`,
    /// `theta >= 1`. `theta = 2` uses the dedicated three-sequence recurrence.
    ThetaCq { theta: f64 },
    /// Exact cell integrals `b_n = int_{t_n}^{t_{n+1}} k(t) dt`.
    PiecewiseIntegral,
}

impl VolterraVariant {
    pub fn tag(&self) -> String {
        match self {
            VolterraVariant::BackwardEulerCq => "cq-euler".into(),
            VolterraVariant::ThetaCq { theta } => format!("cq-theta-{theta}"),
            VolterraVariant::PiecewiseIntegral => "piecewise-integral".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraWeights {
    pub kernel: VolterraKernel,
    pub variant: VolterraVariant,
    pub h: f64,
    /// Quadrature weights, already including the `h^alpha` factor.
    pub b: Seq,
}

impl VolterraWeights {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_common(h: f64, n: usize) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("step must be positive, got {h}")));
    }
    if n < 2 {
        return Err(invalid(format!("need at least 2 weights, got {n}")));
    }
    Ok(())
}

fn check_theta(variant: VolterraVariant) -> Result<()> {
    if let VolterraVariant::ThetaCq { theta } = variant {
        if !(theta >= 1.0 && theta.is_finite()) {
            return Err(invalid(format!(
                "Volterra theta-CQ requires theta >= 1, got {theta}"
            )));
        }
    }
    Ok(())
}

/// Weights for any supported kernel.
///
/// Standard and sum-of-standard kernels reuse the fractional-ODE weights:
/// backward-Euler CQ is GL, theta-CQ is [`cq_theta_weights`], and the
/// piecewise integral is the interpolation scheme, each scaled by
/// `c_i h^{alpha_i}`.
pub fn volterra_weights(
    kernel: &VolterraKernel,
    variant: VolterraVariant,
    h: f64,
    n: usize,
) -> Result<VolterraWeights> {
    kernel.validate()?;
    check_common(h, n)?;
    check_theta(variant)?;
    let standard = |alpha: f64| -> Result<Seq> {
        let a = match variant {
            VolterraVariant::BackwardEulerCq => gl_weights(alpha, n)?.a,
            VolterraVariant::ThetaCq { theta } => cq_theta_weights(alpha, theta, n)?.a,
            VolterraVariant::PiecewiseIntegral => interp_weights(alpha, n)?.a,
        };
        Ok(a.scaled(h.powf(alpha)))
    };
    let b = match kernel {
        VolterraKernel::StandardAlpha { alpha } => standard(*alpha)?,
        VolterraKernel::SumOfStandard(terms) => {
            let mut acc = vec![0.0; n];
            for &(c, alpha) in terms {
                for (x, y) in acc.iter_mut().zip(standard(alpha)?.iter()) {
                    *x += c * y;
                }
            }
            Seq::new(acc)?
        }
        VolterraKernel::ExpWeighted { alpha, gamma } => {
            return volterra_exp_weights(*alpha, *gamma, h, variant, n);
        }
    };
    Ok(VolterraWeights {
        kernel: kernel.clone(),
        variant,
        h,
        b,
    })
}

/// Weights for `k_alpha(t) e^{-gamma t}`.
pub fn volterra_exp_weights(
    alpha: f64,
    gamma: f64,
    h: f64,
    variant: VolterraVariant,
    n: usize,
) -> Result<VolterraWeights> {
    let kernel = VolterraKernel::ExpWeighted { alpha, gamma };
    kernel.validate()?;
    check_common(h, n)?;
    check_theta(variant)?;
    let hg = h * gamma;
    let v = match variant {
        VolterraVariant::BackwardEulerCq => {
            // (1 - z + h gamma)^-alpha = (1 + h gamma)^-alpha (1 - z / (1 + h gamma))^-alpha
            let q = 1.0 / (1.0 + hg);
            let mut m = Vec::with_capacity(n);
            m.push(1.0);
            for k in 1..n {
                let prev = m[k - 1];
                m.push(-q * ((1.0 - alpha) / k as f64 - 1.0) * prev);
            }
            Seq::new(m)?.scaled((1.0 + hg).powf(-alpha))
        }
        VolterraVariant::ThetaCq { theta: 2.0 } => theta2_recurrence(alpha, hg, n)?,
        VolterraVariant::ThetaCq { theta } => {
            // (delta + h gamma)^-alpha
            //   = (theta / (1 + h gamma theta))^alpha (1 + (1-theta)/theta z)^alpha (1 - q z)^-alpha
            let q = (1.0 + hg * (theta - 1.0)) / (1.0 + hg * theta);
            let num = binomial_series((1.0 - theta) / theta, alpha, n);
            let den = binomial_series(-q, -alpha, n);
            convolve(&num, &den).scaled((theta / (1.0 + hg * theta)).powf(alpha))
        }
        VolterraVariant::PiecewiseIntegral => {
            let b = exp_kernel_cell_integrals(alpha, gamma, h, n)?;
            return Ok(VolterraWeights {
                kernel,
                variant,
                h,
                b,
            });
        }
    };
    Ok(VolterraWeights {
        kernel,
        variant,
        h,
        b: v.scaled(h.powf(alpha)),
    })
}

/// `v_j = ((1 + 2 h gamma) / 2)^-alpha sum_l n_{j-l} p_l`, with `n` the
/// coefficients of `(1 - q z)^-alpha`, `q = (1 + h gamma) / (1 + 2 h gamma)`,
/// and `p` those of `(1 - z/2)^alpha`.
fn theta2_recurrence(alpha: f64, hg: f64, n: usize) -> Result<Seq> {
    let q = (1.0 + hg) / (1.0 + 2.0 * hg);
    let mut nn = vec![1.0; n];
    let mut p = vec![1.0; n];
    for k in 1..n {
        let kf = k as f64;
        nn[k] = -q * ((1.0 - alpha) / kf - 1.0) * nn[k - 1];
        p[k] = -0.5 * ((1.0 + alpha) / kf - 1.0) * p[k - 1];
    }
    let v = convolve(&Seq::new(nn)?, &Seq::new(p)?);
    Ok(v.scaled(((1.0 + 2.0 * hg) / 2.0).powf(-alpha)))
}

/// `b_n = int_{nh}^{(n+1)h} t^{alpha-1} e^{-gamma t} / Gamma(alpha) dt`.
///
/// The first cell carries the `t^{alpha-1}` singularity and is integrated
/// term by term from the exponential series; the remaining cells are smooth
/// and go through adaptive Gauss-Kronrod.
fn exp_kernel_cell_integrals(alpha: f64, gamma_rate: f64, h: f64, n: usize) -> Result<Seq> {
    let g = gamma(alpha);
    let mut b = Vec::with_capacity(n);
    // sum_k (-gamma)^k / k! h^{alpha+k} / (alpha + k)
    let mut term = h.powf(alpha);
    let mut first = 0.0;
    for k in 0..400 {
        if k > 0 {
            term *= -gamma_rate * h / k as f64;
        }
        let add = term / (alpha + k as f64);
        first += add;
        if add.abs() < 1e-17 * first.abs() && k > 2 {
            break;
        }
    }
    b.push(first / g);
    let integrand = |t: f64| t.powf(alpha - 1.0) * (-gamma_rate * t).exp() / g;
    for cell in 1..n {
        let lo = cell as f64 * h;
        b.push(integrate(integrand, lo, lo + h, 1e-300, 1e-13)?);
    }
    Seq::new(b)
}

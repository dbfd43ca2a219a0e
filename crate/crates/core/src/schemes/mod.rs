//! Weight generators for the CM-preserving discretizations of the Caputo
//! derivative and the Riemann-Liouville integral.
//!
//! Every scheme is described by a pair `(omega, a)` of mutually inverse
//! convolution sequences. `omega` discretizes the derivative,
//! `(D_h u)_n = h^-alpha sum_j omega_j (u_{n-j} - u_0)`, and `a` the
//! fractional integral, `u_n = u_0 + h^alpha sum_{j<n} a_j f_{n-j}`.

use std::fmt;

use crate::error::{invalid, Result};
use crate::seqkit::{conv_inverse, convolve, miller_power, CompensatedSum, Seq};
use crate::special::gamma;

pub mod volterra;

pub use volterra::{
    volterra_exp_weights, volterra_weights, VolterraKernel, VolterraVariant, VolterraWeights,
};

/// Which discretization produced a weight pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    /// Grunwald-Letnikov: `F_a(z) = (1 - z)^-alpha`.
    Gl,
    L1,
    /// Piecewise-constant interpolation of the right-hand side in the
    /// Volterra form: `a_n` are exact integrals of the kernel over cells.
    PiecewiseInterp,
    /// Convolution quadrature generated by the theta-method, `theta >= 1`.
    CqTheta {
        theta: f64,
    },
    /// `F_a(z) = (1 - z)^-alpha + c / (1 - t1 z)`: CM, but with a stability
    /// wedge that shrinks as `c` grows.
    Counterexample {
        c: f64,
        t1: f64,
    },
    /// Theta-method CQ with `0 < theta < 1`. Not CM-preserving; kept for
    /// negative controls only.
    Trapezoid {
        theta: f64,
    },
}

impl SchemeKind {
    pub fn is_cm_preserving(&self) -> bool {
        !matches!(self, SchemeKind::Trapezoid { .. })
    }

    /// Short machine-readable tag.
    pub fn tag(&self) -> String {
        match self {
            SchemeKind::Gl => "gl".into(),
            SchemeKind::L1 => "l1".into(),
            SchemeKind::PiecewiseInterp => "interp".into(),
            SchemeKind::CqTheta { theta } => format!("cq-theta-{theta}"),
            SchemeKind::Counterexample { c, t1 } => format!("counterexample-c{c}-t{t1}"),
            SchemeKind::Trapezoid { theta } => format!("trapezoid-theta-{theta}"),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// A `(omega, a)` weight pair for one scheme at one fractional order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeWeights {
    pub alpha: f64,
    pub kind: SchemeKind,
    pub omega: Seq,
    pub a: Seq,
    /// False for every homogeneous fractional-ODE scheme in this module.
    pub h_dependent: bool,
}

impl SchemeWeights {
    pub fn build(kind: SchemeKind, alpha: f64, n: usize) -> Result<Self> {
        match kind {
            SchemeKind::Gl => gl_weights(alpha, n),
            SchemeKind::L1 => l1_weights(alpha, n),
            SchemeKind::PiecewiseInterp => interp_weights(alpha, n),
            SchemeKind::CqTheta { theta } | SchemeKind::Trapezoid { theta } => {
                cq_theta_weights(alpha, theta, n)
            }
            SchemeKind::Counterexample { c, t1 } => counterexample_weights(alpha, c, t1, n),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sum_{j<N} omega_j`, compensated.
    pub fn omega_sum(&self) -> f64 {
        let mut s = CompensatedSum::new();
        self.omega.iter().for_each(|&w| s.add(w));
        s.value()
    }
}

/// The CM-preserving catalog used throughout the tests and the CLI:
/// GL, L1, piecewise interpolation, and theta-CQ with theta = 1.5 and 2.
pub fn catalog_kinds() -> Vec<SchemeKind> {
    vec![
        SchemeKind::Gl,
        SchemeKind::L1,
        SchemeKind::PiecewiseInterp,
        SchemeKind::CqTheta { theta: 1.5 },
        SchemeKind::CqTheta { theta: 2.0 },
    ]
}

pub fn catalog(alpha: f64, n: usize) -> Result<Vec<SchemeWeights>> {
    catalog_kinds()
        .into_iter()
        .map(|k| SchemeWeights::build(k, alpha, n))
        .collect()
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 weights, got {n}")));
    }
    Ok(())
}

/// Coefficients of `(1 + s z)^p`.
pub(crate) fn binomial_series(s: f64, p: f64, n: usize) -> Seq {
    let mut c = vec![0.0; n.max(2)];
    c[0] = 1.0;
    c[1] = s;
    let mut v = miller_power(&Seq::from_vec_unchecked(c), p).expect("c0 = 1");
    if n < 2 {
        v = v.truncated(n);
    }
    v
}

pub fn gl_weights(alpha: f64, n: usize) -> Result<SchemeWeights> {
    check_order(alpha)?;
    check_len(n)?;
    Ok(SchemeWeights {
        alpha,
        kind: SchemeKind::Gl,
        omega: binomial_series(-1.0, alpha, n),
        a: binomial_series(-1.0, -alpha, n),
        h_dependent: false,
    })
}

/// `(1 + x)^b + (1 - x)^b - 2` without cancellation for small `x`.
fn symmetric_second_difference(b: f64, x: f64) -> f64 {
    if x > 0.125 {
        return (1.0 + x).powf(b) + (1.0 - x).powf(b) - 2.0;
    }
    // 2 sum_{k>=1} C(b, 2k) x^{2k}
    let x2 = x * x;
    let mut coef = 1.0; // C(b, m) built incrementally
    let mut pow = 1.0;
    let mut acc = 0.0;
    for m in 1..=60 {
        coef *= (b - (m as f64 - 1.0)) / m as f64;
        if m % 2 == 0 {
            pow *= x2;
            let term = coef * pow;
            acc += term;
            if term.abs() < 1e-18 * acc.abs() {
                break;
            }
        }
    }
    2.0 * acc
}

/// `(n + 1)^p - n^p` without cancellation for large `n`.
fn unit_increment_power(n: usize, p: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    nf.powf(p) * (p * (1.0 / nf).ln_1p()).exp_m1()
}

pub fn l1_weights(alpha: f64, n: usize) -> Result<SchemeWeights> {
    check_order(alpha)?;
    check_len(n)?;
    let beta = 1.0 - alpha;
    let scale = 1.0 / gamma(2.0 - alpha);
    let mut omega = Vec::with_capacity(n);
    omega.push(scale);
    omega.push((2f64.powf(beta) - 2.0) * scale);
    for j in 2..n {
        let jf = j as f64;
        omega.push(jf.powf(beta) * symmetric_second_difference(beta, 1.0 / jf) * scale);
    }
    let omega = Seq::new(omega)?;
    let a = conv_inverse(&omega)?;
    Ok(SchemeWeights {
        alpha,
        kind: SchemeKind::L1,
        omega,
        a,
        h_dependent: false,
    })
}

pub fn interp_weights(alpha: f64, n: usize) -> Result<SchemeWeights> {
    check_order(alpha)?;
    check_len(n)?;
    let scale = 1.0 / gamma(1.0 + alpha);
    let a = Seq::new(
        (0..n)
            .map(|k| unit_increment_power(k, alpha) * scale)
            .collect(),
    )?;
    let omega = conv_inverse(&a)?;
    Ok(SchemeWeights {
        alpha,
        kind: SchemeKind::PiecewiseInterp,
        omega,
        a,
        h_dependent: false,
    })
}

/// Theta-method convolution quadrature,
/// `F_a(z) = ((theta + (1 - theta) z) / (1 - z))^alpha`.
///
/// `theta >= 1` gives a CM-preserving scheme; `0 < theta < 1` is accepted and
/// tagged [`SchemeKind::Trapezoid`].
pub fn cq_theta_weights(alpha: f64, theta: f64, n: usize) -> Result<SchemeWeights> {
    check_order(alpha)?;
    check_len(n)?;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(invalid(format!("theta must be positive, got {theta}")));
    }
    // (theta + z + z^2 + ...) / theta, raised to alpha.
    let mut c = vec![1.0 / theta; n];
    c[0] = 1.0;
    let a = miller_power(&Seq::new(c)?, alpha)?.scaled(theta.powf(alpha));
    let omega = conv_inverse(&a)?;
    let kind = if theta >= 1.0 {
        SchemeKind::CqTheta { theta }
    } else {
        SchemeKind::Trapezoid { theta }
    };
    Ok(SchemeWeights {
        alpha,
        kind,
        omega,
        a,
        h_dependent: false,
    })
}

pub fn counterexample_weights(alpha: f64, c: f64, t1: f64, n: usize) -> Result<SchemeWeights> {
    check_order(alpha)?;
    check_len(n)?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(invalid(format!(
            "counterexample weight c must be >= 0, got {c}"
        )));
    }
    if !(t1 > 0.0 && t1 < 1.0) {
        return Err(invalid(format!("t1 must lie in (0, 1), got {t1}")));
    }
    let gl = binomial_series(-1.0, -alpha, n);
    let geo = Seq::geometric(t1, n);
    let a = Seq::new(gl.iter().zip(geo.iter()).map(|(g, q)| g + c * q).collect())?;
    let omega = conv_inverse(&a)?;
    Ok(SchemeWeights {
        alpha,
        kind: SchemeKind::Counterexample { c, t1 },
        omega,
        a,
        h_dependent: false,
    })
}

fn series_at(coef: impl Iterator<Item = f64>, x: f64) -> f64 {
    let mut s = CompensatedSum::new();
    let mut p = 1.0;
    for c in coef {
        s.add(c * p);
        p *= x;
        if p < 1e-300 {
            break;
        }
    }
    s.value()
}

/// `h^alpha F_a(e^-h)`, which tends to 1 for a consistent scheme.
///
/// The series is summed far enough that `e^{-hN} < 1e-17`. Where `a` itself
/// is only available through an `O(N^2)` inversion, the generating function
/// is evaluated through an `O(N)` factorization instead: `1 / F_omega` for
/// L1, and the product of the two binomial factors for theta-CQ.
pub fn consistency_value(kind: SchemeKind, alpha: f64, h: f64) -> Result<f64> {
    check_order(alpha)?;
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid("consistency step must lie in (0, 1)"));
    }
    let x = (-h).exp();
    let n = (40.0 / h).ceil() as usize + 16;
    let gl_a = || binomial_series(-1.0, -alpha, n);
    let fa = match kind {
        SchemeKind::Gl => series_at(gl_a().into_vec().into_iter(), x),
        SchemeKind::PiecewiseInterp => {
            let s = 1.0 / gamma(1.0 + alpha);
            series_at((0..n).map(|k| unit_increment_power(k, alpha) * s), x)
        }
        SchemeKind::L1 => {
            let w = l1_omega_prefix(alpha, n);
            1.0 / series_at(w.into_iter(), x)
        }
        SchemeKind::CqTheta { theta } | SchemeKind::Trapezoid { theta } => {
            let p = binomial_series((1.0 - theta) / theta, alpha, n);
            theta.powf(alpha)
                * series_at(p.into_vec().into_iter(), x)
                * series_at(gl_a().into_vec().into_iter(), x)
        }
        SchemeKind::Counterexample { c, t1 } => {
            series_at(gl_a().into_vec().into_iter(), x) + c / (1.0 - t1 * x)
        }
    };
    Ok(h.powf(alpha) * fa)
}

fn l1_omega_prefix(alpha: f64, n: usize) -> Vec<f64> {
    let beta = 1.0 - alpha;
    let scale = 1.0 / gamma(2.0 - alpha);
    let mut w = vec![scale, (2f64.powf(beta) - 2.0) * scale];
    for j in 2..n {
        let jf = j as f64;
        w.push(jf.powf(beta) * symmetric_second_difference(beta, 1.0 / jf) * scale);
    }
    w
}

/// `max_n sum_{j=1}^n a_j / n^alpha`, the constant in the cumulative bound
/// `h^alpha sum_{j<=n} a_j <= C (nh)^alpha` (the `h` cancels for homogeneous
/// schemes).
pub fn cumulative_weight_constant(w: &SchemeWeights) -> f64 {
    let mut s = CompensatedSum::new();
    let mut best: f64 = 0.0;
    for n in 1..w.a.len() {
        s.add(w.a[n]);
        best = best.max(s.value() / (n as f64).powf(w.alpha));
    }
    best
}

/// Residual of `omega * a = delta` relative to `max|omega| max|a|`.
pub fn inverse_defect(w: &SchemeWeights) -> f64 {
    let id = convolve(&w.omega, &w.a);
    let scale = w.omega.max_abs() * w.a.max_abs();
    id.iter()
        .enumerate()
        .map(|(n, x)| (x - if n == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
        / scale.max(1.0)
}

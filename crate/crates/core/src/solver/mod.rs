//! Implicit time stepping for Caputo fractional ODEs and convolutional
//! Volterra equations.
//!
//! Both problem classes reduce to the same discrete form
//!
//! ```text
//! u_n = u_0 + sum_{j=0}^{n-1} c_j f(t_{n-j}, u_{n-j}),   n >= 1,
//! ```
//!
//! with `c = h^alpha a` for a fractional ODE and `c = b` for a Volterra
//! equation. The `j = 0` term makes every step implicit; it is resolved by
//! Newton's method when the right-hand side provides a Jacobian and by
//! damped fixed-point iteration otherwise.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::schemes::{SchemeWeights, VolterraKernel, VolterraWeights};
use crate::seqkit::{CompensatedSum, Seq};

pub mod presets;

/// Right-hand side `f(t, u)` of a fractional ODE or Volterra equation.
pub trait Rhs: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, u: &[f64], out: &mut [f64]);

    /// Row-major `dim x dim` Jacobian `df/du`. Returns false when not
    /// available, which selects fixed-point iteration.
    fn jacobian(&self, _t: f64, _u: &[f64], _out: &mut [f64]) -> bool {
        false
    }
}

/// Closure-backed right-hand side without a Jacobian.
pub struct FnRhs<F> {
    dim: usize,
    f: F,
}

impl<F> FnRhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnRhs { dim, f }
    }
}

impl<F> Rhs for FnRhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, u: &[f64], out: &mut [f64]) {
        (self.f)(t, u, out)
    }
}

/// `D_c^alpha u = f(t, u)`, `u(0) = u0`, on `[0, t_end]`.
#[derive(Clone)]
pub struct FodeProblem {
    pub alpha: f64,
    pub rhs: Arc<dyn Rhs>,
    pub u0: Vec<f64>,
    pub t_end: f64,
}

impl FodeProblem {
    pub fn new(alpha: f64, rhs: Arc<dyn Rhs>, u0: Vec<f64>, t_end: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        check_data(rhs.as_ref(), &u0, t_end)?;
        Ok(FodeProblem {
            alpha,
            rhs,
            u0,
            t_end,
        })
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }
}

/// `u(t) = u0 + int_0^t k(t - s) f(s, u(s)) ds` on `[0, t_end]`.
#[derive(Clone)]
pub struct VolterraProblem {
    pub kernel: VolterraKernel,
    pub rhs: Arc<dyn Rhs>,
    pub u0: Vec<f64>,
    pub t_end: f64,
}

impl VolterraProblem {
    pub fn new(
        kernel: VolterraKernel,
        rhs: Arc<dyn Rhs>,
        u0: Vec<f64>,
        t_end: f64,
    ) -> Result<Self> {
        kernel.validate()?;
        check_data(rhs.as_ref(), &u0, t_end)?;
        Ok(VolterraProblem {
            kernel,
            rhs,
            u0,
            t_end,
        })
    }
}

fn check_data(rhs: &dyn Rhs, u0: &[f64], t_end: f64) -> Result<()> {
    if u0.is_empty() || rhs.dim() != u0.len() {
        return Err(invalid(format!(
            "initial value has length {}, right-hand side expects {}",
            u0.len(),
            rhs.dim()
        )));
    }
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("initial value is not finite"));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {t_end}")));
    }
    Ok(())
}

/// Number of steps covering `[0, t_end]`, tolerant of `t_end / h` landing a
/// hair above an integer.
pub fn step_count(t_end: f64, h: f64) -> usize {
    let r = t_end / h;
    let n = r.round();
    if (r - n).abs() <= 1e-9 * n.max(1.0) {
        n as usize
    } else {
        r.ceil() as usize
    }
}

/// Real time grid and solution values.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub scheme: String,
}

impl Trajectory {
    /// Number of stored time levels (`N + 1`).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    /// The single component of a scalar trajectory.
    pub fn scalar(&self) -> Result<Vec<f64>> {
        if self.dim() != 1 {
            return Err(invalid(format!(
                "expected a scalar trajectory, got dimension {}",
                self.dim()
            )));
        }
        Ok(self.component(0))
    }

    pub fn as_seq(&self) -> Result<Seq> {
        Seq::new(self.scalar()?)
    }

    /// Euclidean norm at each time level.
    pub fn norms(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }
}

/// Complex scalar trajectory of the linear test equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub scheme: String,
}

impl ComplexTrajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Real trajectory, refused unless every imaginary part is exactly zero.
    /// Complete monotonicity is a property of real sequences only.
    pub fn into_real(self) -> Result<Trajectory> {
        if let Some(n) = self.values.iter().position(|v| v.im != 0.0) {
            return Err(invalid(format!(
                "trajectory has a nonzero imaginary part at step {n}"
            )));
        }
        Ok(Trajectory {
            h: self.h,
            times: self.times,
            values: self.values.iter().map(|v| vec![v.re]).collect(),
            scheme: self.scheme,
        })
    }
}

/// Iteration limit of the per-step nonlinear solve.
pub const MAX_ITERATIONS: usize = 50;
const RESIDUAL_TOL: f64 = 1e-12;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn eval_checked(rhs: &dyn Rhs, t: f64, u: &[f64], out: &mut [f64], step: usize) -> Result<()> {
    rhs.eval(t, u, out);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation { step });
    }
    Ok(())
}

/// Solve `u - c f(t, u) = rhs_const` for `u`, starting from `guess`.
fn implicit_solve(
    rhs: &dyn Rhs,
    t: f64,
    c: f64,
    target: &[f64],
    guess: &[f64],
    step: usize,
) -> Result<Vec<f64>> {
    let d = target.len();
    let mut u = guess.to_vec();
    let mut f = vec![0.0; d];
    let mut jac = vec![0.0; d * d];

    let residual = |u: &[f64], f: &mut [f64]| -> Result<Vec<f64>> {
        eval_checked(rhs, t, u, f, step)?;
        Ok((0..d).map(|i| u[i] - c * f[i] - target[i]).collect())
    };

    let mut g = residual(&u, &mut f)?;
    let mut gnorm = norm(&g);
    let mut damping = 1.0;
    for _ in 0..MAX_ITERATIONS {
        let scale = 1.0 + norm(&u);
        if gnorm <= RESIDUAL_TOL * scale {
            return Ok(u);
        }
        let newton = rhs.jacobian(t, &u, &mut jac);
        let delta: Vec<f64> = if newton {
            let m = DMatrix::from_fn(d, d, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id - c * jac[i * d + j]
            });
            let rhs_v = DVector::from_iterator(d, g.iter().map(|x| -x));
            match m.lu().solve(&rhs_v) {
                Some(s) => s.iter().copied().collect(),
                None => {
                    return Err(Error::StepFailure {
                        step,
                        reason: "singular Newton matrix".into(),
                    });
                }
            }
        } else {
            // fixed point u <- target + c f(u), i.e. delta = -g
            g.iter().map(|x| -x * damping).collect()
        };

        // Backtracking on the residual norm.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + lambda * b).collect();
            let mut ft = vec![0.0; d];
            let gt = match residual(&trial, &mut ft) {
                Ok(gt) => gt,
                Err(_) if newton => {
                    lambda *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let gt_norm = norm(&gt);
            if gt_norm < gnorm || gt_norm <= RESIDUAL_TOL * (1.0 + norm(&trial)) {
                accepted = Some((trial, gt, gt_norm));
                break;
            }
            if !newton {
                // residual grew: keep the step but damp subsequent ones
                damping = (damping * 0.5).max(1e-3);
                accepted = Some((trial, gt, gt_norm));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, gt, gt_norm)) = accepted else {
            // Newton direction cannot reduce the residual further; accept a
            // roundoff-level stall.
            if gnorm <= 1e3 * RESIDUAL_TOL * scale {
                return Ok(u);
            }
            return Err(Error::StepFailure {
                step,
                reason: format!("line search stalled at residual {gnorm:e}"),
            });
        };
        let moved = norm(&u.iter().zip(&trial).map(|(a, b)| a - b).collect::<Vec<_>>());
        u = trial;
        g = gt;
        gnorm = gt_norm;
        if moved <= 1e-15 * (1.0 + norm(&u)) && gnorm <= 1e3 * RESIDUAL_TOL * (1.0 + norm(&u)) {
            return Ok(u);
        }
    }
    if gnorm <= RESIDUAL_TOL * (1.0 + norm(&u)) {
        return Ok(u);
    }
    Err(Error::StepFailure {
        step,
        reason: format!("no convergence in {MAX_ITERATIONS} iterations (residual {gnorm:e})"),
    })
}

/// Shared stepping loop for `u_n = u_0 + sum_{j<n} c_j f_{n-j}`.
fn march(
    rhs: &dyn Rhs,
    u0: &[f64],
    h: f64,
    n_steps: usize,
    c: &[f64],
    tag: String,
) -> Result<Trajectory> {
    if c.len() < n_steps {
        return Err(invalid(format!(
            "{} weights cannot cover {} steps",
            c.len(),
            n_steps
        )));
    }
    let d = u0.len();
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    let mut fvals: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    values.push(u0.to_vec());
    fvals.push(vec![0.0; d]); // f_0 never enters the update
    for n in 1..=n_steps {
        let t = n as f64 * h;
        let mut target = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc = CompensatedSum::new();
            acc.add(u0[i]);
            for j in 1..n {
                acc.add(c[j] * fvals[n - j][i]);
            }
            target.push(acc.value());
        }
        let u = implicit_solve(rhs, t, c[0], &target, &values[n - 1], n)?;
        let mut f = vec![0.0; d];
        eval_checked(rhs, t, &u, &mut f, n)?;
        values.push(u);
        fvals.push(f);
    }
    Ok(Trajectory {
        h,
        times: (0..=n_steps).map(|n| n as f64 * h).collect(),
        values,
        scheme: tag,
    })
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("step must be positive, got {h}")));
    }
    Ok(())
}

/// Integrate a fractional ODE with the given weights.
pub fn solve_fode(p: &FodeProblem, w: &SchemeWeights, h: f64) -> Result<Trajectory> {
    check_step(h)?;
    if (w.alpha - p.alpha).abs() > 1e-14 {
        return Err(invalid(format!(
            "weights are for alpha = {}, problem has alpha = {}",
            w.alpha, p.alpha
        )));
    }
    let n = step_count(p.t_end, h);
    let c: Vec<f64> =
        w.a.iter()
            .take(n.max(1))
            .map(|a| a * h.powf(p.alpha))
            .collect();
    march(p.rhs.as_ref(), &p.u0, h, n, &c, w.kind.tag())
}

/// Integrate a Volterra equation with precomputed quadrature weights.
pub fn solve_volterra(p: &VolterraProblem, vw: &VolterraWeights) -> Result<Trajectory> {
    if vw.kernel != p.kernel {
        return Err(invalid(
            "quadrature weights were built for a different kernel",
        ));
    }
    let n = step_count(p.t_end, vw.h);
    march(p.rhs.as_ref(), &p.u0, vw.h, n, &vw.b, vw.variant.tag())
}

/// Classical implicit Euler for `u' = f(t, u)`, the integer-order limit.
pub fn solve_backward_euler(rhs: &dyn Rhs, u0: &[f64], h: f64, t_end: f64) -> Result<Trajectory> {
    check_step(h)?;
    check_data(rhs, u0, t_end)?;
    let n = step_count(t_end, h);
    let d = u0.len();
    let mut values = vec![u0.to_vec()];
    for k in 1..=n {
        let u = implicit_solve(
            rhs,
            k as f64 * h,
            h,
            &values[k - 1].clone(),
            &values[k - 1],
            k,
        )?;
        debug_assert_eq!(u.len(), d);
        values.push(u);
    }
    Ok(Trajectory {
        h,
        times: (0..=n).map(|k| k as f64 * h).collect(),
        values,
        scheme: "backward-euler".into(),
    })
}

/// Exact recurrence for `D^alpha u = lambda u` in complex arithmetic.
pub fn solve_linear_test(
    lambda: Complex64,
    w: &SchemeWeights,
    h: f64,
    n_steps: usize,
    u0: Complex64,
) -> Result<ComplexTrajectory> {
    check_step(h)?;
    if w.len() < n_steps {
        return Err(invalid(format!(
            "{} weights cannot cover {n_steps} steps",
            w.len()
        )));
    }
    let z = lambda * h.powf(w.alpha);
    let diag = Complex64::new(1.0, 0.0) - z * w.a[0];
    if diag.norm() == 0.0 {
        return Err(Error::SingularStep);
    }
    let a = &w.a;
    let mut u: Vec<Complex64> = Vec::with_capacity(n_steps + 1);
    u.push(u0);
    for n in 1..=n_steps {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for j in 1..n {
            let v = u[n - j];
            re.add(a[j] * v.re);
            im.add(a[j] * v.im);
        }
        let hist = Complex64::new(re.value(), im.value());
        u.push((u0 + z * hist) / diag);
    }
    Ok(ComplexTrajectory {
        h,
        times: (0..=n_steps).map(|n| n as f64 * h).collect(),
        values: u,
        scheme: w.kind.tag(),
    })
}

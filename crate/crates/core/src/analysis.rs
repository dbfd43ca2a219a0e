//! Post-hoc measurements on computed trajectories: monotonicity, ordering,
//! truncation errors, convergence tables and algebraic decay fits.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::schemes::SchemeWeights;
use crate::seqkit::{CompensatedSum, Seq};
use crate::solver::{solve_fode, step_count, FodeProblem, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    Nonmonotone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub direction: Direction,
    /// First index `n` at which `u_{n+1} - u_n` has the wrong sign.
    pub first_break: Option<usize>,
    /// Largest wrong-direction step (zero when monotone).
    pub max_violation: f64,
    /// True when every step moves by more than the tolerance.
    pub strict: bool,
    pub tolerance: f64,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.direction != Direction::Nonmonotone
    }
}

/// Relative tolerance separating a genuine plateau from roundoff dither.
pub const MONOTONE_TOL: f64 = 1e-13;

/// Classify the sign pattern of consecutive differences.
pub fn monotonicity_of(values: &[f64]) -> MonotonicityReport {
    let scale = values
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = MONOTONE_TOL * scale;
    let mut direction = Direction::Constant;
    let mut first_break = None;
    let mut max_violation = 0.0_f64;
    let mut strict = values.len() > 1;
    for (n, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d.abs() <= tol {
            strict = false;
            continue;
        }
        let step = if d > 0.0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        };
        match direction {
            Direction::Constant => direction = step,
            dir if dir == step => {}
            _ => {
                first_break.get_or_insert(n);
                max_violation = max_violation.max(d.abs());
            }
        }
    }
    if first_break.is_some() {
        direction = Direction::Nonmonotone;
        strict = false;
    }
    MonotonicityReport {
        direction,
        first_break,
        max_violation,
        strict,
        tolerance: tol,
    }
}

/// Monotonicity of a scalar trajectory.
pub fn monotonicity_report(traj: &Trajectory) -> Result<MonotonicityReport> {
    if traj.dim() != 1 {
        return Err(invalid(format!(
            "monotonicity is a scalar property; trajectory has dimension {}",
            traj.dim()
        )));
    }
    Ok(monotonicity_of(&traj.scalar()?))
}

/// `(D_h^alpha u)_n = h^-alpha sum_{j<=n} omega_j (u_{n-j} - u_0)` for every
/// stored `n`.
pub fn discrete_derivative(omega: &[f64], u: &[f64], h: f64, alpha: f64) -> Result<Vec<f64>> {
    if omega.len() < u.len() {
        return Err(invalid(format!(
            "{} weights cannot cover {} grid values",
            omega.len(),
            u.len()
        )));
    }
    let scale = h.powf(-alpha);
    Ok((0..u.len())
        .map(|n| {
            let mut acc = CompensatedSum::new();
            for j in 0..=n {
                acc.add(omega[j] * (u[n - j] - u[0]));
            }
            scale * acc.value()
        })
        .collect())
}

/// Local truncation error `r_n = D_h^alpha u(t_n) - f(t_n, u(t_n))`.
pub fn truncation_error(
    w: &SchemeWeights,
    exact_u: &[f64],
    f_on_grid: &[f64],
    h: f64,
) -> Result<Seq> {
    if exact_u.len() != f_on_grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} solution samples against {} right-hand side samples",
            exact_u.len(),
            f_on_grid.len()
        )));
    }
    let d = discrete_derivative(&w.omega, exact_u, h, w.alpha)?;
    Seq::new(d.iter().zip(f_on_grid).map(|(a, b)| a - b).collect())
}

/// Energy inequality check for `E(u) = u^2`:
/// `D_h(u^2)_n <= 2 u_n (D_h u)_n` at every level.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `max_n [D_h(u^2)_n - 2 u_n (D_h u)_n]`; nonpositive when it holds.
    pub max_excess: f64,
    /// `h^-alpha omega_0 max|u|^2`, the natural size of either side.
    pub scale: f64,
}

impl EnergyReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_excess <= rel_tol * self.scale
    }
}

pub fn energy_inequality(w: &SchemeWeights, u: &[f64], h: f64) -> Result<EnergyReport> {
    let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
    let du = discrete_derivative(&w.omega, u, h, w.alpha)?;
    let dsq = discrete_derivative(&w.omega, &sq, h, w.alpha)?;
    let max_excess = (0..u.len())
        .map(|n| dsq[n] - 2.0 * u[n] * du[n])
        .fold(f64::NEG_INFINITY, f64::max);
    let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(EnergyReport {
        max_excess,
        scale: h.powf(-w.alpha) * w.omega[0] * umax * umax,
    })
}

/// `true` iff `a_n <= b_n + 1e-12 scale` for all `n`.
pub fn verify_ordering(a: &Trajectory, b: &Trajectory) -> Result<bool> {
    if a.len() != b.len() || (a.h - b.h).abs() > 1e-15 * a.h {
        return Err(Error::GridMismatch(format!(
            "{} levels at h = {} against {} levels at h = {}",
            a.len(),
            a.h,
            b.len(),
            b.h
        )));
    }
    let (ua, ub) = (a.scalar()?, b.scalar()?);
    let scale = ua.iter().chain(&ub).fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(ua.iter().zip(&ub).all(|(x, y)| *x <= *y + 1e-12 * scale))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub h_list: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`; the log2 error ratio
    /// when the step is halved.
    pub observed_orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// What the computed solutions are compared with.
pub enum Reference<'a> {
    /// Closed-form solution `t -> u(t)`.
    Exact(&'a dyn Fn(f64) -> Vec<f64>),
    /// The same scheme on a grid `ratio` times finer than the smallest step.
    SelfRefined { ratio: usize },
}

fn sup_error(traj: &Trajectory, mut reference: impl FnMut(usize, f64) -> Vec<f64>) -> f64 {
    traj.values
        .iter()
        .zip(&traj.times)
        .enumerate()
        .map(|(n, (u, &t))| {
            let r = reference(n, t);
            u.iter()
                .zip(&r)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Sup-norm errors over `nh <= T` for each step in `h_list`.
///
/// `factory(n)` must return weights of length at least `n` for the
/// problem's order.
pub fn convergence_table(
    p: &FodeProblem,
    factory: &dyn Fn(usize) -> Result<SchemeWeights>,
    h_list: &[f64],
    reference: &Reference<'_>,
) -> Result<ConvergenceTable> {
    if h_list.is_empty() || h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(
            "step list must be non-empty and strictly decreasing",
        ));
    }
    let fine = match reference {
        Reference::Exact(_) => None,
        Reference::SelfRefined { ratio } => {
            if *ratio < 2 {
                return Err(invalid("refinement ratio must be at least 2"));
            }
            let h_ref = h_list[h_list.len() - 1] / *ratio as f64;
            let n = step_count(p.t_end, h_ref);
            Some(solve_fode(p, &factory(n + 1)?, h_ref)?)
        }
    };
    let mut errors = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let n = step_count(p.t_end, h);
        let traj = solve_fode(p, &factory(n + 1)?, h)?;
        let e = match (reference, &fine) {
            (Reference::Exact(u), _) => sup_error(&traj, |_, t| u(t)),
            (_, Some(f)) => {
                let stride = (h / f.h).round() as usize;
                if ((stride as f64) * f.h - h).abs() > 1e-9 * h {
                    return Err(Error::GridMismatch(format!(
                        "step {h} is not a multiple of the reference step {}",
                        f.h
                    )));
                }
                let fv = &f.values;
                sup_error(&traj, |k, _| fv[k * stride].clone())
            }
            _ => unreachable!(),
        };
        errors.push(e);
    }
    let observed_orders = errors
        .windows(2)
        .zip(h_list.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(ConvergenceTable {
        h_list: h_list.to_vec(),
        errors,
        observed_orders,
    })
}

/// Power law `u_n ~ prefactor * n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
}

/// Number of log-spaced indices used by the decay fit.
pub const FIT_POINTS: usize = 64;

/// Least-squares fit of `log u_n` against `log n` over `window`
/// (default: the last half of the sequence), subsampled at up to 64
/// log-spaced indices.
pub fn decay_rate_fit_values(u: &[f64], window: Option<Range<usize>>) -> Result<DecayFit> {
    let window = window.unwrap_or(u.len() / 2..u.len());
    let lo = window.start.max(1);
    let hi = window.end.min(u.len());
    if hi < lo + 2 {
        return Err(invalid(format!(
            "fit window {lo}..{hi} holds fewer than two points"
        )));
    }
    let mut idx: Vec<usize> = if hi - lo <= FIT_POINTS {
        (lo..hi).collect()
    } else {
        let (a, b) = ((lo as f64).ln(), ((hi - 1) as f64).ln());
        (0..FIT_POINTS)
            .map(|k| {
                (a + (b - a) * k as f64 / (FIT_POINTS - 1) as f64)
                    .exp()
                    .round() as usize
            })
            .map(|n| n.clamp(lo, hi - 1))
            .collect()
    };
    idx.dedup();
    let mut xs = Vec::with_capacity(idx.len());
    let mut ys = Vec::with_capacity(idx.len());
    for &n in &idx {
        if !(u[n] > 0.0) {
            return Err(invalid(format!("value at index {n} is not positive")));
        }
        xs.push((n as f64).ln());
        ys.push(u[n].ln());
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        exponent: slope,
        prefactor: (my - slope * mx).exp(),
    })
}

pub fn decay_rate_fit(traj: &Trajectory, window: Option<Range<usize>>) -> Result<DecayFit> {
    decay_rate_fit_values(&traj.scalar()?, window)
}

//! Sequence algebra on finite prefixes: discrete convolution and its inverse,
//! generating functions, power series powers, complete-monotonicity checks and
//! the discrete resolvent.
//!
//! A sequence here always stands for the first `N` terms of an infinite one.
//! Every operation is exact on prefixes: entry `n` of a result only depends on
//! entries `0..=n` of the inputs, so truncation never contaminates the
//! returned terms.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Finite, non-empty prefix of a real sequence with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq(Vec<f64>);

impl Seq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("sequence must have at least one entry"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sequence entry {i} is not finite")));
        }
        Ok(Seq(values))
    }

    /// Convolution identity `(1, 0, 0, ...)` of length `len`.
    pub fn delta(len: usize) -> Self {
        let mut v = vec![0.0; len.max(1)];
        v[0] = 1.0;
        Seq(v)
    }

    /// Geometric sequence `q^n`.
    pub fn geometric(q: f64, len: usize) -> Self {
        let mut v = Vec::with_capacity(len.max(1));
        let mut p = 1.0;
        for _ in 0..len.max(1) {
            v.push(p);
            p *= q;
        }
        Seq(v)
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Seq(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// First `len` entries (or the whole sequence if shorter).
    pub fn truncated(&self, len: usize) -> Seq {
        Seq(self.0[..len.clamp(1, self.len())].to_vec())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Seq {
        Seq(self.0.iter().map(|v| v * factor).collect())
    }

    /// `((I - E) v)_k = v_k - v_{k+1}`; one entry shorter.
    pub fn forward_difference(&self) -> Result<Seq> {
        if self.len() < 2 {
            return Err(invalid("forward difference needs at least two entries"));
        }
        Ok(Seq(self.0.windows(2).map(|w| w[0] - w[1]).collect()))
    }
}

impl Deref for Seq {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Seq {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Seq::new(v)
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Discrete convolution, truncated to the shorter of the two inputs.
pub fn convolve(u: &Seq, v: &Seq) -> Seq {
    let n = u.len().min(v.len());
    let out = (0..n)
        .map(|k| {
            let mut acc = CompensatedSum::new();
            for j in 0..=k {
                acc.add(u[j] * v[k - j]);
            }
            acc.value()
        })
        .collect();
    Seq(out)
}

/// Convolution inverse `a` with `w * a = delta`, by forward substitution.
pub fn conv_inverse(w: &Seq) -> Result<Seq> {
    let w0 = w[0];
    if w0 == 0.0 {
        return Err(Error::SingularSequence);
    }
    let n = w.len();
    let mut a = Vec::with_capacity(n);
    a.push(1.0 / w0);
    for k in 1..n {
        let mut acc = CompensatedSum::new();
        for j in 1..=k {
            acc.add(w[j] * a[k - j]);
        }
        a.push(-acc.value() / w0);
    }
    Ok(Seq(a))
}

/// Coefficients of `(sum_j c_j z^j)^alpha` for `c_0 = 1` by Miller's
/// recurrence `v_n = sum_{j=1}^n ((alpha + 1) j / n - 1) c_j v_{n-j}`.
pub fn miller_power(c: &Seq, alpha: f64) -> Result<Seq> {
    if c[0] != 1.0 {
        return Err(invalid(format!(
            "miller_power requires c0 = 1, got {}",
            c[0]
        )));
    }
    if !alpha.is_finite() {
        return Err(invalid("exponent must be finite"));
    }
    let n = c.len();
    let mut v = Vec::with_capacity(n);
    v.push(1.0);
    // Only the nonzero part of c contributes; polynomials stay O(N * deg).
    let support: Vec<usize> = (1..n).filter(|&j| c[j] != 0.0).collect();
    for k in 1..n {
        let kf = k as f64;
        let mut acc = CompensatedSum::new();
        for &j in support.iter().take_while(|&&j| j <= k) {
            acc.add(((alpha + 1.0) * j as f64 / kf - 1.0) * c[j] * v[k - j]);
        }
        v.push(acc.value());
    }
    Seq::new(v)
}

/// `sum_{n<N} v_n z^n` by Horner's rule.
pub fn eval_generating(v: &Seq, z: Complex64) -> Complex64 {
    v.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Asymptotic stand-in for the truncated tail `sum_{j >= M} v_j z^j`.
///
/// The remainder is replaced by repeated summation by parts,
/// `z^M sum_k z^k (Delta^k v)_M / (1 - z)^{k+1}`, using the trailing entries
/// of `v` for the forward differences, and the expansion is stopped at its
/// smallest term. Accurate when the tail of `v` is smooth and
/// `M |1 - z| >> 1`. Differencing amplifies the roundoff in `v` by about
/// `2 / |1 - z|` per order, which the smallest-term rule also bounds.
#[derive(Debug, Clone)]
pub struct TailCorrection {
    /// Index `M` where the tail starts.
    pub start: usize,
    diffs: Vec<f64>,
}

impl TailCorrection {
    /// Uses up to `max_terms` difference orders; `start = N - K - 1`.
    pub fn new(v: &Seq, max_terms: usize) -> Self {
        let n = v.len();
        let k_max = max_terms.min(n.saturating_sub(1) / 2);
        let start = n - k_max - 1;
        let mut row: Vec<f64> = v[start..].to_vec();
        let mut diffs = Vec::with_capacity(k_max + 1);
        loop {
            diffs.push(row[0]);
            if row.len() < 2 {
                break;
            }
            row = row.windows(2).map(|w| w[1] - w[0]).collect();
        }
        TailCorrection { start, diffs }
    }

    /// Approximate `sum_{j >= start} v_j z^j`. Zero at `z = 1`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_power(z, z.powu(self.start as u32))
    }

    /// As [`eval`](Self::eval) with `z^start` supplied by the caller.
    pub fn eval_with_power(&self, z: Complex64, z_start: Complex64) -> Complex64 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        if one_minus.norm() < 1e-300 {
            return Complex64::new(0.0, 0.0);
        }
        let mut tail = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut denom = one_minus;
        let mut last = f64::INFINITY;
        for &d in &self.diffs {
            let term = zk * d / denom;
            let size = term.norm();
            if size > last {
                break;
            }
            tail += term;
            last = size;
            zk *= z;
            denom *= one_minus;
        }
        z_start * tail
    }
}

/// Generating function with the truncated tail replaced by
/// [`TailCorrection`]. At `z = 1` it falls back to the plain sum.
pub fn eval_generating_tail(v: &Seq, z: Complex64, max_terms: usize) -> Complex64 {
    if max_terms == 0 || v.len() < 3 || (Complex64::new(1.0, 0.0) - z).norm() < 1e-300 {
        return eval_generating(v, z);
    }
    let tail = TailCorrection::new(v, max_terms);
    eval_generating(&v.truncated(tail.start), z) + tail.eval(z)
}

/// Discrete resolvent `b` solving `b + lambda (a * b) = lambda a`.
pub fn resolvent(a: &Seq, lambda: f64) -> Result<Seq> {
    if !(lambda > 0.0) {
        return Err(invalid("resolvent requires lambda > 0"));
    }
    if a[0] < 0.0 {
        return Err(invalid("resolvent requires a0 >= 0"));
    }
    let diag = 1.0 + lambda * a[0];
    let mut b = Vec::with_capacity(a.len());
    b.push(lambda * a[0] / diag);
    for n in 1..a.len() {
        let mut acc = CompensatedSum::new();
        acc.add(lambda * a[n]);
        for j in 1..=n {
            acc.add(-lambda * a[j] * b[n - j]);
        }
        b.push(acc.value() / diag);
    }
    Seq::new(b)
}

/// Outcome of a finite-depth complete-monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub is_cm: bool,
    /// Largest difference order `j` examined.
    pub depth_checked: usize,
    /// Largest index `k` examined (at order 0).
    pub span_checked: usize,
    /// Most negative `((I-E)^j v)_k` found.
    pub min_difference: f64,
    /// `min_difference / max|v|`.
    pub relative_min_difference: f64,
    /// First `(j, k)` in order of increasing `j`, then `k`, that falls below
    /// `-tolerance`.
    pub first_violation: Option<(usize, usize)>,
    /// The difference at `first_violation`.
    pub violation_difference: Option<f64>,
    /// Absolute tolerance applied (relative tolerance times `max|v|`).
    pub tolerance: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Check `((I - E)^j v)_k >= -tol * max|v|` for `0 <= j <= max_depth` and all
/// admissible `k`.
///
/// Differences are propagated in double-double form so that cancellation in
/// deep differences does not swamp the result.
pub fn check_cm(v: &Seq, max_depth: usize, tol: f64) -> Result<CmReport> {
    if max_depth < 1 {
        return Err(invalid("max_depth must be at least 1"));
    }
    if !(tol >= 0.0) {
        return Err(invalid("tolerance must be non-negative"));
    }
    let scale = v.max_abs();
    let abs_tol = tol * scale;
    let depth = max_depth.min(v.len() - 1);
    let mut level: Vec<(f64, f64)> = v.iter().map(|&x| (x, 0.0)).collect();
    let mut min_diff = f64::INFINITY;
    let mut first_violation = None;
    let mut violation_difference = None;
    for j in 0..=depth {
        for (k, &(hi, lo)) in level.iter().enumerate() {
            let d = hi + lo;
            if d < min_diff {
                min_diff = d;
            }
            if first_violation.is_none() && d < -abs_tol {
                first_violation = Some((j, k));
                violation_difference = Some(d);
            }
        }
        if j < depth {
            level = level
                .windows(2)
                .map(|w| {
                    let (s, e) = two_sum(w[0].0, -w[1].0);
                    let lo = e + (w[0].1 - w[1].1);
                    two_sum(s, lo)
                })
                .collect();
        }
    }
    let relative = if scale > 0.0 { min_diff / scale } else { 0.0 };
    Ok(CmReport {
        is_cm: first_violation.is_none(),
        depth_checked: depth,
        span_checked: v.len() - 1,
        min_difference: min_diff,
        relative_min_difference: relative,
        first_violation,
        violation_difference,
        tolerance: abs_tol,
    })
}

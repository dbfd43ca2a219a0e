//! Linear stability of the schemes for `D^alpha u = lambda u`.
//!
//! With `zeta = lambda h^alpha` the recurrence
//! `u_n = u_0 + zeta [a * (u - u_0 delta)]_n` has the generating function
//! `U(z) - u_0 = u_0 z / ((1 - z)(1 - zeta F_a(z)))`, so `u_n` fails to decay
//! exactly when `F_omega(z) = zeta` for some `|z| <= 1`. The instability set
//! is therefore `F_omega` of the closed unit disk, bounded by the curve
//! `theta -> F_omega(e^{i theta})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::analysis::{decay_rate_fit_values, DecayFit};
use crate::error::{invalid, Result};
use crate::schemes::SchemeWeights;
use crate::seqkit::{Seq, TailCorrection};
use crate::solver::solve_linear_test;

/// Difference orders used by the tail correction of the boundary curve.
const TAIL_TERMS: usize = 16;

/// Sampled boundary curve `F_omega(e^{i theta})`, `theta = 2 pi k / R`,
/// `k = 1..R-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityLocus {
    pub alpha: f64,
    pub scheme: String,
    pub samples: Vec<(f64, Complex64)>,
    pub resolution: usize,
}

impl StabilityLocus {
    /// `max |F_omega|` over the samples: every unstable `zeta` lies in this
    /// disk.
    pub fn radius(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.1.norm()))
    }

    /// Winding number of the closed boundary curve around `zeta`. The curve
    /// is closed through `F_omega(1) = 0`.
    pub fn winding_number(&self, zeta: Complex64) -> i64 {
        let origin = Complex64::new(0.0, 0.0);
        let pts = std::iter::once(origin)
            .chain(self.samples.iter().map(|s| s.1))
            .chain(std::iter::once(origin));
        let mut total = 0.0;
        let mut prev: Option<Complex64> = None;
        for p in pts {
            if let Some(q) = prev {
                total += ((p - zeta) / (q - zeta)).arg();
            }
            prev = Some(p);
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// Distance from `zeta` to the sampled curve polygon.
    fn distance(&self, zeta: Complex64) -> f64 {
        let origin = Complex64::new(0.0, 0.0);
        let pts: Vec<Complex64> = std::iter::once(origin)
            .chain(self.samples.iter().map(|s| s.1))
            .chain(std::iter::once(origin))
            .collect();
        pts.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let ab = b - a;
                let len2 = ab.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    ((zeta - a) * ab.conj()).re / len2
                };
                (a + ab * t.clamp(0.0, 1.0) - zeta).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `zeta = lambda h^alpha` is stable iff it lies outside `F_omega` of the
    /// closed disk: off the curve and with zero winding number.
    pub fn is_stable_point(&self, zeta: Complex64) -> bool {
        if zeta.norm() == 0.0 {
            return false;
        }
        if self.distance(zeta) <= 1e-12 * zeta.norm().max(1.0) {
            return false;
        }
        self.winding_number(zeta) == 0
    }
}

/// Boundary curve at `resolution` equispaced angles.
///
/// The series is summed by folding the coefficients modulo `resolution` and
/// taking one FFT; the part beyond the stored weights is approximated by
/// [`TailCorrection`]. Near `theta = 0` the truncation error of the plain
/// sum is of order `|omega_N| / theta`; the correction removes most of it as
/// long as `N theta >> 1`.
pub fn boundary_locus(w: &SchemeWeights, resolution: usize) -> Result<StabilityLocus> {
    if resolution < 8 {
        return Err(invalid(format!(
            "resolution must be at least 8, got {resolution}"
        )));
    }
    let omega = &w.omega;
    let tail = (omega.len() >= 64).then(|| TailCorrection::new(omega, TAIL_TERMS));
    let head_len = tail.as_ref().map_or(omega.len(), |t| t.start);

    let mut buf = vec![Complex64::new(0.0, 0.0); resolution];
    for (n, &c) in omega[..head_len].iter().enumerate() {
        buf[n % resolution].re += c;
    }
    FftPlanner::new()
        .plan_fft_inverse(resolution)
        .process(&mut buf);

    let half = resolution / 2;
    let mut upper = Vec::with_capacity(half);
    for (k, head) in buf.iter().enumerate().take(half + 1).skip(1) {
        let theta = 2.0 * PI * k as f64 / resolution as f64;
        let z = Complex64::from_polar(1.0, theta);
        let mut value = *head;
        if let Some(t) = &tail {
            let phase = ((k as u128 * t.start as u128) % resolution as u128) as f64;
            let z_start = Complex64::from_polar(1.0, 2.0 * PI * phase / resolution as f64);
            value += t.eval_with_power(z, z_start);
        }
        if k == half && resolution.is_multiple_of(2) {
            value.im = 0.0;
        }
        upper.push((theta, value));
    }
    let mut samples = upper.clone();
    let mirror_from = if resolution.is_multiple_of(2) {
        upper.len() - 1
    } else {
        upper.len()
    };
    for &(theta, v) in upper[..mirror_from].iter().rev() {
        samples.push((2.0 * PI - theta, v.conj()));
    }
    debug_assert_eq!(samples.len(), resolution - 1);
    Ok(StabilityLocus {
        alpha: w.alpha,
        scheme: w.kind.tag(),
        samples,
        resolution,
    })
}

/// `max |arg F_omega|` over the sampled boundary. By the maximum principle
/// applied to `arg F_omega` this also bounds the argument over the disk.
pub fn max_arg(locus: &StabilityLocus) -> f64 {
    locus
        .samples
        .iter()
        .fold(0.0, |m, s| m.max(s.1.arg().abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// `max_{N/2 <= n <= N} |u_n| / |u_0|`.
    pub tail_max_ratio: f64,
    /// Whether `|u_N| < |u_{3N/4}|`.
    pub late_decreasing: bool,
    /// Power-law fit of `|u_n|` over the last half, when all moduli there
    /// are positive and finite.
    pub fit: Option<DecayFit>,
    pub blew_up: bool,
}

/// Smallest run length accepted by [`is_stable_empirical`].
pub const MIN_EMPIRICAL_STEPS: usize = 2048;

/// Run the linear test equation for `n` steps from `u_0 = 1` and classify.
///
/// Stable iff the late solution has dropped below `1e-2 |u_0|`, or it is
/// still decreasing over the last quarter with a fitted power-law exponent
/// `<= -alpha / 2`.
pub fn is_stable_empirical(
    lambda: Complex64,
    w: &SchemeWeights,
    h: f64,
    n: usize,
) -> Result<StabilityReport> {
    if n < MIN_EMPIRICAL_STEPS {
        return Err(invalid(format!(
            "need at least {MIN_EMPIRICAL_STEPS} steps, got {n}"
        )));
    }
    let tr = solve_linear_test(lambda, w, h, n, Complex64::new(1.0, 0.0))?;
    let m = tr.moduli();
    if m.iter().any(|v| !v.is_finite()) {
        return Ok(StabilityReport {
            stable: false,
            tail_max_ratio: f64::INFINITY,
            late_decreasing: false,
            fit: None,
            blew_up: true,
        });
    }
    let tail_max_ratio = m[n / 2..].iter().fold(0.0_f64, |a, &b| a.max(b));
    let late_decreasing = m[n] < m[3 * n / 4];
    let fit = decay_rate_fit_values(&m, Some(n / 2..n + 1)).ok();
    let slow_decay = late_decreasing && fit.is_some_and(|f| f.exponent <= -w.alpha / 2.0);
    Ok(StabilityReport {
        stable: tail_max_ratio < 1e-2 || slow_decay,
        tail_max_ratio,
        late_decreasing,
        fit,
        blew_up: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub lambda: Complex64,
    pub report: StabilityReport,
}

/// Empirical classification of many `lambda` values, in parallel.
pub fn stability_grid(
    w: &SchemeWeights,
    h: f64,
    n: usize,
    lambdas: &[Complex64],
) -> Result<Vec<GridPoint>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            Ok(GridPoint {
                lambda,
                report: is_stable_empirical(lambda, w, h, n)?,
            })
        })
        .collect()
}

/// 36 points of the closed left half plane: six radii log-spaced in
/// `[0.1, 10]` times six angles from `pi/2` to `3 pi/2`.
pub fn left_half_plane_lambdas() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(36);
    for i in 0..6 {
        let r = 10f64.powf(-1.0 + 2.0 * i as f64 / 5.0);
        for j in 0..6 {
            let phi = PI / 2.0 + PI * j as f64 / 5.0;
            out.push(Complex64::from_polar(r, phi));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedgeRow {
    pub radius: f64,
    pub angles: Vec<f64>,
    pub stable: Vec<bool>,
    /// Midpoint between the largest unstable angle and the next stable one.
    pub boundary_angle: Option<f64>,
    /// `(largest unstable angle, next stable angle)`.
    pub bracket: Option<(f64, f64)>,
}

/// Classify `zeta = r e^{i phi}` for every radius and angle by the winding
/// number of the boundary curve, and locate the stability boundary angle
/// for each radius. `angles` must be increasing in `[0, pi]`.
pub fn wedge_probe(
    w: &SchemeWeights,
    radii: &[f64],
    angles: &[f64],
    resolution: usize,
) -> Result<Vec<WedgeRow>> {
    if angles.windows(2).any(|p| !(p[1] > p[0])) || angles.iter().any(|a| !(0.0..=PI).contains(a)) {
        return Err(invalid("angles must be increasing within [0, pi]"));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid("radii must be positive"));
    }
    let locus = boundary_locus(w, resolution)?;
    Ok(radii
        .par_iter()
        .map(|&radius| {
            let stable: Vec<bool> = angles
                .iter()
                .map(|&phi| locus.is_stable_point(Complex64::from_polar(radius, phi)))
                .collect();
            let bracket = stable
                .iter()
                .rposition(|s| !s)
                .filter(|&i| i + 1 < angles.len())
                .map(|i| (angles[i], angles[i + 1]));
            WedgeRow {
                radius,
                angles: angles.to_vec(),
                stable,
                boundary_angle: bracket.map(|(a, b)| 0.5 * (a + b)),
                bracket,
            }
        })
        .collect())
}

/// `F_omega(e^{i theta})` at one angle, with the same tail treatment as the
/// sampled locus.
pub fn locus_point(omega: &Seq, theta: f64) -> Complex64 {
    crate::seqkit::eval_generating_tail(omega, Complex64::from_polar(1.0, theta), TAIL_TERMS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{catalog, counterexample_weights, gl_weights, l1_weights};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gl_locus_matches_closed_form() {
        let alpha = 0.5;
        let w = gl_weights(alpha, 1 << 16).unwrap();
        let locus = boundary_locus(&w, 1024).unwrap();
        assert_eq!(locus.samples.len(), 1023);
        let (theta, v) = locus.samples[511];
        assert_abs_diff_eq!(theta, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(v.re, 2f64.sqrt(), epsilon = 1e-9);
        assert_eq!(v.im, 0.0);
        for &(theta, v) in &locus.samples {
            let z = Complex64::from_polar(1.0, theta);
            let exact = (Complex64::new(1.0, 0.0) - z).powf(alpha);
            assert!((v - exact).norm() < 1e-8, "theta {theta}");
            assert!(v.re > 0.0);
        }
        // conjugate symmetry
        let s = &locus.samples;
        for k in 0..s.len() {
            assert_eq!(s[k].1, s[s.len() - 1 - k].1.conj());
        }
        // arg -> -pi/4 as theta -> 0+
        assert_abs_diff_eq!(s[0].1.arg(), -PI / 4.0, epsilon = 2e-3);
        assert_abs_diff_eq!(
            locus_point(&w.omega, 0.3).arg(),
            -alpha * (PI - 0.3) / 2.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn gl_max_arg_is_alpha_pi_over_two() {
        let w = gl_weights(0.9, 1 << 18).unwrap();
        let locus = boundary_locus(&w, 1 << 12).unwrap();
        let m = max_arg(&locus);
        assert!((m - 0.45 * PI).abs() < 2.0 * PI / 4096.0 + 1e-6, "{m}");
    }

    #[test]
    fn l1_max_arg_below_right_angle() {
        let w = l1_weights(0.5, 1 << 12).unwrap();
        let locus = boundary_locus(&w, 1 << 12).unwrap();
        assert!(max_arg(&locus) < PI / 2.0 - 0.01);
    }

    #[test]
    fn winding_classification_agrees_with_runs() {
        // h = 1 makes zeta = lambda
        let w = gl_weights(0.5, 4096).unwrap();
        let locus = boundary_locus(&w, 4096).unwrap();
        for &(re, im) in &[
            (0.5, 0.2),
            (1.2, 0.0),
            (0.3, 0.6),
            (-0.5, 0.3),
            (0.5, 1.2),
            (2.0, 0.0),
        ] {
            let zeta = Complex64::new(re, im);
            let by_curve = locus.is_stable_point(zeta);
            let by_run = is_stable_empirical(zeta, &w, 1.0, 4096).unwrap().stable;
            assert_eq!(by_curve, by_run, "zeta {zeta}");
        }
    }

    #[test]
    fn empirical_examples() {
        let w = gl_weights(0.5, 4096).unwrap();
        assert!(
            is_stable_empirical(Complex64::new(-1.0, 0.0), &w, 0.1, 4096)
                .unwrap()
                .stable
        );
        assert!(
            is_stable_empirical(Complex64::new(0.0, 1.0), &w, 0.1, 4096)
                .unwrap()
                .stable
        );
        let r = is_stable_empirical(Complex64::new(1.0, 0.0), &w, 0.1, 4096).unwrap();
        assert!(!r.stable);
        assert!(is_stable_empirical(Complex64::new(-1.0, 0.0), &w, 0.1, 100).is_err());
    }

    #[test]
    fn wedge_probe_gl_half() {
        let w = gl_weights(0.5, 1 << 20).unwrap();
        let angles: Vec<f64> = (0..=100).map(|k| PI * k as f64 / 100.0).collect();
        let rows = wedge_probe(&w, &[0.01, 0.1], &angles, 1 << 17).unwrap();
        for row in &rows {
            let b = row.boundary_angle.unwrap();
            assert!(
                (0.25 * PI - 0.05..=0.25 * PI + 0.1).contains(&b),
                "r {} boundary {b}",
                row.radius
            );
            assert!(*row.stable.last().unwrap());
        }
    }

    #[test]
    fn counterexample_phase_approaches_right_angle() {
        let w = counterexample_weights(0.5, 50.0, 0.99, 8192).unwrap();
        let locus = boundary_locus(&w, 4096).unwrap();
        assert!(max_arg(&locus) > 0.4 * PI);
        for cw in catalog(0.5, 4096).unwrap() {
            let m = max_arg(&boundary_locus(&cw, 1024).unwrap());
            assert!(m < PI / 2.0, "{:?}", cw.kind);
        }
    }

    #[test]
    fn left_half_plane_grid_shape() {
        let l = left_half_plane_lambdas();
        assert_eq!(l.len(), 36);
        assert!(l
            .iter()
            .all(|z| z.re <= 1e-15 && z.norm() >= 0.1 - 1e-12 && z.norm() <= 10.0 + 1e-9));
    }
}

//! Method-of-lines subdiffusion on `[0, 1]`:
//! `D_t^alpha u + d u_x = D u_xx`, central differences in space, any
//! CM-preserving scheme in time.
//!
//! The semi-discrete system is written `D_t^alpha U = -L U`, with
//! `(L U)_j = d (U_{j+1} - U_{j-1}) / (2 dx) - D (U_{j+1} - 2 U_j + U_{j-1}) / dx^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::mlf::mittag_leffler;
use crate::schemes::SchemeWeights;
use crate::seqkit::CompensatedSum;
use crate::solver::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `x_j = j dx`, `j = 0..nx-1`, with `u_nx = u_0`.
    Periodic,
    /// Homogeneous Dirichlet: unknowns at `x_j = j dx`, `j = 1..nx-1`.
    /// Only for pure diffusion.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvDiffOperator {
    pub d: f64,
    pub diffusivity: f64,
    pub nx: usize,
    pub boundary: Boundary,
}

impl AdvDiffOperator {
    pub fn periodic(d: f64, diffusivity: f64, nx: usize) -> Result<Self> {
        let op = AdvDiffOperator {
            d,
            diffusivity,
            nx,
            boundary: Boundary::Periodic,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn dirichlet(diffusivity: f64, nx: usize) -> Result<Self> {
        let op = AdvDiffOperator {
            d: 0.0,
            diffusivity,
            nx,
            boundary: Boundary::Dirichlet,
        };
        op.validate()?;
        Ok(op)
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 3 {
            return Err(invalid(format!(
                "need at least 3 grid cells, got {}",
                self.nx
            )));
        }
        if !(self.diffusivity > 0.0 && self.diffusivity.is_finite()) {
            return Err(invalid(format!(
                "diffusivity must be positive, got {}",
                self.diffusivity
            )));
        }
        if !self.d.is_finite() {
            return Err(invalid("advection speed is not finite"));
        }
        if self.boundary == Boundary::Dirichlet && self.d != 0.0 {
            return Err(invalid("the Dirichlet operator is diffusion only"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    /// Number of unknowns.
    pub fn size(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.nx,
            Boundary::Dirichlet => self.nx - 1,
        }
    }

    /// Grid points carrying unknowns.
    pub fn grid(&self) -> Vec<f64> {
        let dx = self.dx();
        match self.boundary {
            Boundary::Periodic => (0..self.nx).map(|j| j as f64 * dx).collect(),
            Boundary::Dirichlet => (1..self.nx).map(|j| j as f64 * dx).collect(),
        }
    }

    /// `(sub, diag, super)` stencil coefficients.
    fn stencil(&self) -> (f64, f64, f64) {
        let dx = self.dx();
        let adv = self.d / (2.0 * dx);
        let dif = self.diffusivity / (dx * dx);
        (-adv - dif, 2.0 * dif, adv - dif)
    }

    /// `L u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.size();
        let (lo, mid, hi) = self.stencil();
        (0..m)
            .map(|j| {
                let (left, right) = match self.boundary {
                    Boundary::Periodic => (u[(j + m - 1) % m], u[(j + 1) % m]),
                    Boundary::Dirichlet => (
                        if j == 0 { 0.0 } else { u[j - 1] },
                        if j + 1 == m { 0.0 } else { u[j + 1] },
                    ),
                };
                lo * left + mid * u[j] + hi * right
            })
            .collect()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.size();
        let (lo, mid, hi) = self.stencil();
        let mut a = DMatrix::zeros(m, m);
        for j in 0..m {
            a[(j, j)] += mid;
            match self.boundary {
                Boundary::Periodic => {
                    a[(j, (j + m - 1) % m)] += lo;
                    a[(j, (j + 1) % m)] += hi;
                }
                Boundary::Dirichlet => {
                    if j > 0 {
                        a[(j, j - 1)] += lo;
                    }
                    if j + 1 < m {
                        a[(j, j + 1)] += hi;
                    }
                }
            }
        }
        a
    }

    /// Eigenvalues of `-L`, paired with the modes used by
    /// [`spectral_reference`].
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match self.boundary {
            Boundary::Periodic => eigenvalues_advdiff(self.d, self.diffusivity, self.nx),
            Boundary::Dirichlet => {
                let dx = self.dx();
                (1..self.nx)
                    .map(|k| {
                        Complex64::new(
                            2.0 * self.diffusivity / (dx * dx) * ((PI * k as f64 * dx).cos() - 1.0),
                            0.0,
                        )
                    })
                    .collect()
            }
        }
    }
}

/// `lambda_j = 2D/dx^2 (cos(2 pi j dx) - 1) - i d/dx sin(2 pi j dx)`,
/// `j = 1..nx`: the eigenvalue of `-L` on the mode `e^{2 pi i j x}`.
pub fn eigenvalues_advdiff(d: f64, diffusivity: f64, nx: usize) -> Vec<Complex64> {
    let dx = 1.0 / nx as f64;
    (1..=nx)
        .map(|j| {
            let phase = 2.0 * PI * j as f64 * dx;
            Complex64::new(
                2.0 * diffusivity / (dx * dx) * (phase.cos() - 1.0),
                -d / dx * phase.sin(),
            )
        })
        .collect()
}

/// Implicit time stepping of `D_h^alpha U^n + L U^n = 0`,
///
/// ```text
/// (omega_0 h^-alpha I + L) U^n = omega_0 h^-alpha U^0 - h^-alpha sum_{j=1}^n omega_j (U^{n-j} - U^0)
/// ```
///
/// with the matrix factorized once.
pub fn solve_subdiffusion(
    op: &AdvDiffOperator,
    u0: &[f64],
    w: &SchemeWeights,
    h: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    let m = op.size();
    if u0.len() != m {
        return Err(Error::GridMismatch(format!(
            "initial field has {} values, operator has {m}",
            u0.len()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("step must be positive, got {h}")));
    }
    if w.omega.len() < n_steps + 1 {
        return Err(invalid(format!(
            "{} weights cannot cover {n_steps} steps",
            w.omega.len()
        )));
    }
    let scale = h.powf(-w.alpha);
    let omega = &w.omega;
    let mut a = op.matrix();
    for j in 0..m {
        a[(j, j)] += omega[0] * scale;
    }
    let lu = a.lu();
    if !lu.is_invertible() {
        return Err(Error::SingularStep);
    }
    let mut values: Vec<Vec<f64>> = vec![u0.to_vec()];
    for n in 1..=n_steps {
        let rhs = DVector::from_iterator(
            m,
            (0..m).map(|i| {
                let mut acc = CompensatedSum::new();
                acc.add(omega[0] * u0[i]);
                for j in 1..=n {
                    acc.add(-omega[j] * (values[n - j][i] - u0[i]));
                }
                scale * acc.value()
            }),
        );
        let sol = lu.solve(&rhs).ok_or(Error::SingularStep)?;
        values.push(sol.iter().copied().collect());
    }
    Ok(Trajectory {
        h,
        times: (0..=n_steps).map(|n| n as f64 * h).collect(),
        values,
        scheme: w.kind.tag(),
    })
}

/// Modal solution `U(t) = sum_k z_k E_alpha(lambda_k t^alpha) phi_k` of the
/// semi-discrete system. Real spectra only, i.e. `d = 0`.
pub fn spectral_reference(
    op: &AdvDiffOperator,
    u0: &[f64],
    alpha: f64,
    t: f64,
) -> Result<Vec<f64>> {
    if op.d != 0.0 {
        return Err(Error::UnsupportedDomain(
            "modal reference needs complex Mittag-Leffler arguments when d != 0".into(),
        ));
    }
    let m = op.size();
    if u0.len() != m {
        return Err(Error::GridMismatch(format!(
            "initial field has {} values, operator has {m}",
            u0.len()
        )));
    }
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0.to_vec());
    }
    let ta = t.powf(alpha);
    match op.boundary {
        Boundary::Periodic => {
            // DFT index k carries the mode e^{2 pi i k x}, eigenvalue index k
            // (k = 0 is the constant mode, listed last by eigenvalues_advdiff).
            let eig = eigenvalues_advdiff(0.0, op.diffusivity, op.nx);
            let mut buf: Vec<Complex64> = u0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let mut planner = FftPlanner::new();
            planner.plan_fft_forward(m).process(&mut buf);
            for (k, c) in buf.iter_mut().enumerate() {
                let lam = eig[(k + m - 1) % m].re;
                *c *= mittag_leffler(alpha, lam * ta)? / m as f64;
            }
            planner.plan_fft_inverse(m).process(&mut buf);
            Ok(buf.iter().map(|c| c.re).collect())
        }
        Boundary::Dirichlet => {
            // sine modes phi_k(x_j) = sin(pi k x_j), orthogonal with norm m+1 / 2
            let n = op.nx;
            let eig = op.eigenvalues();
            let mut out = vec![0.0; m];
            for k in 1..n {
                let phi: Vec<f64> = (1..n)
                    .map(|j| (PI * (k * j) as f64 / n as f64).sin())
                    .collect();
                let coef = 2.0 / n as f64 * phi.iter().zip(u0).map(|(p, u)| p * u).sum::<f64>();
                let decay = mittag_leffler(alpha, eig[k - 1].re * ta)?;
                for (o, p) in out.iter_mut().zip(&phi) {
                    *o += coef * decay * p;
                }
            }
            Ok(out)
        }
    }
}

/// Largest absolute value in a field.
pub fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Euclidean norm scaled by `sqrt(dx)`.
pub fn l2_norm(u: &[f64], dx: f64) -> f64 {
    (u.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{gl_weights, l1_weights};
    use crate::solver::solve_linear_test;
    use approx::assert_abs_diff_eq;

    #[test]
    fn operator_basics() {
        let op = AdvDiffOperator::periodic(10.0, 0.1, 32).unwrap();
        let lu = op.apply(&[2.5; 32]);
        assert!(lu.iter().all(|v| v.abs() < 1e-12));
        let sym = AdvDiffOperator::periodic(0.0, 1.0, 16).unwrap().matrix();
        assert_eq!(sym, sym.transpose());
        let u: Vec<f64> = (0..32).map(|j| (j as f64 * 0.3).sin()).collect();
        let via_matrix = op.matrix() * DVector::from_vec(u.clone());
        for (a, b) in op.apply(&u).iter().zip(via_matrix.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert!(AdvDiffOperator::periodic(1.0, 0.1, 2).is_err());
        assert!(AdvDiffOperator::periodic(1.0, -0.1, 8).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = eigenvalues_advdiff(10.0, 0.1, 32);
        assert_eq!(ev.len(), 32);
        assert!(ev[31].norm() < 1e-12);
        assert_abs_diff_eq!(ev[15].re, -409.6, epsilon = 1e-10);
        assert!(ev[15].im.abs() < 1e-10);
        let peak = ev.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
        assert_abs_diff_eq!(peak, 320.0, epsilon = 1e-10);
        assert!(ev.iter().all(|z| z.re <= 0.0));
    }

    #[test]
    fn eigenvalues_match_operator() {
        // -L e^{2 pi i k x_j} = lambda_k e^{2 pi i k x_j}
        let op = AdvDiffOperator::periodic(3.0, 0.7, 12).unwrap();
        let ev = op.eigenvalues();
        for k in 1..=12 {
            let mode: Vec<Complex64> = (0..12)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / 12.0))
                .collect();
            let re: Vec<f64> = mode.iter().map(|c| c.re).collect();
            let im: Vec<f64> = mode.iter().map(|c| c.im).collect();
            let (lr, li) = (op.apply(&re), op.apply(&im));
            for j in 0..12 {
                let lhs = -Complex64::new(lr[j], li[j]);
                assert!((lhs - ev[k - 1] * mode[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_field_is_stationary() {
        let op = AdvDiffOperator::periodic(10.0, 0.1, 32).unwrap();
        let w = l1_weights(0.9, 64).unwrap();
        let tr = solve_subdiffusion(&op, &[1.5; 32], &w, 0.01, 50).unwrap();
        for v in &tr.values {
            assert!(v.iter().all(|x| (x - 1.5).abs() < 1e-12));
        }
    }

    #[test]
    fn single_mode_matches_linear_test() {
        let (nx, k) = (16, 3);
        let op = AdvDiffOperator::periodic(0.0, 1.0, nx).unwrap();
        let u0: Vec<f64> = op
            .grid()
            .iter()
            .map(|x| (2.0 * PI * k as f64 * x).cos())
            .collect();
        let w = gl_weights(0.5, 256).unwrap();
        let h = 1e-3;
        let tr = solve_subdiffusion(&op, &u0, &w, h, 200).unwrap();
        let lam = op.eigenvalues()[k - 1];
        let amp = solve_linear_test(lam, &w, h, 200, Complex64::new(1.0, 0.0)).unwrap();
        for (n, field) in tr.values.iter().enumerate() {
            for (x, u) in field.iter().zip(&u0) {
                assert_abs_diff_eq!(*x, u * amp.values[n].re, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn spectral_reference_examples() {
        let op = AdvDiffOperator::periodic(0.0, 1.0, 16).unwrap();
        let u0: Vec<f64> = op
            .grid()
            .iter()
            .map(|x| (2.0 * PI * x).sin() + 0.3)
            .collect();
        assert_eq!(spectral_reference(&op, &u0, 0.5, 0.0).unwrap(), u0);
        let lam = op.eigenvalues()[0].re;
        let e = mittag_leffler(0.5, lam).unwrap();
        let got = spectral_reference(&op, &u0, 0.5, 1.0).unwrap();
        for (g, x) in got.iter().zip(op.grid()) {
            assert_abs_diff_eq!(*g, (2.0 * PI * x).sin() * e + 0.3, epsilon = 1e-12);
        }
        let adv = AdvDiffOperator::periodic(1.0, 1.0, 16).unwrap();
        assert!(matches!(
            spectral_reference(&adv, &u0, 0.5, 1.0),
            Err(Error::UnsupportedDomain(_))
        ));
    }

    #[test]
    fn dirichlet_l2_non_increasing_and_reference() {
        let op = AdvDiffOperator::dirichlet(1.0, 24).unwrap();
        let u0: Vec<f64> = op
            .grid()
            .iter()
            .map(|x| x * (1.0 - x) * (1.0 + (7.0 * x).sin()))
            .collect();
        let w = l1_weights(0.5, 512).unwrap();
        let tr = solve_subdiffusion(&op, &u0, &w, 1e-3, 500).unwrap();
        let norms: Vec<f64> = tr.values.iter().map(|v| l2_norm(v, op.dx())).collect();
        assert!(norms.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-13)));
        let r = spectral_reference(&op, &u0, 0.5, 0.5).unwrap();
        let err = tr.values[500]
            .iter()
            .zip(&r)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-2, "{err}");
    }
}

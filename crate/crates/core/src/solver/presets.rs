//! Right-hand sides used by the experiments, all with analytic Jacobians.

use super::Rhs;

/// `f = 0` in any dimension.
#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub dim: usize,
}

impl Rhs for Zero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _t: f64, _u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn jacobian(&self, _t: f64, _u: &[f64], out: &mut [f64]) -> bool {
        out.fill(0.0);
        true
    }
}

/// `f = lambda u`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub lambda: f64,
}

impl Rhs for Linear {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = self.lambda * u[0];
    }
    fn jacobian(&self, _t: f64, _u: &[f64], out: &mut [f64]) -> bool {
        out[0] = self.lambda;
        true
    }
}

/// `f = A u - B u^2`.
#[derive(Debug, Clone, Copy)]
pub struct Logistic {
    pub a: f64,
    pub b: f64,
}

impl Rhs for Logistic {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = self.a * u[0] - self.b * u[0] * u[0];
    }
    fn jacobian(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        out[0] = self.a - 2.0 * self.b * u[0];
        true
    }
}

/// `f = sin(1 + u^2)`.
#[derive(Debug, Clone, Copy)]
pub struct SinSquare;

impl Rhs for SinSquare {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = (1.0 + u[0] * u[0]).sin();
    }
    fn jacobian(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        out[0] = 2.0 * u[0] * (1.0 + u[0] * u[0]).cos();
        true
    }
}

/// `f = -u^3`.
#[derive(Debug, Clone, Copy)]
pub struct CubicDecay;

impl Rhs for CubicDecay {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = -u[0] * u[0] * u[0];
    }
    fn jacobian(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        out[0] = -3.0 * u[0] * u[0];
        true
    }
}

/// `f = sin u`.
#[derive(Debug, Clone, Copy)]
pub struct SinU;

impl Rhs for SinU {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = u[0].sin();
    }
    fn jacobian(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        out[0] = u[0].cos();
        true
    }
}

/// `f = -u + sin t - shift`. A positive `shift` gives a strict subsolution
/// forcing for the comparison tests.
#[derive(Debug, Clone, Copy)]
pub struct ForcedDamping {
    pub shift: f64,
}

impl Rhs for ForcedDamping {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, t: f64, u: &[f64], out: &mut [f64]) {
        out[0] = -u[0] + t.sin() - self.shift;
    }
    fn jacobian(&self, _t: f64, _u: &[f64], out: &mut [f64]) -> bool {
        out[0] = -1.0;
        true
    }
}

/// Fractional financial system
/// `x' = z + (y - 1) x`, `y' = 1 - 0.1 y - x^2`, `z' = -x - z`.
#[derive(Debug, Clone, Copy)]
pub struct Financial;

impl Rhs for Financial {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) {
        let (x, y, z) = (u[0], u[1], u[2]);
        out[0] = z + (y - 1.0) * x;
        out[1] = 1.0 - 0.1 * y - x * x;
        out[2] = -x - z;
    }
    fn jacobian(&self, _t: f64, u: &[f64], out: &mut [f64]) -> bool {
        let (x, y) = (u[0], u[1]);
        out.copy_from_slice(&[y - 1.0, x, 1.0, -2.0 * x, -0.1, 0.0, -1.0, 0.0, -1.0]);
        true
    }
}

//! JSON experiment configurations, one struct per verb.

use std::sync::Arc;

use cmpreserve::schemes::{
    counterexample_weights, cq_theta_weights, gl_weights, interp_weights, l1_weights,
    SchemeWeights, VolterraKernel, VolterraVariant,
};
use cmpreserve::solver::presets::{
    CubicDecay, Financial, ForcedDamping, Linear, Logistic, SinSquare, SinU, Zero,
};
use cmpreserve::solver::Rhs;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeCfg {
    Gl,
    L1,
    Interp,
    CqTheta {
        theta: f64,
    },
    /// Theta-CQ with `theta < 1`, for negative controls.
    Trapezoid {
        theta: f64,
    },
    Counterexample {
        c: f64,
        t1: f64,
    },
    /// Integer-order implicit Euler, `solve` only.
    BackwardEuler,
}

impl SchemeCfg {
    pub fn weights(&self, alpha: f64, n: usize) -> Result<SchemeWeights, CliError> {
        let w = match *self {
            SchemeCfg::Gl => gl_weights(alpha, n),
            SchemeCfg::L1 => l1_weights(alpha, n),
            SchemeCfg::Interp => interp_weights(alpha, n),
            SchemeCfg::CqTheta { theta } => {
                if theta < 1.0 {
                    return Err(CliError::field(
                        "scheme.theta",
                        "cq-theta needs theta >= 1; use trapezoid",
                    ));
                }
                cq_theta_weights(alpha, theta, n)
            }
            SchemeCfg::Trapezoid { theta } => {
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(CliError::field(
                        "scheme.theta",
                        "trapezoid needs 0 < theta < 1",
                    ));
                }
                cq_theta_weights(alpha, theta, n)
            }
            SchemeCfg::Counterexample { c, t1 } => counterexample_weights(alpha, c, t1, n),
            SchemeCfg::BackwardEuler => {
                return Err(CliError::field(
                    "scheme.kind",
                    "backward-euler has no fractional weights; it is accepted by `solve` only",
                ))
            }
        };
        w.map_err(|e| CliError::from_core("scheme", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    /// `f = 0` in the dimension of the initial data.
    Zero,
    Linear {
        lambda: f64,
    },
    Logistic {
        a: f64,
        b: f64,
    },
    /// `f = sin(1 + u^2)`.
    Sinsq,
    CubicDecay,
    SinU,
    ForcedDamping {
        #[serde(default)]
        shift: f64,
    },
    Financial,
}

impl Preset {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Preset::Zero => None,
            Preset::Financial => Some(3),
            _ => Some(1),
        }
    }

    pub fn rhs(&self, dim: usize) -> Arc<dyn Rhs> {
        match *self {
            Preset::Zero => Arc::new(Zero { dim }),
            Preset::Linear { lambda } => Arc::new(Linear { lambda }),
            Preset::Logistic { a, b } => Arc::new(Logistic { a, b }),
            Preset::Sinsq => Arc::new(SinSquare),
            Preset::CubicDecay => Arc::new(CubicDecay),
            Preset::SinU => Arc::new(SinU),
            Preset::ForcedDamping { shift } => Arc::new(ForcedDamping { shift }),
            Preset::Financial => Arc::new(Financial),
        }
    }

    /// Checks every initial state against the preset dimension.
    pub fn check_states(&self, field: &str, states: &[Vec<f64>]) -> Result<usize, CliError> {
        if states.is_empty() {
            return Err(CliError::field(
                field,
                "at least one initial state is required",
            ));
        }
        let dim = self.dim().unwrap_or(states[0].len());
        for (i, s) in states.iter().enumerate() {
            if s.len() != dim || dim == 0 {
                return Err(CliError::field(
                    &format!("{field}[{i}]"),
                    &format!("expected {dim} components, got {}", s.len()),
                ));
            }
            if s.iter().any(|x| !x.is_finite()) {
                return Err(CliError::field(
                    &format!("{field}[{i}]"),
                    "values must be finite",
                ));
            }
        }
        Ok(dim)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub alpha: f64,
    pub scheme: SchemeCfg,
    pub n: usize,
    #[serde(default = "default_cm_depth")]
    pub cm_depth: usize,
}

fn default_cm_depth() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    /// Omitted (or 1) for the backward-Euler path.
    #[serde(default)]
    pub alpha: Option<f64>,
    pub scheme: SchemeCfg,
    pub problem: Preset,
    pub u0: Vec<Vec<f64>>,
    pub h: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VariantCfg {
    BackwardEulerCq,
    ThetaCq { theta: f64 },
    PiecewiseIntegral,
}

impl From<VariantCfg> for VolterraVariant {
    fn from(v: VariantCfg) -> Self {
        match v {
            VariantCfg::BackwardEulerCq => VolterraVariant::BackwardEulerCq,
            VariantCfg::ThetaCq { theta } => VolterraVariant::ThetaCq { theta },
            VariantCfg::PiecewiseIntegral => VolterraVariant::PiecewiseIntegral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelCfg {
    Standard {
        alpha: f64,
    },
    /// Pairs `[c, alpha]`.
    SumOfStandard {
        terms: Vec<[f64; 2]>,
    },
    ExpWeighted {
        alpha: f64,
        gamma: f64,
    },
}

impl KernelCfg {
    pub fn kernel(&self) -> VolterraKernel {
        match self {
            KernelCfg::Standard { alpha } => VolterraKernel::StandardAlpha { alpha: *alpha },
            KernelCfg::SumOfStandard { terms } => {
                VolterraKernel::SumOfStandard(terms.iter().map(|t| (t[0], t[1])).collect())
            }
            KernelCfg::ExpWeighted { alpha, gamma } => VolterraKernel::ExpWeighted {
                alpha: *alpha,
                gamma: *gamma,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolterraConfig {
    pub variant: VariantCfg,
    pub kernels: Vec<KernelCfg>,
    pub problem: Preset,
    pub u0: Vec<Vec<f64>>,
    pub h: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaSet {
    /// The 6 x 6 polar grid with `Re lambda <= 0`, `0.1 <= |lambda| <= 10`.
    LeftHalfPlane,
    Points {
        points: Vec<[f64; 2]>,
    },
    /// Uniform `count[0] x count[1]` lattice over `re x im`.
    Box {
        re: [f64; 2],
        im: [f64; 2],
        count: [usize; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub h: f64,
    pub steps: usize,
    pub lambdas: LambdaSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub alpha: f64,
    pub scheme: SchemeCfg,
    pub n: usize,
    pub resolution: usize,
    #[serde(default)]
    pub grid: Option<GridCfg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceCfg {
    /// `u_0 E_alpha(lambda t^alpha)`; linear preset only.
    MittagLeffler,
    SelfRefined {
        ratio: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub alpha: f64,
    pub schemes: Vec<SchemeCfg>,
    pub problem: Preset,
    pub u0: Vec<f64>,
    pub t_end: f64,
    pub h_list: Vec<f64>,
    pub reference: ReferenceCfg,
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexCfg {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexCfg {
    pub fn parts(&self) -> (f64, f64) {
        match *self {
            ComplexCfg::Real(x) => (x, 0.0),
            ComplexCfg::Pair([re, im]) => (re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub alpha: f64,
    pub schemes: Vec<SchemeCfg>,
    pub lambda: ComplexCfg,
    #[serde(default = "one")]
    pub u0: f64,
    pub h: f64,
    pub steps: usize,
    #[serde(default = "default_decay_depth")]
    pub cm_depth: usize,
}

fn one() -> f64 {
    1.0
}

fn default_decay_depth() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCfg {
    Periodic,
    Dirichlet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorCfg {
    pub boundary: BoundaryCfg,
    #[serde(default)]
    pub d: f64,
    pub diffusivity: f64,
    pub nx: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCfg {
    /// `sin(2 pi k x)` on periodic grids, `sin(pi k x)` on Dirichlet grids.
    Sine {
        mode: usize,
    },
    Gaussian {
        center: f64,
        width: f64,
    },
    Values {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    pub operator: OperatorCfg,
    pub alpha: f64,
    pub scheme: SchemeCfg,
    pub h: f64,
    pub t_end: f64,
    pub initial: InitialCfg,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    /// Also write the modal reference at each snapshot (`d = 0` only).
    #[serde(default)]
    pub reference: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolutionCfg {
    /// `t^alpha / Gamma(1 + alpha)`, with `D^alpha u = 1`.
    Leading,
    /// `t`.
    Linear,
    /// `beta t^alpha / Gamma(1 + alpha) + t`.
    Mixed { beta: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub alpha: f64,
    pub schemes: Vec<SchemeCfg>,
    pub h: f64,
    pub t_end: f64,
    pub solution: SolutionCfg,
}

pub fn check_alpha(field: &str, alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::field(
            field,
            &format!("must lie in (0, 1), got {alpha}"),
        ))
    }
}

pub fn check_positive(field: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::field(
            field,
            &format!("must be positive and finite, got {x}"),
        ))
    }
}

pub fn check_nonempty<T>(field: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        Err(CliError::field(field, "must not be empty"))
    } else {
        Ok(())
    }
}

//! One runner per verb. Each validates its config, computes, writes CSV
//! files and returns the summary record.

use std::path::Path;

use cmpreserve::analysis::{
    convergence_table, decay_rate_fit_values, monotonicity_of, truncation_error, Reference,
};
use cmpreserve::mlf::mittag_leffler;
use cmpreserve::pdelab::{
    l2_norm, solve_subdiffusion, spectral_reference, sup_norm, AdvDiffOperator,
};
use cmpreserve::schemes::{volterra_weights, SchemeWeights};
use cmpreserve::seqkit::{check_cm, Seq};
use cmpreserve::solver::{
    solve_backward_euler, solve_fode, solve_linear_test, solve_volterra, step_count, FodeProblem,
    Trajectory, VolterraProblem,
};
use cmpreserve::special::gamma;
use cmpreserve::stability::{boundary_locus, left_half_plane_lambdas, max_arg, stability_grid};
use num_complex::Complex64;

use crate::config::*;
use crate::csvout;
use crate::{CliError, Summary};

const CM_TOL: f64 = 1e-8;

fn core<T>(context: &str, r: cmpreserve::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_core(context, e))
}

fn tag_of(w: &SchemeWeights) -> String {
    w.kind.tag()
}

/// Direction of a scalar trajectory, or of its norm for systems.
fn record_monotonicity(s: &mut Summary, name: &str, tr: &Trajectory) {
    if tr.dim() == 1 {
        let rep = monotonicity_of(&tr.component(0));
        s.check(
            format!("{name} monotone"),
            rep.is_monotone(),
            format!("{:?}, first break {:?}", rep.direction, rep.first_break),
        );
    } else {
        let rep = monotonicity_of(&tr.norms());
        s.value(
            format!("{name} norm"),
            format!("{:?}, first break {:?}", rep.direction, rep.first_break),
        );
    }
}

pub fn weights(cfg: WeightsConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    if cfg.n == 0 {
        return Err(CliError::field("n", "must be at least 1"));
    }
    let w = cfg.scheme.weights(cfg.alpha, cfg.n)?;
    let mut s = Summary::new("weights", &cfg);
    s.outputs.push(csvout::weights(out, "weights.csv", &w)?);
    s.value("scheme", tag_of(&w));
    if cfg.n >= 2 {
        let rep = core("cm check", check_cm(&w.a, cfg.cm_depth, CM_TOL))?;
        s.check(
            "a is CM",
            rep.is_cm,
            format!(
                "depth {}, min difference {:e}, first violation {:?}",
                rep.depth_checked, rep.min_difference, rep.first_violation
            ),
        );
        let tail: Vec<f64> = w.omega[1..].iter().map(|x| -x).collect();
        let signs = w.omega[0] > 0.0 && tail.iter().all(|&x| x >= 0.0);
        s.check("omega_0 > 0, omega_j <= 0", signs, "");
    }
    Ok(s)
}

pub fn solve(cfg: SolveConfig, out: &Path) -> Result<Summary, CliError> {
    check_positive("h", cfg.h)?;
    check_positive("t_end", cfg.t_end)?;
    let dim = cfg.problem.check_states("u0", &cfg.u0)?;
    let rhs = cfg.problem.rhs(dim);
    let n = step_count(cfg.t_end, cfg.h);
    let mut s = Summary::new("solve", &cfg);
    let weights = match cfg.scheme {
        SchemeCfg::BackwardEuler => {
            if cfg.alpha.is_some_and(|a| a != 1.0) {
                return Err(CliError::field(
                    "alpha",
                    "backward-euler is the alpha = 1 path",
                ));
            }
            None
        }
        scheme => {
            let alpha = cfg
                .alpha
                .ok_or_else(|| CliError::field("alpha", "required for fractional schemes"))?;
            check_alpha("alpha", alpha)?;
            Some((alpha, scheme.weights(alpha, n + 1)?))
        }
    };
    for (i, u0) in cfg.u0.iter().enumerate() {
        let tr = match &weights {
            None => core(
                "solve",
                solve_backward_euler(rhs.as_ref(), u0, cfg.h, cfg.t_end),
            )?,
            Some((alpha, w)) => {
                let p = core(
                    "problem",
                    FodeProblem::new(*alpha, rhs.clone(), u0.clone(), cfg.t_end),
                )?;
                core("solve", solve_fode(&p, w, cfg.h))?
            }
        };
        let name = format!("trajectory_{i}");
        s.outputs
            .push(csvout::trajectory(out, &format!("{name}.csv"), &tr)?);
        s.value(format!("{name} final"), tr.values.last());
        record_monotonicity(&mut s, &name, &tr);
    }
    Ok(s)
}

pub fn volterra(cfg: VolterraConfig, out: &Path) -> Result<Summary, CliError> {
    check_positive("h", cfg.h)?;
    check_positive("t_end", cfg.t_end)?;
    check_nonempty("kernels", &cfg.kernels)?;
    let dim = cfg.problem.check_states("u0", &cfg.u0)?;
    let rhs = cfg.problem.rhs(dim);
    let n = step_count(cfg.t_end, cfg.h);
    let mut s = Summary::new("volterra", &cfg);
    for (k, kc) in cfg.kernels.iter().enumerate() {
        let kernel = kc.kernel();
        let ctx = format!("kernels[{k}]");
        let vw = core(
            &ctx,
            volterra_weights(&kernel, cfg.variant.into(), cfg.h, n + 1),
        )?;
        if vw.b.len() >= 2 {
            let rep = core("cm check", check_cm(&vw.b, 10, CM_TOL))?;
            s.check(
                format!("kernel {k} weights CM"),
                rep.is_cm,
                format!("first violation {:?}", rep.first_violation),
            );
        }
        for (i, u0) in cfg.u0.iter().enumerate() {
            let p = core(
                &ctx,
                VolterraProblem::new(kernel.clone(), rhs.clone(), u0.clone(), cfg.t_end),
            )?;
            let tr = core("solve", solve_volterra(&p, &vw))?;
            let name = format!("trajectory_k{k}_u{i}");
            s.outputs
                .push(csvout::trajectory(out, &format!("{name}.csv"), &tr)?);
            s.value(format!("{name} final"), tr.values.last());
            record_monotonicity(&mut s, &name, &tr);
        }
    }
    Ok(s)
}

fn lambdas_of(set: &LambdaSet) -> Result<Vec<Complex64>, CliError> {
    Ok(match set {
        LambdaSet::LeftHalfPlane => left_half_plane_lambdas(),
        LambdaSet::Points { points } => {
            check_nonempty("grid.lambdas.points", points)?;
            points.iter().map(|p| Complex64::new(p[0], p[1])).collect()
        }
        LambdaSet::Box { re, im, count } => {
            if count[0] == 0 || count[1] == 0 {
                return Err(CliError::field(
                    "grid.lambdas.count",
                    "counts must be positive",
                ));
            }
            let lerp = |r: [f64; 2], k: usize, m: usize| {
                if m == 1 {
                    r[0]
                } else {
                    r[0] + (r[1] - r[0]) * k as f64 / (m - 1) as f64
                }
            };
            let mut v = Vec::with_capacity(count[0] * count[1]);
            for j in 0..count[1] {
                for i in 0..count[0] {
                    v.push(Complex64::new(
                        lerp(*re, i, count[0]),
                        lerp(*im, j, count[1]),
                    ));
                }
            }
            v
        }
    })
}

pub fn stability(cfg: StabilityConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    let w = cfg.scheme.weights(cfg.alpha, cfg.n)?;
    let locus = core("locus", boundary_locus(&w, cfg.resolution))?;
    let mut s = Summary::new("stability", &cfg);
    s.outputs.push(csvout::locus(out, "locus.csv", &locus)?);
    let m = max_arg(&locus);
    s.value("max_arg", m);
    s.value("max_arg_over_pi", m / std::f64::consts::PI);
    s.value("locus_radius", locus.radius());
    s.check(
        "max arg below pi/2",
        m < std::f64::consts::FRAC_PI_2,
        format!("{m}"),
    );
    if let Some(g) = &cfg.grid {
        check_positive("grid.h", g.h)?;
        let lambdas = lambdas_of(&g.lambdas)?;
        let gw = if w.len() > g.steps {
            w
        } else {
            cfg.scheme.weights(cfg.alpha, g.steps + 1)?
        };
        let points = core("grid", stability_grid(&gw, g.h, g.steps, &lambdas))?;
        s.outputs.push(csvout::grid(out, "grid.csv", &points)?);
        let stable = points.iter().filter(|p| p.report.stable).count();
        s.value("grid_stable", stable);
        s.value("grid_total", points.len());
        let lhp_unstable = points
            .iter()
            .filter(|p| p.lambda.re <= 0.0 && !p.report.stable)
            .count();
        s.check(
            "left half plane stable",
            lhp_unstable == 0,
            format!("{lhp_unstable} left-half-plane points classified unstable"),
        );
    }
    Ok(s)
}

pub fn converge(cfg: ConvergeConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    check_positive("t_end", cfg.t_end)?;
    check_nonempty("schemes", &cfg.schemes)?;
    check_nonempty("h_list", &cfg.h_list)?;
    for (i, &h) in cfg.h_list.iter().enumerate() {
        check_positive(&format!("h_list[{i}]"), h)?;
    }
    let dim = cfg
        .problem
        .check_states("u0", std::slice::from_ref(&cfg.u0))?;
    let rhs = cfg.problem.rhs(dim);
    let p = core(
        "problem",
        FodeProblem::new(cfg.alpha, rhs, cfg.u0.clone(), cfg.t_end),
    )?;
    let alpha = cfg.alpha;
    let u0 = cfg.u0.clone();
    let lambda = match (cfg.reference, cfg.problem) {
        (ReferenceCfg::MittagLeffler, Preset::Linear { lambda }) => Some(lambda),
        (ReferenceCfg::MittagLeffler, _) => {
            return Err(CliError::field(
                "reference",
                "mittag-leffler reference needs the linear preset",
            ))
        }
        _ => None,
    };
    if let Some(l) = lambda {
        // the largest argument occurs at t_end
        core(
            "reference",
            mittag_leffler(alpha, l * cfg.t_end.powf(alpha)),
        )?;
    }
    let exact = move |t: f64| -> Vec<f64> {
        let l = lambda.unwrap_or(0.0);
        let e = mittag_leffler(alpha, l * t.powf(alpha)).unwrap_or(f64::NAN);
        u0.iter().map(|x| x * e).collect()
    };
    let reference = match cfg.reference {
        ReferenceCfg::MittagLeffler => Reference::Exact(&exact),
        ReferenceCfg::SelfRefined { ratio } => Reference::SelfRefined { ratio },
    };
    let mut s = Summary::new("converge", &cfg);
    for (k, scheme) in cfg.schemes.iter().enumerate() {
        let factory = |n: usize| {
            scheme
                .weights(alpha, n)
                .map_err(|e| cmpreserve::Error::InvalidArgument(e.to_string()))
        };
        let table = core(
            &format!("schemes[{k}]"),
            convergence_table(&p, &factory, &cfg.h_list, &reference),
        )?;
        let tag = scheme.weights(alpha, 2)?.kind.tag();
        s.outputs.push(csvout::convergence(
            out,
            &format!("convergence_{tag}.csv"),
            &table,
        )?);
        s.check(
            format!("{tag} errors decrease"),
            table.strictly_decreasing(),
            format!("{:?}", table.errors),
        );
        s.value(format!("{tag} final error"), table.errors.last());
    }
    Ok(s)
}

pub fn decay(cfg: DecayConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    check_positive("h", cfg.h)?;
    check_nonempty("schemes", &cfg.schemes)?;
    if cfg.steps < 4 {
        return Err(CliError::field("steps", "must be at least 4"));
    }
    if !(cfg.u0 > 0.0 && cfg.u0.is_finite()) {
        return Err(CliError::field("u0", "must be positive"));
    }
    let (re, im) = cfg.lambda.parts();
    let lambda = Complex64::new(re, im);
    let mut s = Summary::new("decay", &cfg);
    for scheme in &cfg.schemes {
        let w = scheme.weights(cfg.alpha, cfg.steps + 1)?;
        let tag = tag_of(&w);
        let tr = core(
            "solve",
            solve_linear_test(lambda, &w, cfg.h, cfg.steps, Complex64::new(cfg.u0, 0.0)),
        )?;
        let moduli = tr.moduli();
        if im == 0.0 {
            let real = core("solve", tr.into_real())?;
            s.outputs
                .push(csvout::trajectory(out, &format!("decay_{tag}.csv"), &real)?);
            let u = core("cm check", Seq::new(real.component(0)))?;
            let rep = core("cm check", check_cm(&u, cfg.cm_depth, CM_TOL))?;
            s.check(
                format!("{tag} trajectory CM"),
                rep.is_cm,
                format!(
                    "depth {}, first violation {:?}",
                    rep.depth_checked, rep.first_violation
                ),
            );
        } else {
            s.outputs.push(csvout::complex_trajectory(
                out,
                &format!("decay_{tag}.csv"),
                &tr,
            )?);
        }
        match decay_rate_fit_values(&moduli, None) {
            Ok(fit) => {
                s.value(format!("{tag} exponent"), fit.exponent);
                s.check(
                    format!("{tag} decays at least like n^(-alpha/2)"),
                    fit.exponent <= -cfg.alpha / 2.0,
                    format!("fitted exponent {}", fit.exponent),
                );
            }
            Err(e) => s.check(format!("{tag} decay fit"), false, e.to_string()),
        }
        s.value(format!("{tag} final modulus"), moduli.last());
    }
    Ok(s)
}

fn initial_field(cfg: &InitialCfg, op: &AdvDiffOperator) -> Result<Vec<f64>, CliError> {
    let x = op.grid();
    let periodic = cfg_periodic(op);
    Ok(match cfg {
        InitialCfg::Sine { mode } => {
            let k = *mode as f64 * if periodic { 2.0 } else { 1.0 } * std::f64::consts::PI;
            x.iter().map(|x| (k * x).sin()).collect()
        }
        InitialCfg::Gaussian { center, width } => {
            check_positive("initial.width", *width)?;
            x.iter()
                .map(|x| (-((x - center) / width).powi(2)).exp())
                .collect()
        }
        InitialCfg::Values { values } => {
            if values.len() != x.len() {
                return Err(CliError::field(
                    "initial.values",
                    &format!("expected {} values, got {}", x.len(), values.len()),
                ));
            }
            values.clone()
        }
    })
}

fn cfg_periodic(op: &AdvDiffOperator) -> bool {
    matches!(op.boundary, cmpreserve::pdelab::Boundary::Periodic)
}

pub fn pde(cfg: PdeConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    check_positive("h", cfg.h)?;
    check_positive("t_end", cfg.t_end)?;
    let oc = &cfg.operator;
    let op = match oc.boundary {
        BoundaryCfg::Periodic => core(
            "operator",
            AdvDiffOperator::periodic(oc.d, oc.diffusivity, oc.nx),
        )?,
        BoundaryCfg::Dirichlet => {
            if oc.d != 0.0 {
                return Err(CliError::field(
                    "operator.d",
                    "dirichlet grids support d = 0 only",
                ));
            }
            core(
                "operator",
                AdvDiffOperator::dirichlet(oc.diffusivity, oc.nx),
            )?
        }
    };
    if cfg.reference && oc.d != 0.0 {
        return Err(CliError::field("reference", "modal reference needs d = 0"));
    }
    let u0 = initial_field(&cfg.initial, &op)?;
    let n = step_count(cfg.t_end, cfg.h);
    let mut snaps = Vec::new();
    for (i, &t) in cfg.snapshots.iter().enumerate() {
        let k = (t / cfg.h).round();
        if !(t >= 0.0) || k as usize > n || ((k * cfg.h) - t).abs() > 1e-9 * t.max(1.0) {
            return Err(CliError::field(
                &format!("snapshots[{i}]"),
                "must be a multiple of h within [0, t_end]",
            ));
        }
        snaps.push(k as usize);
    }
    let w = cfg.scheme.weights(cfg.alpha, n + 1)?;
    let tr = core("solve", solve_subdiffusion(&op, &u0, &w, cfg.h, n))?;
    let mut s = Summary::new("pde", &cfg);
    s.outputs.push(csvout::eigenvalues(
        out,
        "eigenvalues.csv",
        &op.eigenvalues(),
    )?);
    let x = op.grid();
    let dx = op.dx();
    let norms: Vec<Vec<String>> = tr
        .values
        .iter()
        .enumerate()
        .map(|(k, u)| {
            vec![
                k.to_string(),
                format!("{}", tr.times[k]),
                format!("{}", sup_norm(u)),
                format!("{}", l2_norm(u, dx)),
            ]
        })
        .collect();
    let header: Vec<String> = ["n", "t", "sup", "l2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    s.outputs.push(csvout::write_table(
        out,
        "norms.csv",
        "norms",
        &header,
        norms,
    )?);
    for (i, &k) in snaps.iter().enumerate() {
        s.outputs.push(csvout::field(
            out,
            &format!("field_{i}.csv"),
            &x,
            &tr.values[k],
        )?);
        if cfg.reference {
            let r = core(
                "reference",
                spectral_reference(&op, &u0, cfg.alpha, tr.times[k]),
            )?;
            s.outputs
                .push(csvout::field(out, &format!("reference_{i}.csv"), &x, &r)?);
            let err = tr.values[k]
                .iter()
                .zip(&r)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            s.value(format!("snapshot {i} sup error"), err);
        }
    }
    let s0 = sup_norm(&u0);
    let bounded = tr.values.iter().all(|u| sup_norm(u) <= s0 * (1.0 + 1e-8));
    s.check(
        "sup norm bounded by initial",
        bounded,
        format!("initial {s0}"),
    );
    let l2: Vec<f64> = tr.values.iter().map(|u| l2_norm(u, dx)).collect();
    let l2_ok = l2.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-13));
    if oc.d == 0.0 {
        s.check("l2 norm non-increasing", l2_ok, "");
    } else {
        // complex spectrum: modal amplitudes oscillate, so no monotonicity is claimed
        s.value("l2 norm non-increasing", l2_ok);
    }
    Ok(s)
}

pub fn truncation(cfg: TruncationConfig, out: &Path) -> Result<Summary, CliError> {
    check_alpha("alpha", cfg.alpha)?;
    check_positive("h", cfg.h)?;
    check_positive("t_end", cfg.t_end)?;
    check_nonempty("schemes", &cfg.schemes)?;
    let alpha = cfg.alpha;
    let n = step_count(cfg.t_end, cfg.h) + 1;
    let t: Vec<f64> = (0..n).map(|k| k as f64 * cfg.h).collect();
    let g1 = gamma(1.0 + alpha);
    let g2 = gamma(2.0 - alpha);
    let (beta, lin) = match cfg.solution {
        SolutionCfg::Leading => (1.0, 0.0),
        SolutionCfg::Linear => (0.0, 1.0),
        SolutionCfg::Mixed { beta } => (beta, 1.0),
    };
    let u: Vec<f64> = t
        .iter()
        .map(|t| beta * t.powf(alpha) / g1 + lin * t)
        .collect();
    let f: Vec<f64> = t
        .iter()
        .map(|t| beta + lin * t.powf(1.0 - alpha) / g2)
        .collect();
    let mut s = Summary::new("truncation", &cfg);
    for scheme in &cfg.schemes {
        let w = scheme.weights(alpha, n)?;
        let tag = tag_of(&w);
        let r = core("truncation", truncation_error(&w, &u, &f, cfg.h))?;
        s.outputs.push(csvout::series(
            out,
            &format!("truncation_{tag}.csv"),
            "truncation",
            "r",
            cfg.h,
            &r,
        )?);
        let sup = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        s.value(format!("{tag} sup"), sup);
        if n > 1 {
            s.value(format!("{tag} r_1"), r[1]);
            s.value(format!("{tag} r_last"), r[n - 1]);
        }
        if n > 1 && matches!(scheme, SchemeCfg::Gl) && cfg.solution == SolutionCfg::Leading {
            let closed = 1.0 / g1 - 1.0;
            s.check(
                "gl r_1 closed form",
                (r[1] - closed).abs() < 1e-12,
                format!("{} vs {closed}", r[1]),
            );
        }
    }
    Ok(s)
}

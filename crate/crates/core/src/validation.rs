//! Built-in invariant checks run by `qfridge validate`.
//!
//! Each check compares two independent computations or tests a physical
//! identity on the three standard models.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_liouvillian_with, master_equation_rhs, solve_stationary, Fault, SolverOptions};
use crate::error::Result;
use crate::models::{FridgeModel, ModelIIIParams, ModelIIParams, ModelIParams, ModelParams};
use crate::observables::{heat_currents, temperatures};
use crate::tensor::{identity, insert_factor, ket_bra, max_abs, partial_trace, trace, ComplexMatrix, SpaceShape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst deviation seen.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Default thresholds, replaced uniformly by `tol` when one is given.
const ORACLE_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const ENERGY_TOL: f64 = 1e-12;
const EQUILIBRIUM_T_TOL: f64 = 1e-9;
const DEGENERACY_TOL: f64 = 1e-12;

pub fn run_validation(tol: Option<f64>) -> Result<ValidationReport> {
    run_validation_with(tol, None)
}

#[doc(hidden)]
pub fn run_validation_with(tol: Option<f64>, fault: Option<Fault>) -> Result<ValidationReport> {
    let t = |default: f64| tol.unwrap_or(default);
    let driven = standard_models(4.0)?;
    let equilibrium = standard_models(1.0)?;

    let mut checks = Vec::new();

    let mut oracle = 0.0f64;
    let mut trace_leak = 0.0f64;
    for (_, model) in &driven {
        let rho = sample_state(model.dim());
        let generated = build_liouvillian_with(model, fault).apply(&rho);
        let direct = master_equation_rhs(model, &rho)?;
        oracle = oracle.max(max_abs(&(&generated - &direct)));
        trace_leak = trace_leak.max(trace(&generated).norm());
    }
    checks.push(check(
        "oracle_equivalence",
        oracle,
        t(ORACLE_TOL),
        "vectorized generator vs direct master equation",
    ));
    checks.push(check("trace_preservation", trace_leak, t(TRACE_TOL), "|Tr L(rho)| on a mixed state"));

    let opts = SolverOptions::with_tol(t(crate::dynamics::DEFAULT_TOL));
    let mut imbalance = 0.0f64;
    for (_, model) in &driven {
        let s = solve_stationary(&build_liouvillian_with(model, fault), &opts)?;
        imbalance = imbalance.max(heat_currents(model, &s.rho)?.total().abs());
    }
    checks.push(check(
        "energy_balance",
        imbalance,
        t(ENERGY_TOL),
        "|sum of stationary heat currents|",
    ));

    let mut t_dev = 0.0f64;
    let mut q_dev = 0.0f64;
    for (_, model) in &equilibrium {
        let s = solve_stationary(&build_liouvillian_with(model, fault), &opts)?;
        for r in temperatures(model, &s.rho)? {
            t_dev = t_dev.max((r.value - 1.0).abs());
        }
        for q in heat_currents(model, &s.rho)?.per_particle {
            q_dev = q_dev.max(q.abs());
        }
    }
    checks.push(check(
        "equilibrium_temperature",
        t_dev,
        t(EQUILIBRIUM_T_TOL),
        "all baths at T = 1: |T_i - 1|",
    ));
    checks.push(check(
        "equilibrium_currents",
        q_dev,
        t(ENERGY_TOL),
        "all baths at T = 1: |Q_i|",
    ));

    let defect = driven.iter().map(|(_, m)| m.degeneracy_defect()).fold(0.0, f64::max);
    checks.push(check("commuting_hamiltonians", defect, t(DEGENERACY_TOL), "[H0, Hint]"));

    checks.push(check(
        "partial_trace_duality",
        partial_trace_duality()?,
        t(ORACLE_TOL),
        "Tr(Tr_i(rho) X) = Tr(rho (1_i ⊗ X)) on dims [2, 3, 2]",
    ));

    Ok(ValidationReport { checks })
}

fn check(name: &str, value: f64, threshold: f64, detail: &str) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: value.is_finite() && value <= threshold,
        value,
        threshold,
        detail: detail.to_string(),
    }
}

/// Models I, II and III with `Th = th` and every other temperature at 1.
fn standard_models(th: f64) -> Result<Vec<(&'static str, FridgeModel)>> {
    let (p, g) = (2e-3, 1e-3);
    let params = [
        (
            "I",
            ModelParams::I(ModelIParams {
                e1: 1.0,
                e2: 3.0,
                tc: 1.0,
                tr: 1.0,
                th,
                p1: p,
                p2: 1.5 * p,
                p3: 0.5 * p,
                g,
            }),
        ),
        (
            "II",
            ModelParams::II(ModelIIParams {
                e1: 1.0,
                e2: 1.5,
                tc: 1.0,
                th,
                p1: p,
                p2: p,
                p3: p,
                g,
                h: 0.5 * g,
            }),
        ),
        (
            "III",
            ModelParams::III(ModelIIIParams {
                e1: 1.0,
                e2: 3.0,
                tc: 1.0,
                tr: 1.0,
                th,
                p1: p,
                ph: p,
                pr: p,
                g,
            }),
        ),
    ];
    params.iter().map(|(name, p)| Ok((*name, p.build()?))).collect()
}

/// Full-rank state with coherences between every pair of levels.
fn sample_state(n: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        let k = (i * n + j) as f64;
        Complex64::new((1.3 * k + 0.4).sin(), (0.7 * k + 1.1).cos())
    });
    let rho = &a * a.adjoint();
    let t = trace(&rho);
    rho.map(|z| z / t)
}

fn partial_trace_duality() -> Result<f64> {
    let shape = SpaceShape::new(vec![2, 3, 2])?;
    let rho = sample_state(shape.total_dim());
    let mut worst = 0.0f64;
    for i in 0..shape.num_particles() {
        let d = shape.dims()[i];
        let reduced = partial_trace(&rho, i, &shape)?;
        let m = reduced.nrows();
        for a in 0..m {
            for b in 0..m {
                let probe = insert_factor(&identity(d), i, &ket_bra(m, a, b), &shape)?;
                let lhs = reduced[(b, a)];
                let rhs = trace(&(&rho * probe));
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}

//! Master-equation generator, stationary states and time evolution.
//!
//! Density matrices are vectorized by stacking columns, so
//! `vec(A X B) = (B^T ⊗ A) vec(X)` and every superoperator below follows
//! from that identity.

use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FridgeError, Result};
use crate::models::{jump_rates, thermal_state, ChannelKind, FridgeModel};
use crate::tensor::{
    self, check_density, embed, hermitian_norm, hermitian_part, identity, ket_bra, kron, max_abs,
    unvectorize, vectorize, ComplexMatrix, DensityDiagnostics, I, ONE,
};

/// Default absolute bound on the largest entry of `L(rho_s)`.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Second-smallest singular value below which the stationary state is
/// reported as possibly non-unique.
pub const UNIQUENESS_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub uniqueness_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            uniqueness_threshold: UNIQUENESS_THRESHOLD,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Deliberate defects for exercising the validation suite.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Builds `-i(H rho + rho H)` in place of the commutator.
    CommutatorSign,
}

/// Generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `L(rho)` reshaped back to a matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }
}

pub fn build_liouvillian(model: &FridgeModel) -> Liouvillian {
    build_liouvillian_with(model, None)
}

#[doc(hidden)]
pub fn build_liouvillian_with(model: &FridgeModel, fault: Option<Fault>) -> Liouvillian {
    let n = model.dim();
    let id = identity(n);
    let h = model.hamiltonian();
    let right = match fault {
        None => -kron(&h.transpose(), &id),
        Some(Fault::CommutatorSign) => kron(&h.transpose(), &id),
    };
    let mut matrix = (kron(&id, &h) + right).map(|z| -I * z);

    for (i, particle) in model.particles().iter().enumerate() {
        for channel in particle.baths.iter().filter(|c| c.rate > 0.0) {
            matrix += match channel.kind {
                ChannelKind::FullReset => {
                    let tau = thermal_state(particle, channel.temperature)
                        .expect("channel temperatures are validated at construction");
                    (reset_superoperator(&tau, i, model) - kron(&id, &id)).scale(channel.rate)
                }
                ChannelKind::TransitionJump { lower, upper } => {
                    let (down, up) = jump_rates(channel, particle).expect("transition channel");
                    let lowering =
                        embed(&ket_bra(particle.levels(), lower, upper), i, model.shape())
                            .expect("levels are validated at construction");
                    let raising = lowering.adjoint();
                    lindblad_superoperator(&lowering).scale(down)
                        + lindblad_superoperator(&raising).scale(up)
                }
            };
        }
    }
    Liouvillian { dim: n, matrix }
}

/// `rho -> tau ⊗_i Tr_i rho` written as `sum_{a,b,k} tau_ab K_ak rho K_bk^†`
/// with `K_ak = |a><k|` on particle `i`.
fn reset_superoperator(tau: &ComplexMatrix, particle: usize, model: &FridgeModel) -> ComplexMatrix {
    let n = model.dim();
    let d = tau.nrows();
    let shape = model.shape();
    let k_op = |a: usize, k: usize| embed(&ket_bra(d, a, k), particle, shape).expect("valid slot");
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for a in 0..d {
        for b in 0..d {
            let t = tau[(a, b)];
            if t == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..d {
                out += kron(&k_op(b, k).conjugate(), &k_op(a, k)).map(|z| z * t);
            }
        }
    }
    out
}

/// `L rho L^† - {L^† L, rho}/2`.
fn lindblad_superoperator(jump: &ComplexMatrix) -> ComplexMatrix {
    let id = identity(jump.nrows());
    let jdj = jump.adjoint() * jump;
    kron(&jump.conjugate(), jump) - (kron(&id, &jdj) + kron(&jdj.transpose(), &id)).scale(0.5)
}

/// Direct evaluation of the master-equation right-hand side, without the
/// vectorized generator.
pub fn master_equation_rhs(model: &FridgeModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = model.hamiltonian();
    let mut out = tensor::commutator(&h, rho).map(|z| -I * z);
    for i in 0..model.shape().num_particles() {
        out += crate::models::particle_dissipator(model, i, rho)?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: ComplexMatrix,
    /// Largest entry of `L(rho)`.
    pub residual: f64,
    /// Second-smallest singular value of `L`.
    pub uniqueness_gap: f64,
    pub diagnostics: DensityDiagnostics,
    pub converged: bool,
    pub degenerate: bool,
}

pub fn steady_state(model: &FridgeModel, tol: f64) -> Result<SteadyStateResult> {
    steady_state_with(model, &SolverOptions::with_tol(tol))
}

pub fn steady_state_with(model: &FridgeModel, opts: &SolverOptions) -> Result<SteadyStateResult> {
    if !model.has_dissipation() {
        return Err(FridgeError::NonUniqueStationaryState);
    }
    solve_stationary(&build_liouvillian(model), opts)
}

/// Solves `L vec(rho) = 0` with `Tr rho = 1`.
///
/// The equation for `rho_00` follows from the other diagonal equations when
/// `L` preserves the trace, so its row is replaced by the trace condition and
/// the square system is solved by full-pivot LU with one refinement step.
pub fn solve_stationary(l: &Liouvillian, opts: &SolverOptions) -> Result<SteadyStateResult> {
    let n = l.dim();
    let n2 = n * n;
    let mut system = l.matrix().clone();
    system.row_mut(0).fill(Complex64::new(0.0, 0.0));
    for j in 0..n {
        system[(0, j * n + j)] = ONE;
    }
    let mut rhs = DVector::zeros(n2);
    rhs[0] = ONE;

    let lu = system.clone().full_piv_lu();
    let singular = || FridgeError::Numerical("stationary system is singular".into());
    let mut x = lu.solve(&rhs).ok_or_else(singular)?;
    let correction = lu.solve(&(&rhs - &system * &x)).ok_or_else(singular)?;
    x += correction;
    let mut rho = hermitian_part(&unvectorize(&x, n));
    let t = tensor::trace(&rho);
    rho = rho.map(|z| z / t);

    let residual = max_abs(&l.apply(&rho));
    let mut values: Vec<f64> = l.matrix().singular_values().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let uniqueness_gap = values.get(1).copied().unwrap_or(0.0);
    let degenerate = uniqueness_gap < opts.uniqueness_threshold;
    if degenerate {
        warn!("stationary manifold may be degenerate: second singular value {uniqueness_gap:e}");
    }
    Ok(SteadyStateResult {
        diagnostics: check_density(&rho),
        rho,
        residual,
        uniqueness_gap,
        converged: residual <= opts.tol,
        degenerate,
    })
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    /// Step actually used.
    pub dt: f64,
    /// Number of times the requested step was halved.
    pub halvings: u32,
    pub final_diagnostics: DensityDiagnostics,
}

impl Trajectory {
    pub fn final_state(&self) -> &ComplexMatrix {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// Largest stable step for [`evolve`]: a tenth of the inverse of the
/// Hamiltonian norm plus the total bath rate.
pub fn max_step(model: &FridgeModel) -> f64 {
    let scale = hermitian_norm(&model.hamiltonian())
        + model.particles().iter().map(|p| p.total_rate()).sum::<f64>();
    if scale > 0.0 {
        0.1 / scale
    } else {
        f64::INFINITY
    }
}

/// Fixed-step classical Runge-Kutta integration from `rho0` to `t_final`,
/// keeping `samples + 1` evenly spaced states (including both ends).
pub fn evolve(
    model: &FridgeModel,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: Option<f64>,
    samples: usize,
) -> Result<Trajectory> {
    evolve_generator(&build_liouvillian(model), max_step(model), rho0, t_final, dt, samples)
}

pub fn evolve_generator(
    l: &Liouvillian,
    step_bound: f64,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: Option<f64>,
    samples: usize,
) -> Result<Trajectory> {
    let n = l.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(FridgeError::DimensionMismatch {
            expected: n,
            found: rho0.nrows(),
        });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(FridgeError::InvalidParameter {
            name: "t_final".into(),
            reason: format!("must be finite and non-negative, got {t_final}"),
        });
    }
    let samples = samples.max(1);
    let mut dt = match dt {
        Some(dt) if dt > 0.0 => dt,
        Some(dt) => {
            return Err(FridgeError::InvalidParameter {
                name: "dt".into(),
                reason: format!("must be positive, got {dt}"),
            })
        }
        None if step_bound.is_finite() => step_bound,
        None => (t_final / 1000.0).max(f64::MIN_POSITIVE),
    };
    let mut halvings = 0;
    if dt > step_bound {
        warn!("time step {dt} exceeds the stability bound {step_bound}; halving");
        while dt > step_bound {
            dt *= 0.5;
            halvings += 1;
        }
    }

    // Whole number of steps, a multiple of the sample count.
    let per_sample = ((t_final / dt / samples as f64).ceil() as usize).max(1);
    let steps = per_sample * samples;
    let h = if t_final > 0.0 { t_final / steps as f64 } else { 0.0 };
    let propagator = rk4_propagator(l.matrix(), h);

    let mut x = vectorize(rho0);
    let mut times = Vec::with_capacity(samples + 1);
    let mut states = Vec::with_capacity(samples + 1);
    times.push(0.0);
    states.push(rho0.clone());
    for s in 1..=samples {
        for _ in 0..per_sample {
            x = &propagator * &x;
        }
        times.push(h * (s * per_sample) as f64);
        states.push(unvectorize(&x, n));
    }
    let final_diagnostics = check_density(states.last().expect("non-empty"));
    Ok(Trajectory {
        times,
        states,
        dt: h,
        halvings,
        final_diagnostics,
    })
}

/// One RK4 step of the linear system `x' = L x`, as a matrix:
/// `I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24`.
fn rk4_propagator(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let m = l.nrows();
    let hl = l.scale(h);
    let id = ComplexMatrix::identity(m, m);
    let mut p = &id + hl.scale(0.25);
    p = &id + (&hl * p).scale(1.0 / 3.0);
    p = &id + (&hl * p).scale(0.5);
    &id + &hl * p
}

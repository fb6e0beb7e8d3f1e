use alloc::vec::Vec;

#[allow(unused_imports)] // only needed without std
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::l1::project_l1_ball;
use super::operator::LinearOperator;
use crate::error::{invalid, Error, Result};

const STEP_MIN: f64 = 1e-16;
const STEP_MAX: f64 = 1e5;
const GAMMA: f64 = 1e-4;
const MAX_LINE_SEARCH: usize = 40;
const DEC_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Spectral projected-gradient iterations; `None` means `10·N`.
    pub max_iters: Option<usize>,
    /// Relative duality-gap tolerance of each LASSO subproblem.
    pub opt_tol: f64,
    /// Relative residual tolerance for the root of the Pareto curve.
    pub pareto_tol: f64,
    /// Nonmonotone line-search memory.
    pub memory: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: None,
            opt_tol: 1e-6,
            pareto_tol: 1e-4,
            memory: 3,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.opt_tol > 0.0) || !(self.pareto_tol > 0.0) || self.memory == 0 || self.max_iters == Some(0) {
            return Err(invalid("solver tolerances, memory and iteration limit must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    /// `sigma ≥ ‖b‖`: zero already satisfies the constraint.
    Trivial,
    MaxIterations,
    LineSearchFailed,
    /// `Θᵀr = 0` with the residual still above target.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub s: Vec<f64>,
    pub residual_norm: f64,
    pub tau_final: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: SolverStatus,
    /// ℓ1 radius at each Pareto root-finding step.
    pub tau_path: Vec<f64>,
    /// Subproblem residual `φ(τ)` reached at each step of `tau_path`.
    pub residual_path: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct State {
    x: Vec<f64>,
    r: Vec<f64>,
    g: Vec<f64>,
    f: f64,
}

impl State {
    fn at<A: LinearOperator + ?Sized>(op: &A, b: &[f64], x: Vec<f64>) -> Self {
        let ax = op.apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let g: Vec<f64> = op.adjoint(&r).into_iter().map(|v| -v).collect();
        let f = 0.5 * dot(&r, &r);
        Self { x, r, g, f }
    }
}

/// Basis pursuit (denoise): `min ‖s‖₁` subject to `‖Θs − b‖₂ ≤ sigma`.
///
/// Newton root-finding on the Pareto curve `φ(τ) = min_{‖s‖₁≤τ} ‖Θs − b‖₂`,
/// each LASSO subproblem solved by spectral projected gradient with a
/// nonmonotone curvilinear line search and warm starts. The problem is
/// solved on `b/‖b‖` internally, so tolerances are scale free.
pub fn basis_pursuit<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    sigma: f64,
    opts: &SolverOptions,
) -> Result<SolverResult> {
    opts.validate()?;
    if b.len() != op.rows() {
        return Err(Error::DimensionMismatch {
            expected: op.rows(),
            actual: b.len(),
        });
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma must be finite and non-negative"));
    }
    let n = op.cols();
    let b_norm = norm2(b);
    if b_norm == 0.0 || sigma >= b_norm {
        return Ok(SolverResult {
            s: alloc::vec![0.0; n],
            residual_norm: b_norm,
            tau_final: 0.0,
            iterations: 0,
            converged: true,
            status: SolverStatus::Trivial,
            tau_path: Vec::new(),
            residual_path: Vec::new(),
        });
    }
    let bs: Vec<f64> = b.iter().map(|v| v / b_norm).collect();
    let sig = sigma / b_norm;
    let target = |r_norm: f64| {
        if sig == 0.0 {
            r_norm <= opts.pareto_tol
        } else {
            r_norm <= sig * (1.0 + opts.pareto_tol)
        }
    };
    let max_iters = opts.max_iters.unwrap_or(10 * n);

    let mut st = State::at(op, &bs, alloc::vec![0.0; n]);
    let mut tau = 0.0;
    let mut tau_path = Vec::new();
    let mut residual_path = Vec::new();
    let mut last_f = alloc::vec![st.f; opts.memory];
    // Cauchy step along the initial gradient.
    let ag = op.apply(&st.g);
    let mut step = (dot(&st.g, &st.g) / dot(&ag, &ag).max(f64::MIN_POSITIVE)).clamp(STEP_MIN, STEP_MAX);
    let mut iters = 0;
    let mut f_prev = f64::INFINITY;
    let mut fresh_tau = false;
    let mut force_update = false;
    let mut failures = 0;
    let mut best = (norm2(&st.r), st.x.clone());

    let status = loop {
        let r_norm = norm2(&st.r);
        if r_norm < best.0 {
            best = (r_norm, st.x.clone());
        }
        if target(r_norm) {
            break SolverStatus::Converged;
        }
        let g_norm = norm_inf(&st.g);
        let gap = dot(&st.r, &st.r) - dot(&st.r, &bs) + tau * g_norm;
        let rel_gap = gap.abs() / st.f.max(1.0);
        let f_err = (st.f - 0.5 * sig * sig).abs() / st.f.max(1.0);
        let small_change = (f_prev - st.f).abs();
        let stagnant = if r_norm > 2.0 * sig {
            small_change <= DEC_TOL * st.f
        } else {
            small_change <= 0.1 * st.f * (r_norm - sig).abs()
        };
        // Newton step less the duality gap: by weak duality this never
        // passes the root, so an inexact subproblem cannot overshoot τ.
        let safe_step = (r_norm * (r_norm - sig) - gap.max(0.0)) / g_norm;
        let ready = rel_gap <= opts.opt_tol.max(f_err) && (safe_step > 0.0 || r_norm <= sig);
        if !fresh_tau && (ready || stagnant || force_update) {
            if g_norm == 0.0 {
                break SolverStatus::Stalled;
            }
            tau_path.push(tau);
            residual_path.push(r_norm);
            let tau_old = tau;
            let step = if safe_step > 0.0 || r_norm <= sig {
                safe_step
            } else {
                r_norm * (r_norm - sig) / g_norm
            };
            tau = (tau + step).max(0.0);
            if tau < tau_old {
                st = State::at(op, &bs, project_l1_ball(&st.x, tau));
            }
            last_f.iter_mut().for_each(|v| *v = st.f);
            fresh_tau = true;
            force_update = false;
            f_prev = f64::INFINITY;
            continue;
        }
        fresh_tau = false;
        if iters >= max_iters {
            break SolverStatus::MaxIterations;
        }
        iters += 1;

        let f_max = last_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = None;
        // Curvilinear search: project along the gradient path.
        let mut alpha = step;
        for _ in 0..MAX_LINE_SEARCH {
            let x_new = project_l1_ball(
                &st.x.iter().zip(&st.g).map(|(x, g)| x - alpha * g).collect::<Vec<_>>(),
                tau,
            );
            let dx: Vec<f64> = x_new.iter().zip(&st.x).map(|(a, b)| a - b).collect();
            let gtd = dot(&st.g, &dx);
            if gtd >= 0.0 {
                break;
            }
            let cand = State::at(op, &bs, x_new);
            if cand.f <= f_max + GAMMA * gtd {
                accepted = Some(cand);
                break;
            }
            alpha *= 0.5;
            if alpha < STEP_MIN {
                break;
            }
        }
        if accepted.is_none() {
            // Backtrack along the feasible direction instead.
            let xp = project_l1_ball(
                &st.x.iter().zip(&st.g).map(|(x, g)| x - step * g).collect::<Vec<_>>(),
                tau,
            );
            let d: Vec<f64> = xp.iter().zip(&st.x).map(|(a, b)| a - b).collect();
            let gtd = dot(&st.g, &d);
            if gtd < 0.0 {
                let mut lambda = 1.0;
                for _ in 0..MAX_LINE_SEARCH {
                    let x_new: Vec<f64> = st.x.iter().zip(&d).map(|(x, d)| x + lambda * d).collect();
                    let cand = State::at(op, &bs, x_new);
                    if cand.f <= f_max + GAMMA * lambda * gtd {
                        accepted = Some(cand);
                        break;
                    }
                    lambda *= 0.5;
                }
            }
        }
        let Some(next) = accepted else {
            // No descent left at this radius: move τ instead.
            failures += 1;
            if failures >= 3 {
                break SolverStatus::LineSearchFailed;
            }
            force_update = true;
            continue;
        };
        failures = 0;
        let s: Vec<f64> = next.x.iter().zip(&st.x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.g.iter().zip(&st.g).map(|(a, b)| a - b).collect();
        let sts = dot(&s, &s);
        let sty = dot(&s, &y);
        step = if sty <= 0.0 {
            STEP_MAX
        } else {
            (sts / sty).clamp(STEP_MIN, STEP_MAX)
        };
        f_prev = st.f;
        st = next;
        last_f[iters % opts.memory] = st.f;
    };

    let converged = status == SolverStatus::Converged;
    let x = if converged { st.x } else { best.1 };
    let residual = if converged { norm2(&st.r) } else { best.0 };
    Ok(SolverResult {
        s: x.into_iter().map(|v| v * b_norm).collect(),
        residual_norm: residual * b_norm,
        tau_final: tau * b_norm,
        iterations: iters,
        converged,
        status,
        tau_path: tau_path.into_iter().map(|t| t * b_norm).collect(),
        residual_path: residual_path.into_iter().map(|r| r * b_norm).collect(),
    })
}

//! Runtime checks of the convergence theory: the merit function
//! `E(x, y) = F(x) + (L/2) ||x - y||^2`, the per-iteration descent bound
//!
//! ```text
//! E(x^t, x^{t-1}) - E(x^{t+1}, x^t) >= (L/2)(1 - beta_t^2) ||x^t - x^{t-1}||^2
//! ```
//!
//! and a computable stationarity residual.

use crate::error::{contract, Result};
use crate::instances::{objective, smooth_eval, ProblemInstance};
use crate::linalg::{dist, norm};
use crate::regularizers::RegularizerSpec;
use crate::solvers::SolveResult;

/// Relative slack of the descent check, scaled by `max(1, |E_0|)`.
pub const DESCENT_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentReport {
    /// Iterations where the descent bound failed by more than the slack.
    pub violations: usize,
    /// Largest shortfall `bound - decrease` observed (0 when none).
    pub max_violation: f64,
    /// Whether the merit sequence is nonincreasing up to the slack.
    pub monotone: bool,
}

/// `E(x, x_prev) = f(x) + P1(x) - P2(x) + (L/2) ||x - x_prev||^2`.
pub fn merit_e(
    inst: &ProblemInstance,
    spec: &RegularizerSpec,
    x: &[f64],
    x_prev: &[f64],
    lipschitz: f64,
) -> Result<f64> {
    if x.len() != x_prev.len() {
        return contract("merit_e: x and x_prev differ in length");
    }
    let d = dist(x, x_prev);
    Ok(objective(inst, spec, x)? + 0.5 * lipschitz * d * d)
}

/// Replays the merit, step and momentum traces of a pDCA run and counts
/// iterations violating the descent bound.
pub fn check_descent(result: &SolveResult, lipschitz: f64) -> Result<DescentReport> {
    let k = result.iterations;
    if result.merit_trace.len() != k + 1 || result.step_norm_trace.len() != k || result.beta_trace.len() != k {
        return contract(format!(
            "check_descent: traces missing or inconsistent (iterations {k}, merit {}, step {}, beta {})",
            result.merit_trace.len(),
            result.step_norm_trace.len(),
            result.beta_trace.len()
        ));
    }
    let e = &result.merit_trace;
    let slack = DESCENT_SLACK * e[0].abs().max(1.0);
    let mut violations = 0;
    let mut max_violation = 0.0f64;
    let mut monotone = true;
    for t in 0..k {
        let prev_step = if t == 0 { 0.0 } else { result.step_norm_trace[t - 1] };
        let beta = result.beta_trace[t];
        let bound = 0.5 * lipschitz * (1.0 - beta * beta) * prev_step * prev_step;
        let decrease = e[t] - e[t + 1];
        if decrease < bound - slack {
            violations += 1;
            max_violation = max_violation.max(bound - decrease);
        }
        if e[t + 1] > e[t] + slack {
            monotone = false;
        }
    }
    Ok(DescentReport { violations, max_violation, monotone })
}

/// `||x - soft(x - (grad f(x) - xi) / L, w / L)|| / max(1, ||x||)` with `xi`
/// the solver's subgradient selection. Zero exactly at fixed points of the
/// pDCA iteration map, which are stationary points.
pub fn stationarity_residual(inst: &ProblemInstance, spec: &RegularizerSpec, x: &[f64], lipschitz: f64) -> Result<f64> {
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        return contract("stationarity_residual: L must be positive");
    }
    let grad = smooth_eval(inst, x)?.gradient;
    let xi = spec.p2_subgrad(x);
    let z: Vec<f64> = x.iter().zip(grad.iter().zip(&xi)).map(|(xi_, (g, s))| xi_ - (g - s) / lipschitz).collect();
    let mapped = spec.p1_prox(&z, 1.0 / lipschitz);
    Ok(dist(x, &mapped) / norm(x).max(1.0))
}

use std::time::Instant;

use super::{converged, next_beta, Algorithm, ExtrapolationState, SolveResult, SolveStatus, SolverConfig};
use crate::error::{contract, Result};
use crate::instances::ProblemInstance;
use crate::linalg::{lmax_gram, matvec_into, matvec_t_into, norm, norm_sq, LMAX_DEFAULT_MAX_ITER, LMAX_DEFAULT_TOL};
use crate::regularizers::RegularizerSpec;

/// Proximal DCA with extrapolation. Each iteration
///
/// ```text
/// xi^t    = p2_subgrad(x^t)
/// y^t     = x^t + beta_t (x^t - x^{t-1})
/// x^{t+1} = soft(y^t - (grad f(y^t) - xi^t) / L, w / L)
/// ```
///
/// with `beta_t` from the restarted FISTA schedule (or zero for
/// `Algorithm::Pdca`). The adaptive restart fires when
/// `<y^{t-1} - x^t, x^t - x^{t-1}> > 0`.
///
/// `A x^t` is carried along so that `A y^t` comes from linearity; one
/// product with `A` and one with `A^T` per iteration.
pub fn pdca_e_solve(inst: &ProblemInstance, spec: &RegularizerSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    if !matches!(cfg.algorithm, Algorithm::PdcaE | Algorithm::Pdca) {
        return contract(format!("pdca_e_solve called with algorithm {}", cfg.algorithm));
    }
    cfg.validate()?;
    spec.validate()?;
    let lip = match cfg.lipschitz {
        Some(l) => l,
        None => lmax_gram(&inst.a, LMAX_DEFAULT_TOL, LMAX_DEFAULT_MAX_ITER)?.value,
    };
    let start = Instant::now();
    let momentum = cfg.algorithm == Algorithm::PdcaE;
    let adaptive = momentum && cfg.adaptive_restart;

    let (m, n) = (inst.m(), inst.n());
    let a = &inst.a;
    let b = &inst.b;
    let inv_l = 1.0 / lip;

    let mut x = vec![0.0; n];
    let mut x_prev = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut y_prev = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut ax_prev = vec![0.0; m];
    let mut ax_next = vec![0.0; m];
    let mut resid = vec![0.0; m];

    let f0 = 0.5 * norm_sq(b);
    let mut fval = f0 + spec.penalty(&x);
    let mut objective_trace = Vec::new();
    let mut merit_trace = Vec::new();
    let mut step_norm_trace = Vec::new();
    let mut beta_trace = Vec::new();
    if cfg.record_trace {
        objective_trace.push(fval);
        merit_trace.push(fval);
    }

    let mut state = ExtrapolationState::default();
    let mut status = SolveStatus::IterationCap;
    let mut iterations = 0;

    for t in 0..cfg.max_iter {
        let beta = if momentum {
            let trigger = adaptive && t > 0 && {
                let mut s = 0.0;
                for i in 0..n {
                    s += (y_prev[i] - x[i]) * (x[i] - x_prev[i]);
                }
                s > 0.0
            };
            let (beta, next) = next_beta(&state, cfg.restart_period, trigger);
            state = next;
            beta
        } else {
            0.0
        };

        for i in 0..n {
            y[i] = x[i] + beta * (x[i] - x_prev[i]);
        }
        for i in 0..m {
            resid[i] = ax[i] + beta * (ax[i] - ax_prev[i]) - b[i];
        }
        matvec_t_into(a, &resid, &mut grad);
        spec.p2_subgrad_into(&x, &mut xi);
        for i in 0..n {
            x_next[i] = y[i] - inv_l * (grad[i] - xi[i]);
        }
        spec.p1_prox_in_place(&mut x_next, inv_l);
        matvec_into(a, &x_next, &mut ax_next);

        let mut step_sq = 0.0;
        for i in 0..n {
            let d = x_next[i] - x[i];
            step_sq += d * d;
        }
        let step = step_sq.sqrt();
        let mut res_sq = 0.0;
        for i in 0..m {
            let r = ax_next[i] - b[i];
            res_sq += r * r;
        }
        fval = 0.5 * res_sq + spec.penalty(&x_next);
        iterations = t + 1;

        if !fval.is_finite() || !step.is_finite() {
            status = SolveStatus::NonFinite;
            break;
        }
        if cfg.record_trace {
            objective_trace.push(fval);
            merit_trace.push(fval + 0.5 * lip * step_sq);
            step_norm_trace.push(step);
            beta_trace.push(beta);
        }

        std::mem::swap(&mut x_prev, &mut x);
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut ax_prev, &mut ax);
        std::mem::swap(&mut ax, &mut ax_next);
        std::mem::swap(&mut y_prev, &mut y);

        if converged(step, norm(&x), cfg.tol) {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(SolveResult {
        algorithm: cfg.algorithm,
        x_final: x,
        iterations,
        status,
        fval,
        objective_trace,
        merit_trace,
        step_norm_trace,
        beta_trace,
        lipschitz: lip,
        restarts: state.restarts,
        backtracks: 0,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

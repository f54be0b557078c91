use std::collections::VecDeque;
use std::time::Instant;

use super::{converged, Algorithm, SolveResult, SolveStatus, SolverConfig};
use crate::error::{contract, Result};
use crate::instances::ProblemInstance;
use crate::linalg::{matvec_into, matvec_t_into, norm, norm_sq};
use crate::regularizers::prox::full_prox_into;
use crate::regularizers::RegularizerSpec;

/// Nonmonotone proximal gradient (GIST).
///
/// At iteration `t` the trial curvature starts at the Barzilai-Borwein
/// value `||A d||^2 / ||d||^2`, `d = x^t - x^{t-1}`, clamped to
/// `[l_min, l_max]` (`l0_first` at `t = 0`), and grows by `tau` until
///
/// ```text
/// F(u) <= max_{max(t-M+1, 0) <= i <= t} F(x^i) - (c L_t / 2) ||u - x^t||^2
/// ```
///
/// where `u` is the full nonconvex prox of `x^t - grad f(x^t) / L_t`.
pub fn gist_solve(inst: &ProblemInstance, spec: &RegularizerSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    if cfg.algorithm != Algorithm::Gist {
        return contract(format!("gist_solve called with algorithm {}", cfg.algorithm));
    }
    cfg.validate()?;
    spec.validate()?;
    let params = cfg.gist;
    let start = Instant::now();

    let (m, n) = (inst.m(), inst.n());
    let a = &inst.a;
    let b = &inst.b;

    let mut x = vec![0.0; n];
    let mut x_prev = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut ax_prev = vec![0.0; m];
    let mut au = vec![0.0; m];
    let mut resid = vec![0.0; m];

    let mut fval = 0.5 * norm_sq(b) + spec.penalty(&x);
    let mut window: VecDeque<f64> = VecDeque::with_capacity(params.memory);
    window.push_back(fval);

    let mut objective_trace = Vec::new();
    let mut step_norm_trace = Vec::new();
    if cfg.record_trace {
        objective_trace.push(fval);
    }

    let mut status = SolveStatus::IterationCap;
    let mut iterations = 0;
    let mut backtracks = 0;

    'outer: for t in 0..cfg.max_iter {
        for i in 0..m {
            resid[i] = ax[i] - b[i];
        }
        matvec_t_into(a, &resid, &mut grad);

        let l_init = if t == 0 {
            params.l0_first
        } else {
            let mut dd = 0.0;
            for i in 0..n {
                let d = x[i] - x_prev[i];
                dd += d * d;
            }
            let mut add = 0.0;
            for i in 0..m {
                let d = ax[i] - ax_prev[i];
                add += d * d;
            }
            let bb = add / dd;
            if bb.is_finite() {
                bb.clamp(params.l_min, params.l_max)
            } else {
                params.l_min
            }
        };
        let reference = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut l_t = l_init;
        let mut accepted = None;
        for j in 0..=params.max_backtracks {
            if j > 0 {
                l_t *= params.tau;
                backtracks += 1;
            }
            for i in 0..n {
                z[i] = x[i] - grad[i] / l_t;
            }
            full_prox_into(spec, &z, l_t, &mut u)?;
            matvec_into(a, &u, &mut au);
            let mut res_sq = 0.0;
            for i in 0..m {
                let r = au[i] - b[i];
                res_sq += r * r;
            }
            let f_trial = 0.5 * res_sq + spec.penalty(&u);
            let mut step_sq = 0.0;
            for i in 0..n {
                let d = u[i] - x[i];
                step_sq += d * d;
            }
            if !f_trial.is_finite() {
                status = SolveStatus::NonFinite;
                iterations = t + 1;
                break 'outer;
            }
            if f_trial <= reference - 0.5 * params.c * l_t * step_sq {
                accepted = Some((f_trial, step_sq.sqrt()));
                break;
            }
        }
        let Some((f_new, step)) = accepted else {
            status = SolveStatus::BacktrackLimit;
            iterations = t;
            break;
        };

        iterations = t + 1;
        fval = f_new;
        if window.len() == params.memory {
            window.pop_front();
        }
        window.push_back(fval);
        if cfg.record_trace {
            objective_trace.push(fval);
            step_norm_trace.push(step);
        }

        std::mem::swap(&mut x_prev, &mut x);
        std::mem::swap(&mut x, &mut u);
        std::mem::swap(&mut ax_prev, &mut ax);
        std::mem::swap(&mut ax, &mut au);

        if converged(step, norm(&x), cfg.tol) {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(SolveResult {
        algorithm: Algorithm::Gist,
        x_final: x,
        iterations,
        status,
        fval,
        objective_trace,
        merit_trace: Vec::new(),
        step_norm_trace,
        beta_trace: Vec::new(),
        lipschitz: 0.0,
        restarts: 0,
        backtracks,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

//! Brute-force grid minimization of the proximal subproblem, used to
//! validate [`super::full_prox`]. Evaluates the objective only through
//! [`RegularizerSpec::reg_value`], never through the closed forms.

use super::{prox_objective, ProxResult, RegularizerSpec};
use crate::error::{contract, Result};

/// Grid points per axis for the initial scan, by dimension.
const INITIAL_POINTS_1D: usize = 10_001;
const INITIAL_POINTS_2D: usize = 801;
const REFINE_POINTS_1D: usize = 1_001;
const REFINE_POINTS_2D: usize = 101;
const REFINEMENTS: usize = 2;

/// Minimizes `(L/2) ||u - z||^2 + P1(u) - P2(u)` over a grid on the box
/// `[-R, R]^d`, `R = ||z||_inf + 5 w`, followed by two zoomed rescans
/// around the incumbent. `d <= 2`.
///
/// `objective_gap_bound` is `G h0 sqrt(d) / 2`, with `h0` the initial grid
/// spacing and `G` a Lipschitz bound of the objective on the box: the
/// initial scan alone is within that of the box minimum, and refinement
/// only lowers the incumbent.
pub fn prox_oracle(spec: &RegularizerSpec, z: &[f64], l_t: f64) -> Result<ProxResult> {
    if z.is_empty() || z.len() > 2 {
        return contract(format!("prox_oracle: dimension must be 1 or 2, got {}", z.len()));
    }
    if l_t.is_nan() || l_t <= 0.0 {
        return contract("prox_oracle: L_t must be positive");
    }
    let mut radius = spec.oracle_radius(z);
    if radius == 0.0 {
        radius = 1.0;
    }
    let d = z.len();
    let f = |u: &[f64]| prox_objective(spec, z, l_t, u);

    let (n0, nr) = if d == 1 { (INITIAL_POINTS_1D, REFINE_POINTS_1D) } else { (INITIAL_POINTS_2D, REFINE_POINTS_2D) };
    let h0 = 2.0 * radius / (n0 - 1) as f64;

    let (mut best, mut best_val) = scan(&f, &vec![0.0; d], radius, n0);
    let mut h = h0;
    for _ in 0..REFINEMENTS {
        let half = 2.0 * h;
        h = 2.0 * half / (nr - 1) as f64;
        let (cand, val) = scan(&f, &best, half, nr);
        if val < best_val {
            best = cand;
            best_val = val;
        }
    }

    let w = spec.p1_weight();
    let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sqrt_d = (d as f64).sqrt();
    let grad_bound = l_t * (radius + zmax) * sqrt_d + 2.0 * w * sqrt_d;
    Ok(ProxResult { point: best, objective_gap_bound: grad_bound * h0 * sqrt_d / 2.0 })
}

/// Full tensor grid scan of `[c - half, c + half]^d` with `n` points per
/// axis. Strict improvement only, so the first minimum in scan order wins.
fn scan(f: &impl Fn(&[f64]) -> f64, center: &[f64], half: f64, n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * half / (n - 1) as f64;
    let coord = |c: f64, k: usize| c - half + h * k as f64;
    let mut best = center.to_vec();
    let mut best_val = f(center);
    let mut u = center.to_vec();
    match center.len() {
        1 => {
            for i in 0..n {
                u[0] = coord(center[0], i);
                let v = f(&u);
                if v < best_val {
                    best_val = v;
                    best.copy_from_slice(&u);
                }
            }
        }
        _ => {
            for i in 0..n {
                u[0] = coord(center[0], i);
                for j in 0..n {
                    u[1] = coord(center[1], j);
                    let v = f(&u);
                    if v < best_val {
                        best_val = v;
                        best.copy_from_slice(&u);
                    }
                }
            }
        }
    }
    (best, best_val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_gives_origin() {
        let specs = [
            RegularizerSpec::L1MinusL2 { lambda: 1.0 },
            RegularizerSpec::Log { lambda: 1.0, epsilon: 0.5 },
            RegularizerSpec::Mcp { lambda: 1.0, theta: 2.0 },
            RegularizerSpec::Scad { lambda: 1.0, theta: 3.0 },
            RegularizerSpec::TransformedL1 { lambda: 1.0, a: 1.0 },
        ];
        for spec in specs {
            let r = prox_oracle(&spec, &[0.0], 1.0).unwrap();
            assert!(r.point[0].abs() < 1e-9, "{spec}: {:?}", r.point);
        }
    }

    #[test]
    fn zero_weight_recovers_input() {
        let spec = RegularizerSpec::Mcp { lambda: 0.0, theta: 2.0 };
        let r = prox_oracle(&spec, &[1.3, -0.4], 2.0).unwrap();
        assert!((r.point[0] - 1.3).abs() < 1e-5 && (r.point[1] + 0.4).abs() < 1e-5, "{:?}", r.point);
    }

    #[test]
    fn rejects_high_dimension() {
        let spec = RegularizerSpec::L1MinusL2 { lambda: 1.0 };
        assert!(prox_oracle(&spec, &[1.0, 2.0, 3.0], 1.0).is_err());
    }
}

//! Global minimizers of `u -> (L/2) ||u - z||^2 + P1(u) - P2(u)`.
//!
//! The separable penalties are handled per coordinate. Any minimizer has
//! the sign of `z_i` and magnitude in `[0, |z_i|]`, so it suffices to
//! minimize `h(t) = (L/2)(t - |z_i|)^2 + p(t)` over `t >= 0`, where `p` is
//! the scalar penalty. Each variant's `p` is piecewise smooth; the
//! candidate set is the origin, the piece boundaries, and every real
//! stationary point of `h` on each piece (quadratic or cubic roots, clamped
//! to the piece). The candidate with the smallest `h` wins.
//!
//! l1-l2 does not separate. Writing `mu = lambda / L`:
//! * `||z||_inf > mu`: with `s = soft(z, mu)`, the minimizer is
//!   `s (||s|| + mu) / ||s||`;
//! * `0 < ||z||_inf <= mu`: the one-sparse vector keeping the largest
//!   magnitude entry of `z` (first index on ties);
//! * `z = 0`: the origin.

use super::{ProxResult, RegularizerSpec};
use crate::error::{contract, Result};
use crate::linalg::{norm, norm_inf};

/// Candidates whose objectives differ by at most this much are tied; the
/// smaller magnitude wins.
const TIE_TOL: f64 = 1e-12;

/// Subproblem objective `(L/2) ||u - z||^2 + P1(u) - P2(u)`.
pub fn prox_objective(spec: &RegularizerSpec, z: &[f64], l_t: f64, u: &[f64]) -> f64 {
    let quad: f64 = u.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * l_t * quad + spec.penalty(u)
}

/// Global minimizer of the nonconvex proximal subproblem with curvature
/// `l_t`.
pub fn full_prox(spec: &RegularizerSpec, z: &[f64], l_t: f64) -> Result<ProxResult> {
    if !(l_t > 0.0 && l_t.is_finite()) {
        return contract(format!("full_prox: L_t must be positive and finite, got {l_t}"));
    }
    let mut point = vec![0.0; z.len()];
    full_prox_into(spec, z, l_t, &mut point)?;
    Ok(ProxResult { point, objective_gap_bound: 0.0 })
}

pub(crate) fn full_prox_into(spec: &RegularizerSpec, z: &[f64], l_t: f64, out: &mut [f64]) -> Result<()> {
    debug_assert_eq!(z.len(), out.len());
    if spec.lambda() == 0.0 {
        out.copy_from_slice(z);
        return Ok(());
    }
    match *spec {
        RegularizerSpec::L1MinusL2 { lambda } => l1_minus_l2_prox(z, lambda / l_t, out),
        _ => {
            for (o, &zi) in out.iter_mut().zip(z) {
                let t = scalar_prox(spec, zi.abs(), l_t)?;
                *o = t.copysign(zi);
            }
        }
    }
    Ok(())
}

fn l1_minus_l2_prox(z: &[f64], mu: f64, out: &mut [f64]) {
    let zmax = norm_inf(z);
    if zmax > mu {
        for (o, &v) in out.iter_mut().zip(z) {
            *o = super::soft_threshold(v, mu);
        }
        let ns = norm(out);
        let scale = (ns + mu) / ns;
        out.iter_mut().for_each(|o| *o *= scale);
    } else {
        out.iter_mut().for_each(|o| *o = 0.0);
        if zmax > 0.0 {
            let i = z.iter().position(|v| v.abs() == zmax).unwrap();
            out[i] = z[i];
        }
    }
}

/// Scalar penalty `P1 - P2` at magnitude `t >= 0`, in closed form.
fn scalar_penalty(spec: &RegularizerSpec, t: f64) -> f64 {
    match *spec {
        RegularizerSpec::L1MinusL2 { .. } => 0.0,
        RegularizerSpec::Log { lambda, epsilon } => lambda * (t / epsilon).ln_1p(),
        RegularizerSpec::Mcp { lambda, theta } => {
            if t <= theta * lambda {
                lambda * t - t * t / (2.0 * theta)
            } else {
                theta * lambda * lambda / 2.0
            }
        }
        RegularizerSpec::Scad { lambda, theta } => {
            if t <= lambda {
                lambda * t
            } else if t <= theta * lambda {
                (2.0 * theta * lambda * t - t * t - lambda * lambda) / (2.0 * (theta - 1.0))
            } else {
                (theta + 1.0) * lambda * lambda / 2.0
            }
        }
        RegularizerSpec::TransformedL1 { lambda, a } => lambda * (a + 1.0) * t / (a + t),
    }
}

/// Minimizes `(L/2)(t - a)^2 + p(t)` over `t >= 0` by candidate enumeration.
fn scalar_prox(spec: &RegularizerSpec, a: f64, l: f64) -> Result<f64> {
    let mut cands: Vec<f64> = Vec::with_capacity(8);
    cands.push(0.0);
    let clamp = |t: f64, lo: f64, hi: f64| t.max(lo).min(hi);

    match *spec {
        RegularizerSpec::L1MinusL2 { .. } => unreachable!("l1-l2 is not separable"),
        RegularizerSpec::Log { lambda, epsilon } => {
            // l (t - a) + lambda / (t + eps) = 0
            //   <=>  t^2 + (eps - a) t + (lambda / l - a eps) = 0
            cands.extend(quadratic_roots(epsilon - a, lambda / l - a * epsilon).into_iter().filter(|&t| t > 0.0));
        }
        RegularizerSpec::Mcp { lambda, theta } => {
            let knee = theta * lambda;
            cands.push(knee);
            let curv = l - 1.0 / theta;
            if curv > 0.0 {
                cands.push(clamp((l * a - lambda) / curv, 0.0, knee));
            }
            cands.push(a.max(knee));
        }
        RegularizerSpec::Scad { lambda, theta } => {
            let knee = theta * lambda;
            cands.push(lambda);
            cands.push(knee);
            cands.push(clamp(a - lambda / l, 0.0, lambda));
            let curv = l - 1.0 / (theta - 1.0);
            if curv > 0.0 {
                cands.push(clamp((l * a - knee / (theta - 1.0)) / curv, lambda, knee));
            }
            cands.push(a.max(knee));
        }
        RegularizerSpec::TransformedL1 { lambda, a: shape } => {
            // With w = shape + t:  l (w - shape - a) w^2 + lambda shape (shape + 1) = 0
            //   <=>  w^3 - (shape + a) w^2 + lambda shape (shape + 1) / l = 0
            let d = lambda * shape * (shape + 1.0) / l;
            for w in cubic_roots(-(shape + a), 0.0, d) {
                let t = w - shape;
                if t > 0.0 {
                    cands.push(t);
                }
            }
        }
    }

    cands.retain(|t| t.is_finite());
    cands.sort_by(|x, y| x.total_cmp(y));
    let h = |t: f64| 0.5 * l * (t - a) * (t - a) + scalar_penalty(spec, t);
    let mut best: Option<(f64, f64)> = None;
    for t in cands {
        let v = h(t);
        if !v.is_finite() {
            continue;
        }
        match best {
            Some((_, bv)) if v >= bv - TIE_TOL => {}
            _ => best = Some((t, v)),
        }
    }
    match best {
        Some((t, _)) => Ok(t),
        None => contract(format!("full_prox: no finite candidate for {spec} at |z| = {a}, L = {l}")),
    }
}

/// Real roots of `t^2 + b t + c`.
fn quadratic_roots(b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q, c / q]
}

/// Real roots of the monic cubic `w^3 + b w^2 + c w + d`, each refined by
/// two Newton steps to recover accuracy lost near repeated roots.
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let q = (b * b - 3.0 * c) / 9.0;
    let r = (2.0 * b * b * b - 9.0 * b * c + 27.0 * d) / 54.0;
    let shift = b / 3.0;
    let mut roots = if r * r < q * q * q {
        let phi = (r / (q * q * q).sqrt()).clamp(-1.0, 1.0).acos();
        let s = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        vec![
            s * (phi / 3.0).cos() - shift,
            s * ((phi + tau) / 3.0).cos() - shift,
            s * ((phi - tau) / 3.0).cos() - shift,
        ]
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q * q * q).sqrt()).cbrt();
        let big_b = if big_a == 0.0 { 0.0 } else { q / big_a };
        vec![big_a + big_b - shift]
    };
    for w in roots.iter_mut() {
        for _ in 0..2 {
            let f = ((*w + b) * *w + c) * *w + d;
            let df = (3.0 * *w + 2.0 * b) * *w + c;
            if df != 0.0 {
                let next = *w - f / df;
                if next.is_finite() {
                    *w = next;
                }
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_minus_l2_is_identity_in_one_dimension() {
        let spec = RegularizerSpec::L1MinusL2 { lambda: 3.0 };
        for z in [-4.0, -0.1, 0.0, 0.2, 7.5] {
            for l in [0.5, 1.0, 4.0] {
                assert_eq!(full_prox(&spec, &[z], l).unwrap().point, vec![z]);
            }
        }
    }

    #[test]
    fn log_prox_of_zero_is_zero() {
        let spec = RegularizerSpec::Log { lambda: 2.0, epsilon: 0.3 };
        assert_eq!(full_prox(&spec, &[0.0, 0.0], 1.0).unwrap().point, vec![0.0, 0.0]);
    }

    #[test]
    fn mcp_flat_region_returns_input() {
        let spec = RegularizerSpec::Mcp { lambda: 1.0, theta: 2.0 };
        assert_eq!(full_prox(&spec, &[5.0], 1.0).unwrap().point, vec![5.0]);
        assert_eq!(full_prox(&spec, &[-5.0], 1.0).unwrap().point, vec![-5.0]);
    }

    #[test]
    fn scalar_penalty_matches_generic_value() {
        let specs = [
            RegularizerSpec::Log { lambda: 0.7, epsilon: 0.5 },
            RegularizerSpec::Mcp { lambda: 0.7, theta: 2.5 },
            RegularizerSpec::Scad { lambda: 0.7, theta: 3.7 },
            RegularizerSpec::TransformedL1 { lambda: 0.7, a: 0.8 },
        ];
        for spec in specs {
            for t in [0.0, 0.1, 0.7, 1.0, 2.0, 3.0, 10.0] {
                let direct = scalar_penalty(&spec, t);
                let generic = spec.penalty(&[t]);
                assert!(
                    (direct - generic).abs() <= 1e-12 * (1.0 + direct.abs()),
                    "{spec} t={t}: {direct} vs {generic}"
                );
            }
        }
    }

    #[test]
    fn cubic_roots_hit_known_values() {
        // (w - 1)(w - 2)(w - 3) = w^3 - 6 w^2 + 11 w - 6
        let mut r = cubic_roots(-6.0, 11.0, -6.0);
        r.sort_by(|a, b| a.total_cmp(b));
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // w^3 - 1 has the single real root 1.
        let r = cubic_roots(0.0, 0.0, -1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ties_prefer_smaller_magnitude() {
        // Soft-threshold boundary for SCAD: at |z| = lambda / L the zero and
        // shrunk candidates coincide, so the result must be exactly 0.
        let spec = RegularizerSpec::Scad { lambda: 1.0, theta: 3.7 };
        assert_eq!(full_prox(&spec, &[1.0], 1.0).unwrap().point, vec![0.0]);
    }

    #[test]
    fn rejects_nonpositive_curvature() {
        let spec = RegularizerSpec::Mcp { lambda: 1.0, theta: 2.0 };
        assert!(full_prox(&spec, &[1.0], 0.0).is_err());
    }
}

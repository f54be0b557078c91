//! DC penalties `P = P1 - P2` for sparse least squares.
//!
//! For every variant `P1` is a weighted l1 norm, so the convex part of the
//! proximal step is soft-thresholding. `P2` is convex and, except for the
//! l1-l2 case at the origin, continuously differentiable.
//!
//! | variant  | `P1`                    | `P2`                                               |
//! |----------|-------------------------|----------------------------------------------------|
//! | l1-l2    | `lambda ||x||_1`        | `lambda ||x||`                                     |
//! | log      | `lambda/eps ||x||_1`    | `lambda sum(|x_i|/eps - ln(1 + |x_i|/eps))`        |
//! | mcp      | `lambda ||x||_1`        | `lambda int_0^|x_i| min(1, s/(theta lambda)) ds`   |
//! | scad     | `lambda ||x||_1`        | `int_0^|x_i| [min(theta lambda, s) - lambda]_+ / (theta - 1) ds` |
//! | tl1      | `lambda (a+1)/a ||x||_1`| `lambda sum((a+1)/a |x_i| - (a+1)|x_i|/(a+|x_i|))`|

mod oracle;
pub(crate) mod prox;

use std::fmt;
use std::str::FromStr;

use crate::error::{DcError, Result};
use crate::linalg::{norm, norm_inf};

pub use oracle::prox_oracle;
pub use prox::{full_prox, prox_objective};

/// One of the five DC penalties together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerSpec {
    L1MinusL2 { lambda: f64 },
    Log { lambda: f64, epsilon: f64 },
    Mcp { lambda: f64, theta: f64 },
    Scad { lambda: f64, theta: f64 },
    TransformedL1 { lambda: f64, a: f64 },
}

/// A regularizer with its shape parameters fixed but the weight `lambda`
/// left open, as used by benchmark plans that sweep `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerFamily {
    L1MinusL2,
    Log { epsilon: f64 },
    Mcp { theta: f64 },
    Scad { theta: f64 },
    TransformedL1 { a: f64 },
}

/// Output of the proximal maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult {
    pub point: Vec<f64>,
    /// Upper bound on how far the returned point's subproblem objective
    /// can be above the true minimum. Zero for closed forms.
    pub objective_gap_bound: f64,
}

impl RegularizerFamily {
    pub fn with_lambda(self, lambda: f64) -> RegularizerSpec {
        match self {
            Self::L1MinusL2 => RegularizerSpec::L1MinusL2 { lambda },
            Self::Log { epsilon } => RegularizerSpec::Log { lambda, epsilon },
            Self::Mcp { theta } => RegularizerSpec::Mcp { lambda, theta },
            Self::Scad { theta } => RegularizerSpec::Scad { lambda, theta },
            Self::TransformedL1 { a } => RegularizerSpec::TransformedL1 { lambda, a },
        }
    }

    pub fn is_l1_minus_l2(&self) -> bool {
        matches!(self, Self::L1MinusL2)
    }
}

impl RegularizerSpec {
    pub fn lambda(&self) -> f64 {
        match *self {
            Self::L1MinusL2 { lambda }
            | Self::Log { lambda, .. }
            | Self::Mcp { lambda, .. }
            | Self::Scad { lambda, .. }
            | Self::TransformedL1 { lambda, .. } => lambda,
        }
    }

    pub fn family(&self) -> RegularizerFamily {
        match *self {
            Self::L1MinusL2 { .. } => RegularizerFamily::L1MinusL2,
            Self::Log { epsilon, .. } => RegularizerFamily::Log { epsilon },
            Self::Mcp { theta, .. } => RegularizerFamily::Mcp { theta },
            Self::Scad { theta, .. } => RegularizerFamily::Scad { theta },
            Self::TransformedL1 { a, .. } => RegularizerFamily::TransformedL1 { a },
        }
    }

    /// Checks parameter domains. `lambda = 0` is accepted and denotes the
    /// zero penalty.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(DcError::Contract(format!("{self}: {what}")));
        let lambda = self.lambda();
        if !(lambda.is_finite() && lambda >= 0.0) {
            return bad("lambda must be finite and non-negative");
        }
        match *self {
            Self::Log { epsilon, .. } if !(epsilon.is_finite() && epsilon > 0.0) => bad("eps must be positive"),
            Self::Mcp { theta, .. } if !(theta.is_finite() && theta > 0.0) => bad("theta must be positive"),
            Self::Scad { theta, .. } if !(theta.is_finite() && theta > 2.0) => bad("theta must exceed 2"),
            Self::TransformedL1 { a, .. } if !(a.is_finite() && a > 0.0) => bad("a must be positive"),
            _ => Ok(()),
        }
    }

    /// Weight `w` with `P1 = w ||.||_1`.
    pub fn p1_weight(&self) -> f64 {
        match *self {
            Self::L1MinusL2 { lambda } | Self::Mcp { lambda, .. } | Self::Scad { lambda, .. } => lambda,
            Self::Log { lambda, epsilon } => lambda / epsilon,
            Self::TransformedL1 { lambda, a } => lambda * (a + 1.0) / a,
        }
    }

    /// Lipschitz modulus of `grad P2` for the smooth variants; `None` for
    /// l1-l2, whose `P2` is not differentiable at the origin.
    pub fn p2_gradient_lipschitz(&self) -> Option<f64> {
        match *self {
            Self::L1MinusL2 { .. } => None,
            Self::Log { lambda, epsilon } => Some(lambda / (epsilon * epsilon)),
            Self::Mcp { theta, .. } => Some(1.0 / theta),
            Self::Scad { theta, .. } => Some(1.0 / (theta - 1.0)),
            Self::TransformedL1 { lambda, a } => Some(lambda * 2.0 * (a + 1.0) / (a * a)),
        }
    }

    /// `P2` restricted to one coordinate with `|x_i| = t`. Not meaningful
    /// for l1-l2, whose `P2` does not separate.
    fn p2_scalar(&self, t: f64) -> f64 {
        match *self {
            Self::L1MinusL2 { lambda } => lambda * t,
            Self::Log { lambda, epsilon } => {
                let r = t / epsilon;
                lambda * (r - r.ln_1p())
            }
            Self::Mcp { lambda, theta } => {
                let knee = theta * lambda;
                if t <= knee {
                    t * t / (2.0 * theta)
                } else {
                    lambda * t - theta * lambda * lambda / 2.0
                }
            }
            Self::Scad { lambda, theta } => {
                let knee = theta * lambda;
                if t <= lambda {
                    0.0
                } else if t <= knee {
                    (t - lambda) * (t - lambda) / (2.0 * (theta - 1.0))
                } else {
                    (theta - 1.0) * lambda * lambda / 2.0 + lambda * (t - knee)
                }
            }
            Self::TransformedL1 { lambda, a } => lambda * (a + 1.0) * t * t / (a * (a + t)),
        }
    }

    /// Derivative of [`Self::p2_scalar`] in `t >= 0`.
    fn p2_scalar_deriv(&self, t: f64) -> f64 {
        match *self {
            Self::L1MinusL2 { lambda } => lambda,
            Self::Log { lambda, epsilon } => lambda * t / (epsilon * (t + epsilon)),
            Self::Mcp { lambda, theta } => {
                if lambda == 0.0 {
                    0.0
                } else {
                    lambda * (t / (theta * lambda)).min(1.0)
                }
            }
            Self::Scad { lambda, theta } => ((theta * lambda).min(t) - lambda).max(0.0) / (theta - 1.0),
            Self::TransformedL1 { lambda, a } => lambda * (a + 1.0) * t * (2.0 * a + t) / (a * (a + t) * (a + t)),
        }
    }

    /// The pair `(P1(x), P2(x))`.
    pub fn reg_value(&self, x: &[f64]) -> (f64, f64) {
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        let p1 = self.p1_weight() * l1;
        let p2 = match *self {
            Self::L1MinusL2 { lambda } => lambda * norm(x),
            _ => x.iter().map(|v| self.p2_scalar(v.abs())).sum(),
        };
        (p1, p2)
    }

    /// `P(x) = P1(x) - P2(x)`.
    pub fn penalty(&self, x: &[f64]) -> f64 {
        let (p1, p2) = self.reg_value(x);
        p1 - p2
    }

    /// `argmin_u 1/2 ||u - z||^2 + mu P1(u)`: soft-thresholding at `mu w`.
    pub fn p1_prox(&self, z: &[f64], mu: f64) -> Vec<f64> {
        let mut out = z.to_vec();
        self.p1_prox_in_place(&mut out, mu);
        out
    }

    pub(crate) fn p1_prox_in_place(&self, z: &mut [f64], mu: f64) {
        debug_assert!(mu > 0.0);
        let thr = mu * self.p1_weight();
        for v in z.iter_mut() {
            *v = soft_threshold(*v, thr);
        }
    }

    /// A specific element of `dP2(x)`: the gradient for the smooth
    /// variants, `lambda x / ||x||` for l1-l2 with `0` chosen at the origin.
    pub fn p2_subgrad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.p2_subgrad_into(x, &mut out);
        out
    }

    pub(crate) fn p2_subgrad_into(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            Self::L1MinusL2 { lambda } => {
                let nx = norm(x);
                if nx == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                } else {
                    let s = lambda / nx;
                    for (o, v) in out.iter_mut().zip(x) {
                        *o = s * v;
                    }
                }
            }
            _ => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = if v == 0.0 { 0.0 } else { v.signum() * self.p2_scalar_deriv(v.abs()) };
                }
            }
        }
    }

    /// Whether `lambda < 1/2 ||A^T b||_inf`, given that bound.
    pub fn admissible_l12(&self, bound: f64) -> bool {
        self.lambda() < bound
    }

    /// Half-width of the brute-force search box around the origin.
    pub(crate) fn oracle_radius(&self, z: &[f64]) -> f64 {
        norm_inf(z) + 5.0 * self.p1_weight()
    }
}

#[inline]
pub fn soft_threshold(v: f64, thr: f64) -> f64 {
    if v > thr {
        v - thr
    } else if v < -thr {
        v + thr
    } else {
        0.0
    }
}

impl fmt::Display for RegularizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::L1MinusL2 { lambda } => write!(f, "l1-l2:lambda={lambda:e}"),
            Self::Log { lambda, epsilon } => write!(f, "log:lambda={lambda:e},eps={epsilon}"),
            Self::Mcp { lambda, theta } => write!(f, "mcp:lambda={lambda:e},theta={theta}"),
            Self::Scad { lambda, theta } => write!(f, "scad:lambda={lambda:e},theta={theta}"),
            Self::TransformedL1 { lambda, a } => write!(f, "tl1:lambda={lambda:e},a={a}"),
        }
    }
}

impl fmt::Display for RegularizerFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::L1MinusL2 => write!(f, "l1-l2"),
            Self::Log { epsilon } => write!(f, "log:eps={epsilon}"),
            Self::Mcp { theta } => write!(f, "mcp:theta={theta}"),
            Self::Scad { theta } => write!(f, "scad:theta={theta}"),
            Self::TransformedL1 { a } => write!(f, "tl1:a={a}"),
        }
    }
}

/// Splits `name:k=v,k=v` into the name and parameter lookups.
fn parse_parts(s: &str) -> Result<(String, Vec<(String, f64)>)> {
    let s = s.trim();
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut params = Vec::new();
    for kv in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| DcError::Parse(format!("expected key=value, got {kv:?} in {s:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| DcError::Parse(format!("bad number {v:?} for {k:?} in {s:?}")))?;
        params.push((k.trim().to_ascii_lowercase(), v));
    }
    Ok((name.trim().to_ascii_lowercase(), params))
}

struct Params {
    src: String,
    items: Vec<(String, f64)>,
}

impl Params {
    fn take(&mut self, keys: &[&str]) -> Option<f64> {
        let pos = self.items.iter().position(|(k, _)| keys.contains(&k.as_str()))?;
        Some(self.items.remove(pos).1)
    }

    fn require(&mut self, keys: &[&str]) -> Result<f64> {
        self.take(keys).ok_or_else(|| DcError::Parse(format!("missing parameter {:?} in {:?}", keys[0], self.src)))
    }

    fn finish(self) -> Result<()> {
        match self.items.first() {
            Some((k, _)) => Err(DcError::Parse(format!("unknown parameter {k:?} in {:?}", self.src))),
            None => Ok(()),
        }
    }
}

fn parse_family(name: &str, p: &mut Params) -> Result<RegularizerFamily> {
    Ok(match name {
        "l1-l2" | "l1l2" | "l1-2" => RegularizerFamily::L1MinusL2,
        "log" => RegularizerFamily::Log { epsilon: p.require(&["eps", "epsilon"])? },
        "mcp" => RegularizerFamily::Mcp { theta: p.require(&["theta"])? },
        "scad" => RegularizerFamily::Scad { theta: p.require(&["theta"])? },
        "tl1" => RegularizerFamily::TransformedL1 { a: p.require(&["a"])? },
        other => return Err(DcError::Parse(format!("unknown regularizer {other:?}"))),
    })
}

impl FromStr for RegularizerSpec {
    type Err = DcError;

    /// Parses `l1-l2:lambda=5e-4`, `log:lambda=1e-3,eps=0.5`,
    /// `mcp:lambda=1e-3,theta=5`, `scad:lambda=1e-3,theta=3.7`,
    /// `tl1:lambda=1e-3,a=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, items) = parse_parts(s)?;
        let mut p = Params { src: s.to_string(), items };
        let lambda = p.require(&["lambda"])?;
        let spec = parse_family(&name, &mut p)?.with_lambda(lambda);
        p.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for RegularizerFamily {
    type Err = DcError;

    /// Same syntax as [`RegularizerSpec`] without `lambda`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, items) = parse_parts(s)?;
        let mut p = Params { src: s.to_string(), items };
        let fam = parse_family(&name, &mut p)?;
        p.finish()?;
        fam.with_lambda(1.0).validate()?;
        Ok(fam)
    }
}

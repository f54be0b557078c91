//! Iterative solvers for `min 1/2 ||Ax - b||^2 + P1(x) - P2(x)`.
//!
//! * [`pdca_e_solve`]: proximal DCA with FISTA-style extrapolation and
//!   restarts; with `Algorithm::Pdca` the momentum is pinned to zero and it
//!   is the plain proximal DCA.
//! * [`gist_solve`]: nonmonotone proximal gradient with Barzilai-Borwein
//!   initial steps and the full nonconvex proximal map.
//!
//! All start at the origin and stop when
//! `||x^t - x^{t-1}|| / max(1, ||x^t||) < tol` or after `max_iter`
//! iterations.

mod extrapolation;
mod gist;
mod pdca;

use std::fmt;
use std::str::FromStr;

use crate::error::{DcError, Result};
use crate::instances::ProblemInstance;
use crate::regularizers::RegularizerSpec;

pub use extrapolation::{next_beta, ExtrapolationState};
pub use gist::gist_solve;
pub use pdca::pdca_e_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Gist,
    PdcaE,
    Pdca,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Gist, Algorithm::PdcaE, Algorithm::Pdca];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gist => "gist",
            Self::PdcaE => "pdca_e",
            Self::Pdca => "pdca",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = DcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gist" => Ok(Self::Gist),
            "pdca_e" | "pdcae" | "pdca-e" => Ok(Self::PdcaE),
            "pdca" => Ok(Self::Pdca),
            other => Err(DcError::Parse(format!("unknown solver {other:?}"))),
        }
    }
}

/// Line-search constants of the nonmonotone proximal gradient method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GistParams {
    /// Sufficient-decrease constant.
    pub c: f64,
    /// Backtracking factor.
    pub tau: f64,
    /// Length of the nonmonotone window.
    pub memory: usize,
    pub l_min: f64,
    pub l_max: f64,
    /// Initial curvature at the first iteration.
    pub l0_first: f64,
    /// Abort after this many step increases within one iteration.
    pub max_backtracks: usize,
}

impl Default for GistParams {
    fn default() -> Self {
        Self { c: 1e-4, tau: 2.0, memory: 4, l_min: 1e-8, l_max: 1e8, l0_first: 1.0, max_backtracks: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub tol: f64,
    pub max_iter: usize,
    /// Fixed restart period of the momentum schedule.
    pub restart_period: Option<usize>,
    pub adaptive_restart: bool,
    /// Use this instead of `lambda_max(A^T A)` as the step constant.
    pub lipschitz: Option<f64>,
    pub gist: GistParams,
    /// Keep per-iteration traces. Turning this off avoids trace
    /// bookkeeping in timing runs; [`crate::diagnostics::check_descent`]
    /// needs it on.
    pub record_trace: bool,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            tol: 1e-5,
            max_iter: 5000,
            restart_period: Some(200),
            adaptive_restart: algorithm == Algorithm::PdcaE,
            lipschitz: None,
            gist: GistParams::default(),
            record_trace: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(DcError::Contract(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(DcError::Contract("max_iter must be positive".into()));
        }
        if self.restart_period == Some(0) {
            return Err(DcError::Contract("restart period must be at least 1".into()));
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(DcError::Contract(format!("Lipschitz override must be positive, got {l}")));
            }
        }
        let g = &self.gist;
        if !(g.tau > 1.0 && g.c >= 0.0 && g.memory >= 1 && g.l_min > 0.0 && g.l_max >= g.l_min && g.l0_first > 0.0) {
            return Err(DcError::Contract(format!("invalid line-search parameters {g:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    IterationCap,
    /// An iterate or objective value overflowed.
    NonFinite,
    /// The line search exceeded its backtracking budget.
    BacktrackLimit,
}

impl SolveStatus {
    pub fn is_abort(&self) -> bool {
        matches!(self, Self::NonFinite | Self::BacktrackLimit)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::IterationCap => "iteration_cap",
            Self::NonFinite => "non_finite",
            Self::BacktrackLimit => "backtrack_limit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a solve.
///
/// With traces on, `objective_trace[t] = F(x^t)` for `t = 0..=iterations`;
/// `step_norm_trace[t] = ||x^{t+1} - x^t||` for `t < iterations`. The pDCA
/// variants also fill `merit_trace[t] = E(x^t, x^{t-1})` (length
/// `iterations + 1`) and `beta_trace[t]`, the momentum used to form `y^t`
/// (length `iterations`, all zero for plain pDCA).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub algorithm: Algorithm,
    pub x_final: Vec<f64>,
    pub iterations: usize,
    pub status: SolveStatus,
    /// `F(x_final)`.
    pub fval: f64,
    pub objective_trace: Vec<f64>,
    pub merit_trace: Vec<f64>,
    pub step_norm_trace: Vec<f64>,
    pub beta_trace: Vec<f64>,
    /// Step constant used by the pDCA variants; 0 for GIST.
    pub lipschitz: f64,
    pub restarts: usize,
    pub backtracks: usize,
    pub wall_seconds: f64,
}

/// Dispatches on `cfg.algorithm`.
pub fn solve(inst: &ProblemInstance, spec: &RegularizerSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    match cfg.algorithm {
        Algorithm::Gist => gist_solve(inst, spec, cfg),
        Algorithm::PdcaE | Algorithm::Pdca => pdca_e_solve(inst, spec, cfg),
    }
}

#[inline]
pub(crate) fn converged(step: f64, x_norm: f64, tol: f64) -> bool {
    step / x_norm.max(1.0) < tol
}

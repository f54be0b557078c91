//! Proximal difference-of-convex algorithms for DC-regularized least
//! squares,
//!
//! ```text
//! min_x  1/2 ||Ax - b||^2 + P1(x) - P2(x)
//! ```
//!
//! with `P1` a weighted l1 norm and `P2` convex. The crate provides the
//! proximal DCA with extrapolation and restarts, the plain proximal DCA,
//! and the nonmonotone GIST baseline, along with five penalties (l1-l2,
//! log, MCP, SCAD, transformed l1), a seeded random instance generator,
//! merit/stationarity diagnostics and a benchmark driver.

pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod regularizers;
pub mod solvers;

pub use bench::{render_table, run_benchmark, BenchmarkPlan, GridCell, ResultTable, RunRecord, TableFormat};
pub use diagnostics::{check_descent, merit_e, stationarity_residual, DescentReport};
pub use error::{DcError, Result};
pub use instances::{generate_instance, l12_lambda_bound, objective, smooth_eval, ProblemInstance, SmoothEval};
pub use linalg::{gauss_vector, lmax_gram, matvec, matvec_t, DenseMatrix, LmaxEstimate, RandomSource};
pub use regularizers::{full_prox, prox_oracle, ProxResult, RegularizerFamily, RegularizerSpec};
pub use solvers::{
    gist_solve, next_beta, pdca_e_solve, solve, Algorithm, ExtrapolationState, GistParams, SolveResult, SolveStatus,
    SolverConfig,
};

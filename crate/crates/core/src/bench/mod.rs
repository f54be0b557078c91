//! Benchmark driver: instance grids, timed solver runs, invariant audits
//! and aggregated result tables.

mod plan;
mod render;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::diagnostics::{check_descent, stationarity_residual};
use crate::error::{DcError, Result};
use crate::instances::{generate_instance, l12_lambda_bound};
use crate::linalg::{lmax_gram, LMAX_DEFAULT_MAX_ITER, LMAX_DEFAULT_TOL};
use crate::solvers::{solve, Algorithm, SolveStatus, SolverConfig};

pub use plan::{BenchmarkPlan, GridCell};
pub use render::{format_fval, render_table, TableFormat};

/// Per-iteration traces of one run, kept when the plan asks for them.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub objective: Vec<f64>,
    pub merit: Vec<f64>,
    pub step_norm: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Raw outcome of one solver on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: GridCell,
    pub lambda: f64,
    pub replicate: usize,
    pub seed: u64,
    pub solver: Algorithm,
    pub iterations: usize,
    pub status: SolveStatus,
    pub fval: f64,
    pub residual: f64,
    pub cpu_seconds: f64,
    /// Descent-check violations; `None` for GIST, which has no merit trace.
    pub descent_violations: Option<usize>,
    /// `lambda < 1/2 ||A^T b||_inf`; only evaluated for l1-l2.
    pub lambda_admissible: Option<bool>,
    pub trace: Option<RunTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub runs: usize,
    pub mean_iterations: f64,
    /// Runs that stopped at the iteration cap.
    pub capped: usize,
    pub aborted: usize,
    pub mean_cpu_seconds: f64,
    pub mean_fval: f64,
}

/// Aggregates for one `(cell, lambda)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub cell: GridCell,
    pub lambda: f64,
    /// Mean time to compute `lambda_max(A^T A)`.
    pub t_lmax: f64,
    pub solvers: BTreeMap<Algorithm, SolverSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<TableRow>,
    pub records: Vec<RunRecord>,
    /// Instances whose `lambda_max` iteration hit its cap.
    pub lmax_unconverged: usize,
}

impl ResultTable {
    pub fn row(&self, cell: GridCell, lambda: f64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.cell == cell && r.lambda == lambda)
    }

    pub fn records_for(&self, solver: Algorithm) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(move |r| r.solver == solver)
    }

    /// Runs that broke the descent bound or used an inadmissible l1-l2
    /// weight.
    pub fn invariant_failures(&self) -> Vec<&RunRecord> {
        self.records
            .iter()
            .filter(|r| r.descent_violations.is_some_and(|v| v > 0) || r.lambda_admissible == Some(false))
            .collect()
    }

    pub fn aborted_runs(&self) -> Vec<&RunRecord> {
        self.records.iter().filter(|r| r.status.is_abort()).collect()
    }

    /// 0 on success, 3 if any solver aborted, otherwise 2 on an invariant
    /// violation.
    pub fn exit_code(&self) -> i32 {
        if !self.aborted_runs().is_empty() {
            3
        } else if !self.invariant_failures().is_empty() {
            2
        } else {
            0
        }
    }

    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut t = self.clone();
        for r in &mut t.records {
            r.cpu_seconds = 0.0;
        }
        for row in &mut t.rows {
            row.t_lmax = 0.0;
            for s in row.solvers.values_mut() {
                s.mean_cpu_seconds = 0.0;
            }
        }
        t
    }
}

/// Seed of one replicate: SplitMix64 folded over
/// `(master_seed, m, n, s, replicate)` as `h <- mix(h ^ v)` starting from
/// `h = mix(master_seed)`. Independent of `lambda`, so every lambda in a
/// plan sees the same instances.
pub fn replicate_seed(master_seed: u64, cell: GridCell, replicate: usize) -> u64 {
    [cell.m as u64, cell.n as u64, cell.s as u64, replicate as u64]
        .into_iter()
        .fold(splitmix64(master_seed), |h, v| splitmix64(h ^ v))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct ReplicateOutcome {
    t_lmax: f64,
    lmax_converged: bool,
    records: Vec<RunRecord>,
}

/// Runs every solver on every instance of the plan.
///
/// Each replicate generates its instance once, computes `L = lambda_max(A^T A)`
/// once (timed separately and excluded from solver CPU time), then runs all
/// lambdas and solvers on it. pDCA runs are replayed through
/// [`check_descent`]. `jobs` bounds the worker threads (`None`: all cores).
/// Records come back in plan order regardless of scheduling.
pub fn run_benchmark(plan: &BenchmarkPlan, jobs: Option<usize>) -> Result<ResultTable> {
    plan.validate()?;
    let tasks: Vec<(GridCell, usize)> =
        plan.grid.iter().flat_map(|&c| (0..plan.instances_per_cell).map(move |r| (c, r))).collect();

    let run = || tasks.par_iter().map(|&(cell, rep)| run_replicate(plan, cell, rep)).collect::<Result<Vec<_>>>();
    let outcomes = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| DcError::Contract(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut lmax_unconverged = 0;
    for (ci, &cell) in plan.grid.iter().enumerate() {
        let cell_outcomes = &outcomes[ci * plan.instances_per_cell..(ci + 1) * plan.instances_per_cell];
        let t_lmax = cell_outcomes.iter().map(|o| o.t_lmax).sum::<f64>() / cell_outcomes.len() as f64;
        lmax_unconverged += cell_outcomes.iter().filter(|o| !o.lmax_converged).count();
        for &lambda in &plan.lambdas {
            let mut solvers = BTreeMap::new();
            for &alg in &plan.solvers {
                let runs: Vec<&RunRecord> = cell_outcomes
                    .iter()
                    .flat_map(|o| &o.records)
                    .filter(|r| r.solver == alg && r.lambda == lambda)
                    .collect();
                let k = runs.len() as f64;
                solvers.insert(
                    alg,
                    SolverSummary {
                        runs: runs.len(),
                        mean_iterations: runs.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
                        capped: runs.iter().filter(|r| r.status == SolveStatus::IterationCap).count(),
                        aborted: runs.iter().filter(|r| r.status.is_abort()).count(),
                        mean_cpu_seconds: runs.iter().map(|r| r.cpu_seconds).sum::<f64>() / k,
                        mean_fval: runs.iter().map(|r| r.fval).sum::<f64>() / k,
                    },
                );
            }
            rows.push(TableRow { cell, lambda, t_lmax, solvers });
        }
    }
    for o in outcomes {
        records.extend(o.records);
    }
    Ok(ResultTable { rows, records, lmax_unconverged })
}

fn run_replicate(plan: &BenchmarkPlan, cell: GridCell, replicate: usize) -> Result<ReplicateOutcome> {
    let seed = replicate_seed(plan.master_seed, cell, replicate);
    let inst = generate_instance(cell.m, cell.n, cell.s, plan.noise_scale, seed)?;

    let clock = Instant::now();
    let lmax = lmax_gram(&inst.a, LMAX_DEFAULT_TOL, LMAX_DEFAULT_MAX_ITER)?;
    let t_lmax = clock.elapsed().as_secs_f64();
    let lip = lmax.value;

    let bound = plan.family.is_l1_minus_l2().then(|| l12_lambda_bound(&inst));
    let mut records = Vec::new();
    for &lambda in &plan.lambdas {
        let spec = plan.family.with_lambda(lambda);
        for &alg in &plan.solvers {
            let mut cfg = SolverConfig::new(alg);
            cfg.tol = plan.tol;
            cfg.max_iter = plan.max_iter;
            cfg.lipschitz = Some(lip);
            // The descent audit needs the pDCA traces.
            cfg.record_trace = plan.trace || alg != Algorithm::Gist;
            let res = solve(&inst, &spec, &cfg)?;
            let residual = stationarity_residual(&inst, &spec, &res.x_final, lip)?;
            let descent_violations = match alg {
                Algorithm::Gist => None,
                _ => Some(check_descent(&res, lip)?.violations),
            };
            if descent_violations.is_some_and(|v| v > 0) {
                log::error!("descent bound violated: {cell} lambda={lambda:e} replicate={replicate} solver={alg}");
            }
            log::debug!(
                "{cell} lambda={lambda:e} rep={replicate} {alg}: iter={} status={} fval={:.6e} ({:.2}s)",
                res.iterations,
                res.status,
                res.fval,
                res.wall_seconds
            );
            let trace = plan.trace.then(|| RunTrace {
                objective: res.objective_trace.clone(),
                merit: res.merit_trace.clone(),
                step_norm: res.step_norm_trace.clone(),
                beta: res.beta_trace.clone(),
            });
            records.push(RunRecord {
                cell,
                lambda,
                replicate,
                seed,
                solver: alg,
                iterations: res.iterations,
                status: res.status,
                fval: res.fval,
                residual,
                cpu_seconds: res.wall_seconds,
                descent_violations,
                lambda_admissible: bound.map(|b| spec.admissible_l12(b)),
                trace,
            });
        }
    }
    Ok(ReplicateOutcome { t_lmax, lmax_converged: lmax.converged, records })
}

//! End-to-end acceptance checks. Runs as a plain binary so every check
//! prints its own PASS/FAIL line; exits nonzero if any check fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{central_gradient, gram, max_eigenvalue, naive_loss, Lcg};
use dcprox::linalg::{dist, norm, norm_inf};
use dcprox::regularizers::prox_objective;
use dcprox::{
    check_descent, full_prox, generate_instance, lmax_gram, matvec_t, next_beta, prox_oracle, render_table,
    run_benchmark, smooth_eval, solve, Algorithm, BenchmarkPlan, ExtrapolationState, GridCell, RegularizerFamily,
    RegularizerSpec, ResultTable, SolveStatus, SolverConfig, TableFormat,
};

const DESK_CELL: GridCell = GridCell { m: 720, n: 2560, s: 80 };
const DESK_REPLICATES: usize = 10;
const DESK_SEED: u64 = 20170301;
const TOL: f64 = 1e-5;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, k) = v.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    s / k as f64
}

fn mean_iters(t: &ResultTable, alg: Algorithm) -> f64 {
    mean(t.records_for(alg).map(|r| r.iterations as f64))
}

fn mean_fval(t: &ResultTable, alg: Algorithm) -> f64 {
    mean(t.records_for(alg).map(|r| r.fval))
}

fn desk_plan(family: RegularizerFamily, lambda: f64) -> BenchmarkPlan {
    let mut plan = BenchmarkPlan::new(vec![DESK_CELL], vec![lambda], family);
    plan.instances_per_cell = DESK_REPLICATES;
    plan.master_seed = DESK_SEED;
    plan
}

fn all_families() -> [RegularizerFamily; 5] {
    [
        RegularizerFamily::L1MinusL2,
        RegularizerFamily::Log { epsilon: 0.5 },
        RegularizerFamily::Mcp { theta: 5.0 },
        RegularizerFamily::Scad { theta: 3.7 },
        RegularizerFamily::TransformedL1 { a: 1.0 },
    ]
}

fn descent_invariant() -> Outcome {
    let start = Instant::now();
    let sizes = [(20, 60, 3), (40, 120, 4), (60, 180, 6), (80, 240, 8), (100, 300, 10)];
    let families = all_families();
    let mut rng = Lcg::new(1);
    let (mut runs, mut violations, mut worst) = (0, 0, 0.0f64);
    for seed in 0..30u64 {
        let (m, n, s) = sizes[seed as usize % sizes.len()];
        let inst = generate_instance(m, n, s, 0.01, 1000 + seed).unwrap();
        let scale = norm_inf(&matvec_t(&inst.a, &inst.b).unwrap());
        let family = families[(seed as usize / sizes.len()) % families.len()];
        let spec = family.with_lambda(rng.range(0.01, 0.3) * scale);
        let l = lmax_gram(&inst.a, 1e-10, 10_000).unwrap().value;
        for alg in [Algorithm::PdcaE, Algorithm::Pdca] {
            let mut cfg = SolverConfig::new(alg);
            cfg.lipschitz = Some(l);
            let res = solve(&inst, &spec, &cfg).unwrap();
            let report = check_descent(&res, l).unwrap();
            runs += 1;
            violations += report.violations;
            worst = worst.max(report.max_violation);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        violations == 0 && secs < 30.0,
        format!("{violations} violations over {runs} runs (worst shortfall {worst:.2e}), {secs:.1} s"),
    )
}

fn l12_table(table: &ResultTable) -> Outcome {
    let runs = table.records_for(Algorithm::Pdca).count();
    let capped = table.records_for(Algorithm::Pdca).filter(|r| r.status == SolveStatus::IterationCap).count();
    let (it_e, it_g) = (mean_iters(table, Algorithm::PdcaE), mean_iters(table, Algorithm::Gist));
    let (f_e, f_g, f_p) =
        (mean_fval(table, Algorithm::PdcaE), mean_fval(table, Algorithm::Gist), mean_fval(table, Algorithm::Pdca));
    let a = capped as f64 >= 0.9 * runs as f64;
    let b = (640.0..=1280.0).contains(&it_e);
    let c = it_g > it_e;
    let d = f_e <= f_g && f_g <= f_p && (2.5e-2..=3.5e-2).contains(&f_e);
    check(
        a && b && c && d && table.exit_code() == 0,
        format!(
            "pdca capped {capped}/{runs}; iter gist {it_g:.0} pdca_e {it_e:.0}; fval pdca_e {f_e:.4e} gist {f_g:.4e} pdca {f_p:.4e}; exit {}",
            table.exit_code()
        ),
    )
}

fn log_table(table: &ResultTable) -> Outcome {
    let runs = table.records_for(Algorithm::Pdca).count();
    let capped = table.records_for(Algorithm::Pdca).filter(|r| r.status == SolveStatus::IterationCap).count();
    let iter_cell = render_table(table, TableFormat::Csv).map_err(|e| e.to_string())?;
    let shows_max = iter_cell.lines().nth(1).is_some_and(|row| row.split(',').nth(6) == Some("max"));
    let (it_p, it_e, it_g) =
        (mean_iters(table, Algorithm::Pdca), mean_iters(table, Algorithm::PdcaE), mean_iters(table, Algorithm::Gist));
    let f = [mean_fval(table, Algorithm::Gist), mean_fval(table, Algorithm::PdcaE), mean_fval(table, Algorithm::Pdca)];
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo;
    check(
        !shows_max
            && 2 * capped < runs
            && (3600.0..5000.0).contains(&it_p)
            && (280.0..=520.0).contains(&it_e)
            && spread <= 5e-4
            && table.exit_code() == 0,
        format!(
            "pdca capped {capped}/{runs}; iter gist {it_g:.0} pdca_e {it_e:.0} pdca {it_p:.0}; fval {:.4e} / {:.4e} / {:.4e} (spread {spread:.1e}); exit {}",
            f[0],
            f[1],
            f[2],
            table.exit_code()
        ),
    )
}

fn random_spec(rng: &mut Lcg, family: RegularizerFamily) -> RegularizerSpec {
    let lambda = rng.range(0.01, 2.0);
    match family {
        RegularizerFamily::L1MinusL2 => RegularizerSpec::L1MinusL2 { lambda },
        RegularizerFamily::Log { .. } => RegularizerSpec::Log { lambda, epsilon: rng.range(0.05, 2.0) },
        RegularizerFamily::Mcp { .. } => RegularizerSpec::Mcp { lambda, theta: rng.range(0.2, 8.0) },
        RegularizerFamily::Scad { .. } => RegularizerSpec::Scad { lambda, theta: rng.range(2.05, 8.0) },
        RegularizerFamily::TransformedL1 { .. } => RegularizerSpec::TransformedL1 { lambda, a: rng.range(0.1, 4.0) },
    }
}

fn prox_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg::new(4);
    let (mut cases, mut failures, mut worst) = (0, 0, f64::NEG_INFINITY);
    let mut run = |spec: &RegularizerSpec, z: &[f64], l: f64| {
        let fast = full_prox(spec, z, l).unwrap();
        let slow = prox_oracle(spec, z, l).unwrap();
        let gap = prox_objective(spec, z, l, &fast.point) - prox_objective(spec, z, l, &slow.point);
        cases += 1;
        worst = worst.max(gap);
        if gap > 1e-6 {
            failures += 1;
        }
    };
    for family in all_families() {
        for _ in 0..1000 {
            let spec = random_spec(&mut rng, family);
            let z = rng.range(-6.0, 6.0);
            let l = rng.range(0.1, 10.0);
            run(&spec, &[z], l);
        }
    }
    for _ in 0..200 {
        let spec = random_spec(&mut rng, RegularizerFamily::L1MinusL2);
        let z = [rng.range(-6.0, 6.0), rng.range(-6.0, 6.0)];
        let l = rng.range(0.1, 10.0);
        run(&spec, &z, l);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures == 0 && secs < 60.0,
        format!("{failures}/{cases} cases above 1e-6 (worst excess {worst:.2e}), {secs:.1} s"),
    )
}

fn gradients_and_lipschitz() -> Outcome {
    let mut rng = Lcg::new(5);
    let mut worst_grad = 0.0f64;
    for _ in 0..100 {
        let (m, n) = (rng.int(2, 12), rng.int(2, 12));
        let a = rng.matrix(m, n);
        let b = rng.vector(m, 1.0);
        let x = rng.vector(n, 1.0);
        let inst = dcprox::ProblemInstance::from_data(a, b).unwrap();
        let got = smooth_eval(&inst, &x).unwrap().gradient;
        let fd = central_gradient(|p| naive_loss(&inst.a, &inst.b, p), &x, 1e-5);
        worst_grad = worst_grad.max(dist(&got, &fd) / norm(&fd).max(f64::MIN_POSITIVE));
    }
    let mut worst_lip = f64::NEG_INFINITY;
    for family in all_families().into_iter().skip(1) {
        for _ in 0..1000 {
            let spec = random_spec(&mut rng, family);
            let lip = spec.p2_gradient_lipschitz().unwrap();
            let dim = rng.int(1, 4);
            let spread = rng.range(0.01, 5.0) * spec.lambda().max(0.1);
            let x = rng.vector(dim, spread);
            let y: Vec<f64> = if rng.unit() < 0.5 {
                x.iter().map(|v| v + rng.range(-0.1, 0.1) * spread).collect()
            } else {
                rng.vector(dim, spread)
            };
            let excess = dist(&spec.p2_subgrad(&x), &spec.p2_subgrad(&y)) - lip * dist(&x, &y);
            worst_lip = worst_lip.max(excess);
        }
    }
    check(
        worst_grad <= 1e-6 && worst_lip <= 1e-10,
        format!("worst gradient rel. error {worst_grad:.2e}; worst Lipschitz excess {worst_lip:.2e}"),
    )
}

fn eigenvalue_estimation() -> Outcome {
    let start = Instant::now();
    let mut rng = Lcg::new(6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (m, n) = (rng.int(1, 30), rng.int(1, 20));
        let a = rng.matrix(m, n);
        let want = max_eigenvalue(gram(&a));
        let got = lmax_gram(&a, 1e-10, 10_000).unwrap();
        worst = worst.max((got.value - want).abs() / want);
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-8 && secs < 10.0, format!("worst relative error {worst:.2e} over 50 matrices, {secs:.2} s"))
}

fn extrapolation_schedule() -> Outcome {
    let mut rng = Lcg::new(7);
    let mut state = ExtrapolationState::default();
    let (mut sup, mut out_of_range, mut nonzero_after_reset, mut resets) = (0.0f64, 0, 0, 0);
    let mut since = 0;
    for _ in 0..10_000 {
        let trigger = rng.unit() < 0.01;
        let expect_reset = trigger || since >= 200;
        let (beta, next) = next_beta(&state, Some(200), trigger);
        if !(0.0..1.0).contains(&beta) {
            out_of_range += 1;
        }
        if expect_reset {
            resets += 1;
            since = 0;
            if beta != 0.0 {
                nonzero_after_reset += 1;
            }
        }
        since += 1;
        sup = sup.max(beta);
        state = next;
    }
    check(
        out_of_range == 0 && sup < 1.0 && nonzero_after_reset == 0 && state.restarts == resets,
        format!("sup beta {sup:.6}; {out_of_range} out of [0,1); {resets} resets, {nonzero_after_reset} nonzero after reset"),
    )
}

fn stationarity(tables: &[&ResultTable]) -> Outcome {
    let (mut checked, mut bad, mut worst) = (0, 0, 0.0f64);
    let (mut l12, mut inadmissible) = (0, 0);
    for table in tables {
        for r in &table.records {
            if r.solver != Algorithm::Pdca && r.status == SolveStatus::Converged {
                checked += 1;
                worst = worst.max(r.residual);
                if r.residual > 10.0 * TOL {
                    bad += 1;
                }
            }
            if let Some(ok) = r.lambda_admissible {
                l12 += 1;
                if !ok {
                    inadmissible += 1;
                }
            }
        }
    }
    check(
        checked > 0 && bad == 0 && l12 > 0 && inadmissible == 0,
        format!("{bad}/{checked} converged runs above 10*tol (worst {worst:.2e}); {inadmissible}/{l12} l1-l2 runs inadmissible"),
    )
}

fn determinism(first: &ResultTable) -> Outcome {
    let again = run_benchmark(&desk_plan(RegularizerFamily::L1MinusL2, 5e-4), None).unwrap();
    let same = again.without_timing() == first.without_timing();
    check(same, format!("rerun identical apart from timing: {same}"))
}

fn report(id: &str, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("{tag} [{id}] {name}: {detail} [{secs:.1} s]");
    ok
}

fn main() {
    println!("acceptance: {DESK_REPLICATES} replicates of {DESK_CELL} per desk table, master seed {DESK_SEED}");
    let mut ok = true;
    ok &= report("1", "descent invariant", descent_invariant);

    let mut l12 = None;
    ok &= report("2", "l1-l2 desk table", || {
        l12_table(l12.insert(run_benchmark(&desk_plan(RegularizerFamily::L1MinusL2, 5e-4), None).unwrap()))
    });
    let mut log = None;
    ok &= report("3", "log desk table", || {
        log_table(log.insert(run_benchmark(&desk_plan(RegularizerFamily::Log { epsilon: 0.5 }, 1e-3), None).unwrap()))
    });

    ok &= report("4", "prox oracle equivalence", prox_oracle_equivalence);
    ok &= report("5", "gradient and Lipschitz checks", gradients_and_lipschitz);
    ok &= report("6", "eigenvalue estimation", eigenvalue_estimation);
    ok &= report("7", "extrapolation schedule", extrapolation_schedule);
    ok &= report("8", "stationarity and admissibility", || match (&l12, &log) {
        (Some(a), Some(b)) => stationarity(&[a, b]),
        _ => Err("desk tables unavailable".into()),
    });
    ok &= report("9", "determinism", || determinism(l12.as_ref().ok_or("desk table unavailable")?));

    println!("acceptance: {}", if ok { "all checks passed" } else { "FAILED" });
    if !ok {
        std::process::exit(1);
    }
}

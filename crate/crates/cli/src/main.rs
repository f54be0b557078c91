use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dcprox::bench::format_fval;
use dcprox::instances::{load_instance, save_instance, DEFAULT_NOISE_SCALE};
use dcprox::linalg::{LMAX_DEFAULT_MAX_ITER, LMAX_DEFAULT_TOL};
use dcprox::{
    check_descent, generate_instance, lmax_gram, render_table, run_benchmark, solve, stationarity_residual, Algorithm,
    BenchmarkPlan, RegularizerSpec, ResultTable, SolveResult, SolverConfig, TableFormat,
};

const EXIT_INVARIANT: u8 = 2;
const EXIT_ABORT: u8 = 3;

/// Proximal DC algorithms for sparse least squares.
#[derive(Parser)]
#[command(name = "dcprox", version)]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it as a binary container.
    Gen(GenArgs),
    /// Run one solver on a stored instance.
    Solve(SolveArgs),
    /// Run a benchmark plan and write the result table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_NOISE_SCALE)]
    noise: f64,
    /// Output path (default: instance_MxNxS_SEED.dcp).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Regularizer, e.g. `l1-l2:lambda=5e-4` or `log:lambda=1e-3,eps=0.5`.
    #[arg(long)]
    reg: RegularizerSpec,
    #[arg(long)]
    solver: Algorithm,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Fixed restart period of the momentum schedule; 0 disables it.
    #[arg(long, default_value_t = 200)]
    restart: usize,
    /// Disable the adaptive momentum restart of pdca_e.
    #[arg(long)]
    no_adaptive: bool,
    /// Write per-iteration `t,F,E,step,beta` rows to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print a header line before the result line.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_md: Option<PathBuf>,
    /// Per-run records (seed, solver, iter, status, fval, residual).
    #[arg(long)]
    out_runs: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Solve(args) => solve_one(args),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn gen(args: GenArgs) -> Result<u8> {
    let inst = generate_instance(args.m, args.n, args.s, args.noise, args.seed)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("instance_{}x{}x{}_{}.dcp", args.m, args.n, args.s, args.seed)));
    save_instance(&inst, &out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(0)
}

fn solve_one(args: SolveArgs) -> Result<u8> {
    let inst = load_instance(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let lmax = lmax_gram(&inst.a, LMAX_DEFAULT_TOL, LMAX_DEFAULT_MAX_ITER)?;
    if !lmax.converged {
        log::warn!("lambda_max estimate did not converge in {} iterations", lmax.iterations);
    }
    let mut cfg = SolverConfig::new(args.solver);
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.restart_period = (args.restart > 0).then_some(args.restart);
    cfg.adaptive_restart &= !args.no_adaptive;
    cfg.lipschitz = Some(lmax.value);
    cfg.record_trace = args.trace.is_some() || args.solver != Algorithm::Gist;

    let res = solve(&inst, &args.reg, &cfg)?;
    let residual = stationarity_residual(&inst, &args.reg, &res.x_final, lmax.value)?;
    if let Some(path) = &args.trace {
        write_trace(&res, path).with_context(|| format!("writing {}", path.display()))?;
    }
    if args.header {
        println!("iter,status,fval,residual");
    }
    println!("{},{},{},{:.3e}", res.iterations, res.status, format_fval(res.fval), residual);

    if res.status.is_abort() {
        eprintln!("solver aborted: {}", res.status);
        return Ok(EXIT_ABORT);
    }
    if args.solver != Algorithm::Gist {
        let report = check_descent(&res, lmax.value)?;
        if report.violations > 0 {
            eprintln!(
                "descent bound violated at {} iterations (max shortfall {:e})",
                report.violations, report.max_violation
            );
            return Ok(EXIT_INVARIANT);
        }
    }
    Ok(0)
}

fn write_trace(res: &SolveResult, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,F,E,step,beta")?;
    let opt = |v: Option<&f64>| v.map_or(String::new(), |x| format!("{x:e}"));
    for (t, f) in res.objective_trace.iter().enumerate() {
        let (step, beta) = match t.checked_sub(1) {
            Some(k) => (opt(res.step_norm_trace.get(k)), opt(res.beta_trace.get(k))),
            None => (String::new(), String::new()),
        };
        writeln!(w, "{t},{f:e},{},{step},{beta}", opt(res.merit_trace.get(t)))?;
    }
    w.flush()?;
    Ok(())
}

fn write_runs(table: &ResultTable, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "m,n,s,lambda,replicate,seed,solver,iter,status,fval,residual,cpu")?;
    for r in &table.records {
        writeln!(
            w,
            "{},{},{},{:e},{},{},{},{},{},{:e},{:e},{:.4}",
            r.cell.m,
            r.cell.n,
            r.cell.s,
            r.lambda,
            r.replicate,
            r.seed,
            r.solver,
            r.iterations,
            r.status,
            r.fval,
            r.residual,
            r.cpu_seconds
        )?;
    }
    w.flush()?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<u8> {
    let plan = BenchmarkPlan::from_file(&args.plan).with_context(|| format!("reading plan {}", args.plan.display()))?;
    let table = run_benchmark(&plan, args.jobs)?;

    std::fs::write(&args.out_csv, render_table(&table, TableFormat::Csv)?)
        .with_context(|| format!("writing {}", args.out_csv.display()))?;
    if let Some(md) = &args.out_md {
        std::fs::write(md, render_table(&table, TableFormat::Markdown)?)
            .with_context(|| format!("writing {}", md.display()))?;
    }
    if let Some(runs) = &args.out_runs {
        write_runs(&table, runs).with_context(|| format!("writing {}", runs.display()))?;
    }

    if table.lmax_unconverged > 0 {
        log::warn!("{} instances with an unconverged lambda_max estimate", table.lmax_unconverged);
    }
    for r in table.aborted_runs() {
        eprintln!("aborted: {} lambda={:e} replicate={} {}: {}", r.cell, r.lambda, r.replicate, r.solver, r.status);
    }
    for r in table.invariant_failures() {
        eprintln!("invariant violated: {} lambda={:e} replicate={} {}", r.cell, r.lambda, r.replicate, r.solver);
    }
    Ok(table.exit_code() as u8)
}

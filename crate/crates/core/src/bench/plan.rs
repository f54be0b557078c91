use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{DcError, Result};
use crate::instances::DEFAULT_NOISE_SCALE;
use crate::regularizers::RegularizerFamily;
use crate::solvers::Algorithm;

/// One `(m, n, s)` problem size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridCell {
    pub m: usize,
    pub n: usize,
    pub s: usize,
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.s)
    }
}

impl FromStr for GridCell {
    type Err = DcError;

    /// `MxNxS`, e.g. `720x2560x80`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
        let nums: Vec<usize> = parts
            .iter()
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| DcError::Parse(format!("grid cell {s:?} is not MxNxS")))?;
        match nums.as_slice() {
            &[m, n, s_] if m > 0 && n > 0 && s_ > 0 && s_ <= n => Ok(Self { m, n, s: s_ }),
            _ => Err(DcError::Parse(format!("grid cell {s:?} is not a valid MxNxS with 0 < s <= n"))),
        }
    }
}

/// A benchmark sweep.
///
/// Text form is one `key = value` per line, `#` starts a comment:
///
/// ```text
/// grid      = 720x2560x80, 1440x5120x160
/// lambdas   = 5e-4, 1e-3
/// reg       = l1-l2            # or log:eps=0.5, mcp:theta=5, ...
/// solvers   = gist, pdca_e, pdca
/// instances = 30
/// seed      = 20170301
/// trace     = false
/// # optional, with defaults
/// noise     = 0.01
/// tol       = 1e-5
/// max_iter  = 5000
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPlan {
    pub grid: Vec<GridCell>,
    pub lambdas: Vec<f64>,
    pub family: RegularizerFamily,
    pub solvers: Vec<Algorithm>,
    pub instances_per_cell: usize,
    pub master_seed: u64,
    /// Keep per-iteration traces in the run records.
    pub trace: bool,
    pub noise_scale: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl BenchmarkPlan {
    pub fn new(grid: Vec<GridCell>, lambdas: Vec<f64>, family: RegularizerFamily) -> Self {
        Self {
            grid,
            lambdas,
            family,
            solvers: Algorithm::ALL.to_vec(),
            instances_per_cell: 30,
            master_seed: 0,
            trace: false,
            noise_scale: DEFAULT_NOISE_SCALE,
            tol: 1e-5,
            max_iter: 5000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(DcError::Contract(format!("benchmark plan: {msg}")));
        if self.grid.is_empty() {
            return fail("grid is empty");
        }
        if self.lambdas.is_empty() {
            return fail("no lambdas");
        }
        if self.solvers.is_empty() {
            return fail("no solvers");
        }
        if self.instances_per_cell == 0 {
            return fail("instances must be at least 1");
        }
        for &l in &self.lambdas {
            self.family.with_lambda(l).validate()?;
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return fail("tol and max_iter must be positive");
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return fail("noise must be finite and non-negative");
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split([',', ';']).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| DcError::Parse(format!("bad value {v:?} for {key}")))
}

impl FromStr for BenchmarkPlan {
    type Err = DcError;

    fn from_str(text: &str) -> Result<Self> {
        let mut grid = None;
        let mut lambdas = None;
        let mut family = None;
        let mut plan = BenchmarkPlan::new(Vec::new(), Vec::new(), RegularizerFamily::L1MinusL2);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| DcError::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            match key.as_str() {
                "grid" => grid = Some(list(value).map(str::parse).collect::<Result<Vec<GridCell>>>()?),
                "lambdas" | "lambda" => {
                    lambdas = Some(list(value).map(|v| parse_num::<f64>("lambdas", v)).collect::<Result<Vec<_>>>()?)
                }
                "reg" => family = Some(value.parse::<RegularizerFamily>()?),
                "solvers" => plan.solvers = list(value).map(str::parse).collect::<Result<Vec<Algorithm>>>()?,
                "instances" => plan.instances_per_cell = parse_num("instances", value)?,
                "seed" => plan.master_seed = parse_num("seed", value)?,
                "trace" => plan.trace = parse_num("trace", value)?,
                "noise" => plan.noise_scale = parse_num("noise", value)?,
                "tol" => plan.tol = parse_num("tol", value)?,
                "max_iter" | "max-iter" => plan.max_iter = parse_num("max_iter", value)?,
                other => return Err(DcError::Parse(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        plan.grid = grid.ok_or_else(|| DcError::Parse("plan is missing `grid`".into()))?;
        plan.lambdas = lambdas.ok_or_else(|| DcError::Parse("plan is missing `lambdas`".into()))?;
        plan.family = family.ok_or_else(|| DcError::Parse("plan is missing `reg`".into()))?;
        plan.solvers.sort();
        plan.solvers.dedup();
        plan.validate()?;
        Ok(plan)
    }
}

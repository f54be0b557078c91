//! The least-squares model `F(x) = 1/2 ||Ax - b||^2 + P1(x) - P2(x)` and
//! the random instance generator.
//!
//! Generation draws from four independent streams of the same seed so that
//! changing one size parameter does not perturb the others:
//! stream 0 the Gaussian entries of `A`, stream 1 the support, stream 2 the
//! signal values, stream 3 the observation noise.

mod container;

use crate::error::{contract, Result};
use crate::linalg::{self, gauss_vector, matvec, matvec_t, norm_inf, norm_sq, DenseMatrix, RandomSource};
use crate::regularizers::RegularizerSpec;

pub use container::{load_instance, read_instance, save_instance, write_instance, CONTAINER_MAGIC, CONTAINER_VERSION};

pub const DEFAULT_NOISE_SCALE: f64 = 0.01;

const STREAM_MATRIX: u64 = 0;
const STREAM_SUPPORT: u64 = 1;
const STREAM_SIGNAL: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// A sparse-recovery least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub ground_truth: Vec<f64>,
    /// Sorted indices of the nonzeros of `ground_truth`.
    pub support: Vec<usize>,
    pub seed: u64,
    pub noise_scale: f64,
}

/// Value and gradient of `f(x) = 1/2 ||Ax - b||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothEval {
    pub value: f64,
    pub gradient: Vec<f64>,
}

impl ProblemInstance {
    /// Assembles an instance from explicit data, checking dimensions and
    /// that `support` is exactly the nonzero pattern of `ground_truth`.
    pub fn from_parts(
        a: DenseMatrix,
        b: Vec<f64>,
        ground_truth: Vec<f64>,
        support: Vec<usize>,
        seed: u64,
        noise_scale: f64,
    ) -> Result<Self> {
        if b.len() != a.rows() {
            return contract(format!("b has length {}, A has {} rows", b.len(), a.rows()));
        }
        if ground_truth.len() != a.cols() {
            return contract(format!("ground truth has length {}, A has {} columns", ground_truth.len(), a.cols()));
        }
        if b.iter().chain(&ground_truth).any(|v| !v.is_finite()) {
            return contract("non-finite entries in b or ground truth");
        }
        let nonzeros: Vec<usize> = (0..ground_truth.len()).filter(|&i| ground_truth[i] != 0.0).collect();
        if nonzeros != support {
            return contract("support does not match the nonzero pattern of the ground truth");
        }
        if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
            return contract("noise scale must be finite and non-negative");
        }
        Ok(Self { a, b, ground_truth, support, seed, noise_scale })
    }

    /// An instance with only `A` and `b` known.
    pub fn from_data(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        let n = a.cols();
        Self::from_parts(a, b, vec![0.0; n], Vec::new(), 0, 0.0)
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn s(&self) -> usize {
        self.support.len()
    }
}

/// Draws an instance: Gaussian `A` with unit-norm columns, a uniformly
/// random `s`-subset support carrying i.i.d. N(0, 1) values, and
/// `b = A y + noise_scale * n_hat`.
pub fn generate_instance(m: usize, n: usize, s: usize, noise_scale: f64, seed: u64) -> Result<ProblemInstance> {
    if m == 0 || n == 0 {
        return contract(format!("instance dimensions must be positive, got m={m}, n={n}"));
    }
    if s > n {
        return contract(format!("sparsity s={s} exceeds n={n}"));
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return contract("noise scale must be finite and non-negative");
    }

    let mut src = RandomSource::new(seed, STREAM_MATRIX);
    let mut a = DenseMatrix::new(m, n, gauss_vector(&mut src, m * n))?;
    let mut norms = a.column_norms();
    let mut resampled = 0usize;
    for (j, norm_j) in norms.iter_mut().enumerate() {
        while *norm_j == 0.0 {
            let col = gauss_vector(&mut src, m);
            *norm_j = linalg::norm(&col);
            a.set_column(j, &col);
            resampled += 1;
        }
    }
    if resampled > 0 {
        log::warn!("generate_instance: resampled {resampled} zero column(s) (seed {seed})");
    }
    a.scale_columns_inv(&norms);

    // Partial Fisher-Yates: the first s slots are a uniform s-subset.
    let mut src = RandomSource::new(seed, STREAM_SUPPORT);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..s {
        let j = i + src.below((n - i) as u64) as usize;
        perm.swap(i, j);
    }
    let mut support = perm[..s].to_vec();
    support.sort_unstable();

    let mut src = RandomSource::new(seed, STREAM_SIGNAL);
    let mut ground_truth = vec![0.0; n];
    for &i in &support {
        let mut v = src.gauss();
        while v == 0.0 {
            v = src.gauss();
        }
        ground_truth[i] = v;
    }

    let mut b = matvec(&a, &ground_truth)?;
    let mut src = RandomSource::new(seed, STREAM_NOISE);
    for bi in b.iter_mut() {
        *bi += noise_scale * src.gauss();
    }

    ProblemInstance::from_parts(a, b, ground_truth, support, seed, noise_scale)
}

/// `f(x) = 1/2 ||Ax - b||^2` and `A^T (Ax - b)`.
pub fn smooth_eval(inst: &ProblemInstance, x: &[f64]) -> Result<SmoothEval> {
    let mut r = matvec(&inst.a, x)?;
    for (ri, bi) in r.iter_mut().zip(&inst.b) {
        *ri -= bi;
    }
    let value = 0.5 * norm_sq(&r);
    let gradient = matvec_t(&inst.a, &r)?;
    Ok(SmoothEval { value, gradient })
}

/// `F(x) = f(x) + P1(x) - P2(x)`.
pub fn objective(inst: &ProblemInstance, reg: &RegularizerSpec, x: &[f64]) -> Result<f64> {
    let f = smooth_eval(inst, x)?.value;
    let (p1, p2) = reg.reg_value(x);
    Ok(f + p1 - p2)
}

/// `1/2 ||A^T b||_inf`. For the l1-l2 penalty, `lambda` below this value
/// guarantees the origin is not stationary.
pub fn l12_lambda_bound(inst: &ProblemInstance) -> f64 {
    let atb = matvec_t(&inst.a, &inst.b).expect("instance dimensions are consistent");
    0.5 * norm_inf(&atb)
}

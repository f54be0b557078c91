//! Dense kernels, the largest eigenvalue of a Gram matrix, and the seeded
//! Gaussian source every generator in the crate draws from.
//!
//! Everything is plain `f64` on row-major `Vec` storage. Reductions use a
//! fixed accumulation order so results are bitwise reproducible.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{contract, Result};

/// A dense `rows x cols` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return contract(format!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        if data.len() != rows * cols {
            return contract(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return contract(format!("non-finite matrix entry at flat index {pos}"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return contract("ragged rows");
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::identity(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, &a) in sq.iter_mut().zip(self.row(i)) {
                *acc += a * a;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Divides every column by the matching entry of `norms`.
    pub(crate) fn scale_columns_inv(&mut self, norms: &[f64]) {
        let inv: Vec<f64> = norms.iter().map(|n| 1.0 / n).collect();
        for row in self.data.chunks_exact_mut(self.cols) {
            for (a, s) in row.iter_mut().zip(&inv) {
                *a *= s;
            }
        }
    }

    pub(crate) fn set_column(&mut self, j: usize, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self.data[i * self.cols + j] = v;
        }
    }
}

/// `A x`.
pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.cols {
        return contract(format!("matvec: x has length {}, A has {} columns", x.len(), a.cols));
    }
    let mut out = vec![0.0; a.rows];
    matvec_into(a, x, &mut out);
    Ok(out)
}

/// `A^T y`.
pub fn matvec_t(a: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != a.rows {
        return contract(format!("matvec_t: y has length {}, A has {} rows", y.len(), a.rows));
    }
    let mut out = vec![0.0; a.cols];
    matvec_t_into(a, y, &mut out);
    Ok(out)
}

/// Unchecked `out = A x`; callers guarantee the lengths.
pub(crate) fn matvec_into(a: &DenseMatrix, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), a.cols);
    debug_assert_eq!(out.len(), a.rows);
    for (o, row) in out.iter_mut().zip(a.data.chunks_exact(a.cols)) {
        *o = dot(row, x);
    }
}

/// Unchecked `out = A^T y`.
pub(crate) fn matvec_t_into(a: &DenseMatrix, y: &[f64], out: &mut [f64]) {
    debug_assert_eq!(y.len(), a.rows);
    debug_assert_eq!(out.len(), a.cols);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (&yi, row) in y.iter().zip(a.data.chunks_exact(a.cols)) {
        if yi != 0.0 {
            axpy(yi, row, out);
        }
    }
}

/// Inner product with eight interleaved accumulators (vectorizes, and the
/// summation order is fixed).
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    let mut acc = [0.0f64; 8];
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `||x - y||`
pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Outcome of [`lmax_gram`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmaxEstimate {
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` ran out before the error estimate dropped
    /// below the tolerance. `value` is still a valid lower bound.
    pub converged: bool,
}

pub const LMAX_DEFAULT_TOL: f64 = 1e-10;
pub const LMAX_DEFAULT_MAX_ITER: usize = 10_000;

/// Largest eigenvalue of `A^T A` by power iteration, alternating `A v` and
/// `A^T w` without ever forming the Gram matrix.
///
/// The returned value is a Rayleigh quotient, hence never above the true
/// eigenvalue (up to rounding). Convergence is declared when an Aitken-style
/// extrapolation of the remaining error, `delta * q / (1 - q)` with `q` the
/// observed contraction ratio of successive increments, drops below
/// `tol * value`.
pub fn lmax_gram(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<LmaxEstimate> {
    if !(tol > 0.0 && tol < 1.0) {
        return contract(format!("lmax_gram: tol must lie in (0, 1), got {tol}"));
    }
    if max_iter == 0 {
        return contract("lmax_gram: max_iter must be positive");
    }
    if a.data.iter().all(|&v| v == 0.0) {
        return contract("lmax_gram: A is the zero matrix");
    }

    let mut v = gauss_vector(&mut RandomSource::new(0x6c6d_6178, 0), a.cols);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut w = vec![0.0; a.rows];
    let mut u = vec![0.0; a.cols];
    let mut rho = 0.0f64;
    let mut prev_delta = f64::NAN;

    for k in 1..=max_iter {
        matvec_into(a, &v, &mut w);
        let next = norm_sq(&w);
        matvec_t_into(a, &w, &mut u);
        let nu = norm(&u);
        if nu == 0.0 {
            // v landed in the null space; only possible for a random start
            // with measure zero.
            return contract("lmax_gram: iterate collapsed to zero");
        }
        let delta = next - rho;
        rho = rho.max(next);

        if k >= 2 {
            // Increments at rounding level: nothing left to gain.
            if delta <= 8.0 * f64::EPSILON * rho {
                return Ok(LmaxEstimate { value: rho, iterations: k, converged: true });
            }
            let q = delta / prev_delta;
            if q.is_finite() && q < 1.0 && delta <= tol * rho {
                let remaining = delta * q.max(0.0) / (1.0 - q);
                if remaining <= tol * rho {
                    return Ok(LmaxEstimate { value: rho, iterations: k, converged: true });
                }
            }
        }
        prev_delta = delta;
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / nu;
        }
    }
    log::warn!("lmax_gram: no convergence within {max_iter} iterations, returning best estimate {rho}");
    Ok(LmaxEstimate { value: rho, iterations: max_iter, converged: false })
}

/// Seeded, platform-independent pseudo-random source.
///
/// Backed by ChaCha8 keyed with the seed; `stream_id` selects ChaCha's
/// independent stream, so `(seed, stream_id)` fully determines the output.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
    stream_id: u64,
    spare: Option<f64>,
}

impl RandomSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, stream_id, spare: None }
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `(0, 1]` with 53 bits of resolution.
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` (rejection sampling, unbiased).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % bound;
            }
        }
    }

    /// One standard normal draw.
    ///
    /// Box-Muller: with `u1` uniform on `(0, 1]` and `u2` uniform on
    /// `(0, 1]`, `r = sqrt(-2 ln u1)` and the pair
    /// `(r cos 2 pi u2, r sin 2 pi u2)` is emitted cosine first.
    pub fn gauss(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open0();
        let u2 = self.uniform_open0();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// `len` i.i.d. N(0, 1) draws from `src`.
pub fn gauss_vector(src: &mut RandomSource, len: usize) -> Vec<f64> {
    (0..len).map(|_| src.gauss()).collect()
}

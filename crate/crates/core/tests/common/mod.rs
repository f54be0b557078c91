//! Reference implementations used as test oracles. Nothing here calls into
//! the crate's numerical kernels.

#![allow(dead_code, clippy::needless_range_loop)]

use dcprox::DenseMatrix;

/// Minimal xorshift64* for drawing test cases.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn int(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + (self.next_u64() % (hi_inclusive - lo + 1) as u64) as usize
    }

    /// Approximately standard normal (sum of 12 uniforms).
    pub fn normalish(&mut self) -> f64 {
        (0..12).map(|_| self.unit()).sum::<f64>() - 6.0
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| self.normalish()).collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    pub fn vector(&mut self, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| scale * self.normalish()).collect()
    }
}

pub fn naive_matvec(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a.get(i, j) * x[j]).sum()).collect()
}

pub fn naive_matvec_t(a: &DenseMatrix, y: &[f64]) -> Vec<f64> {
    (0..a.cols()).map(|j| (0..a.rows()).map(|i| a.get(i, j) * y[i]).sum()).collect()
}

/// `1/2 ||Ax - b||^2` by explicit loops.
pub fn naive_loss(a: &DenseMatrix, b: &[f64], x: &[f64]) -> f64 {
    naive_matvec(a, x).iter().zip(b).map(|(ax, bi)| (ax - bi).powi(2)).sum::<f64>() / 2.0
}

/// Central differences of `f` at `x` with step `h`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            probe[j] = x[j] + h;
            let up = f(&probe);
            probe[j] = x[j] - h;
            let down = f(&probe);
            probe[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `A^T A` as nested rows.
pub fn gram(a: &DenseMatrix) -> Vec<Vec<f64>> {
    let n = a.cols();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = (0..a.rows()).map(|k| a.get(k, i) * a.get(k, j)).sum();
        }
    }
    g
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut s: Vec<Vec<f64>>) -> Vec<f64> {
    let n = s.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j].powi(2))
            .sum();
        let total: f64 = s.iter().flatten().map(|v| v * v).sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q] == 0.0 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).collect()
}

pub fn max_eigenvalue(s: Vec<Vec<f64>>) -> f64 {
    jacobi_eigenvalues(s).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Composite Simpson on `[lo, hi]`.
pub fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..panels {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

/// `int_0^upper f`, split at `breaks` so each piece is smooth.
pub fn integrate(f: impl Fn(f64) -> f64, upper: f64, breaks: &[f64], panels: usize) -> f64 {
    let mut knots: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < upper).collect();
    knots.sort_by(f64::total_cmp);
    knots.insert(0, 0.0);
    knots.push(upper);
    knots.windows(2).map(|w| simpson(&f, w[0], w[1], panels)).sum()
}

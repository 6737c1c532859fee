//! Small dense linear algebra and the scalar special functions needed by the
//! GP surrogate, the PCA scheduler and Expected Improvement.
//!
//! Matrices here are tiny (kernel matrices of a few hundred rows, covariance
//! matrices of a dozen), so everything is plain row-major `Vec<f64>`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite even with jitter {max_jitter:e}")]
    NotPositiveDefinite { max_jitter: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Square symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from row-major entries, checking squareness and
    /// symmetry to 1e-12 relative tolerance. The stored matrix is the
    /// symmetrized average.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let mut m = Self { n, data };
        for i in 0..n {
            for j in (i + 1)..n {
                let a = m.get(i, j);
                let b = m.get(j, i);
                if (a - b).abs() > 1e-12 * scale {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
                let avg = 0.5 * (a + b);
                m.set(i, j, avg);
                m.set(j, i, avg);
            }
        }
        Ok(m)
    }

    /// Builds a symmetric matrix from a function of the lower triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Lower-triangular Cholesky factor of `A + jitter·I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    n: usize,
    /// Row-major lower triangle; entries above the diagonal are zero.
    lower: Vec<f64>,
    jitter_used: f64,
}

impl CholFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.n + j]
    }

    /// `log|A + jitter·I| = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.l(i, i).ln()).sum::<f64>()
    }

    /// Solves `L·y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / self.lower[i * n + i];
        }
    }

    /// Solves `Lᵀ·x = y` in place.
    pub fn solve_upper_in_place(&self, y: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let xi = y[i] / self.lower[i * n + i];
            y[i] = xi;
            for k in 0..i {
                y[k] -= self.lower[i * n + k] * xi;
            }
        }
    }

    /// Dense inverse of the factored matrix, `(L·Lᵀ)⁻¹`.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.n;
        // Row i of L⁻¹ is −(Σ_{k<i} L_ik · row_k(L⁻¹)) / L_ii plus 1/L_ii on
        // the diagonal; rows are built with contiguous axpy updates.
        let mut linv = vec![0.0; n * n];
        for i in 0..n {
            let (done, rest) = linv.split_at_mut(i * n);
            let row = &mut rest[..n];
            for k in 0..i {
                let c = self.lower[i * n + k];
                if c != 0.0 {
                    for (r, v) in row[..=k].iter_mut().zip(&done[k * n..k * n + k + 1]) {
                        *r += c * v;
                    }
                }
            }
            let inv_d = 1.0 / self.lower[i * n + i];
            for r in row[..i].iter_mut() {
                *r *= -inv_d;
            }
            row[i] = inv_d;
        }
        // (L⁻¹)ᵀ L⁻¹ as a sum of outer products of the rows of L⁻¹.
        let mut out = SymMatrix::zeros(n);
        for k in 0..n {
            let lk = &linv[k * n..k * n + k + 1];
            for (i, &a) in lk.iter().enumerate() {
                if a != 0.0 {
                    for (o, b) in out.data[i * n..i * n + i + 1].iter_mut().zip(&lk[..=i]) {
                        *o += a * b;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[j * n + i] = out.data[i * n + j];
            }
        }
        out
    }
}

fn try_cholesky(a: &SymMatrix, jitter: f64) -> Option<Vec<f64>> {
    let n = a.n;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = l[i * n..i * n + j]
                .iter()
                .zip(&l[j * n..j * n + j])
                .map(|(x, y)| x * y)
                .sum();
            if i == j {
                let d = a.get(i, i) + jitter - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a.get(i, j) - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Jitter multipliers applied to the mean diagonal `tr(A)/n`.
const JITTER_LADDER: [f64; 5] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4];

/// Cholesky factorization with an escalating diagonal jitter.
pub fn cholesky_spd(a: &SymMatrix) -> Result<CholFactor, LinalgError> {
    let n = a.n;
    let mean_diag = if n == 0 {
        0.0
    } else {
        a.trace().abs() / n as f64
    };
    let mut last = 0.0;
    for &mult in &JITTER_LADDER {
        let jitter = mult * mean_diag;
        last = jitter;
        if let Some(lower) = try_cholesky(a, jitter) {
            return Ok(CholFactor {
                n,
                lower,
                jitter_used: jitter,
            });
        }
    }
    Err(LinalgError::NotPositiveDefinite { max_jitter: last })
}

/// Solves `(A + jitter·I)·x = b` by forward then backward substitution.
pub fn solve_chol(f: &CholFactor, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != f.n {
        return Err(LinalgError::DimensionMismatch {
            expected: f.n,
            got: b.len(),
        });
    }
    let mut x = b.to_vec();
    f.solve_lower_in_place(&mut x);
    f.solve_upper_in_place(&mut x);
    Ok(x)
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Row-major `n×n`; column `m` is the eigenvector of `eigenvalues[m]`.
    pub eigenvectors: Vec<f64>,
    n: usize,
}

impl SymEigen {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.eigenvectors[row * self.n + col]
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal norm drops
/// below `1e-12·‖A‖_F`.
pub fn eigen_sym(a: &SymMatrix) -> Result<SymEigen, LinalgError> {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = a.frobenius_norm();
    let tol = 1e-12 * norm;

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&m) <= tol;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps: sweep });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J on rows/cols p, q.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm(&m) <= tol;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[row * n + col] = v[row * n + src];
        }
    }
    Ok(SymEigen {
        eigenvalues,
        eigenvectors,
        n,
    })
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF through `erfc`, accurate to well below 1e-10 in the
/// tails where `1 + erf` would cancel.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

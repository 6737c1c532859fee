//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerics.
#![allow(dead_code)]

use dimsched::gp::{Dataset, KernelHyperparams};
use dimsched::optimize::IterationRecord;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense row-major matrix inverse by Gauss-Jordan with partial pivoting.
pub fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        assert!(d != 0.0, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// log|det A| by LU elimination with partial pivoting.
pub fn lu_log_abs_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut acc = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        m.swap(col, piv);
        acc += m[col][col].abs().ln();
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    acc
}

pub fn matvec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ARD squared-exponential kernel written from its definition.
pub fn naive_kernel(a: &[f64], b: &[f64], ls: &[f64], sf2: f64) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .zip(ls)
        .map(|((x, y), l)| ((x - y) / l).powi(2))
        .sum();
    sf2 * (-0.5 * r2).exp()
}

pub struct NaiveGp {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub ls: Vec<f64>,
    pub sf2: f64,
    pub sn2: f64,
}

impl NaiveGp {
    pub fn k_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        naive_kernel(&self.x[i], &self.x[j], &self.ls, self.sf2)
                            + if i == j { self.sn2 } else { 0.0 }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn mean_shift(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }

    pub fn centered(&self) -> Vec<f64> {
        let m = self.mean_shift();
        self.y.iter().map(|v| v - m).collect()
    }

    /// Posterior mean and (unclamped) variance via an explicit inverse.
    pub fn predict(&self, xs: &[f64]) -> (f64, f64) {
        let kinv = gauss_jordan_inverse(&self.k_matrix());
        let ks: Vec<f64> = self
            .x
            .iter()
            .map(|xi| naive_kernel(xi, xs, &self.ls, self.sf2))
            .collect();
        let mean = self.mean_shift() + dot(&ks, &matvec(&kinv, &self.centered()));
        let var = self.sf2 - dot(&ks, &matvec(&kinv, &ks));
        (mean, var)
    }

    pub fn lml(&self) -> f64 {
        let k = self.k_matrix();
        let yc = self.centered();
        let kinv = gauss_jordan_inverse(&k);
        let n = self.y.len() as f64;
        -0.5 * (dot(&yc, &matvec(&kinv, &yc))
            + lu_log_abs_det(&k)
            + n * (2.0 * std::f64::consts::PI).ln())
    }

    pub fn hyper(&self) -> KernelHyperparams {
        KernelHyperparams::new(&self.ls, self.sf2, self.sn2)
    }

    pub fn dataset(&self) -> Dataset {
        Dataset::new(self.x.clone(), self.y.clone()).unwrap()
    }
}

/// Random GP instance with `n` points in `[-2, 2]^d`, a smooth target plus
/// offset, lengthscales in `[0.4, 2]`, and noise `[1e-3, 1e-1]·σ_f²`.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> NaiveGp {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = x
        .iter()
        .map(|xi| 2.0 + dot(xi, &w).sin() + 0.1 * rng.random_range(-1.0..1.0))
        .collect();
    let ls = (0..d).map(|_| rng.random_range(0.4..2.0)).collect();
    let sf2 = rng.random_range(0.5..2.0);
    let sn2 = sf2 * 10f64.powf(rng.random_range(-3.0..-1.0));
    NaiveGp { x, y, ls, sf2, sn2 }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Six-hump camel on `[-3, 3] × [-2, 2]`.
pub fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (4.0 - 2.1 * a * a + a.powi(4) / 3.0) * a * a + a * b + (-4.0 + 4.0 * b * b) * b * b
}

/// Minimum of six-hump camel over a dense `(n+1)²` grid of the box.
pub fn camel_grid_min(n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let a = -3.0 + 6.0 * i as f64 / n as f64;
        for j in 0..=n {
            let b = -2.0 + 4.0 * j as f64 / n as f64;
            best = best.min(six_hump_camel(&[a, b]));
        }
    }
    best
}

/// Checks a full trace (design rows first) against the optimizer contract.
/// Returns a description of the first violation.
pub fn replay_incumbent(records: &[IterationRecord]) -> Result<(), String> {
    let mut best = f64::INFINITY;
    for r in records {
        best = best.min(r.y);
        if r.y_best != best {
            return Err(format!(
                "iter {}: y_best {} but running minimum {}",
                r.iter, r.y_best, best
            ));
        }
    }
    Ok(())
}

/// Replays a DSA trace: rows after `n_init` differ from the incumbent at
/// the time only on their subset coordinates.
pub fn replay_clamping(records: &[IterationRecord], n_init: usize) -> Result<(), String> {
    let mut inc_x = records[0].x.clone();
    let mut inc_y = records[0].y;
    for r in &records[1..n_init] {
        if r.y < inc_y {
            inc_y = r.y;
            inc_x = r.x.clone();
        }
    }
    for r in &records[n_init..] {
        let z = r
            .subset
            .as_ref()
            .ok_or_else(|| format!("iter {}: missing subset", r.iter))?;
        for j in 0..inc_x.len() {
            if !z.contains(j) && r.x[j] != inc_x[j] {
                return Err(format!(
                    "iter {}: coordinate {j} changed outside Z = {z}",
                    r.iter
                ));
            }
        }
        if r.y < inc_y {
            inc_y = r.y;
            inc_x = r.x.clone();
        }
    }
    Ok(())
}

/// Replays per-subset GP sizes: each DSA row grows exactly its own GP by one,
/// starting from the design size.
pub fn replay_isolation(records: &[IterationRecord], n_init: usize) -> Result<usize, String> {
    use std::collections::BTreeMap;
    let mut sizes: BTreeMap<String, usize> = BTreeMap::new();
    for r in &records[n_init..] {
        let z = r.subset.as_ref().ok_or("missing subset")?.to_string();
        let before = *sizes.get(&z).unwrap_or(&n_init);
        if r.gp_size != before + 1 {
            return Err(format!(
                "iter {}: GP {z} went from {before} to {}",
                r.iter, r.gp_size
            ));
        }
        sizes.insert(z, r.gp_size);
    }
    Ok(sizes.len())
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

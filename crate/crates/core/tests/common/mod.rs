//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numerical code: kernels are
//! re-derived from their formulas and every linear system is solved by plain
//! Gaussian elimination with partial pivoting.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use parallel_thompson::gp::{Kernel, KernelFamily};

pub fn kernel_value(kernel: &Kernel, x: &[f64], y: &[f64]) -> f64 {
    let r2: f64 = x
        .iter()
        .zip(y)
        .zip(&kernel.bandwidths)
        .map(|((a, b), h)| ((a - b) / h).powi(2))
        .sum();
    match kernel.family {
        KernelFamily::SquaredExponential => kernel.scale * (-r2 / 2.0).exp(),
        KernelFamily::Matern52 => {
            let r = r2.sqrt();
            kernel.scale * (1.0 + 5f64.sqrt() * r + 5.0 * r * r / 3.0) * (-(5f64.sqrt()) * r).exp()
        }
    }
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Determinant by elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

pub fn gram(kernel: &Kernel, pts: &[Vec<f64>], noise_var: f64) -> Vec<Vec<f64>> {
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            pts.iter()
                .enumerate()
                .map(|(j, q)| kernel_value(kernel, p, q) + if i == j { noise_var } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Posterior mean and covariance at `queries` by direct dense solves.
pub fn naive_posterior(
    kernel: &Kernel,
    pts: &[Vec<f64>],
    ys: &[f64],
    noise_var: f64,
    mean_const: f64,
    queries: &[Vec<f64>],
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let a = gram(kernel, pts, noise_var);
    let resid: Vec<f64> = ys.iter().map(|y| y - mean_const).collect();
    let alpha = solve(a.clone(), resid);
    let ks: Vec<Vec<f64>> = queries
        .iter()
        .map(|q| pts.iter().map(|p| kernel_value(kernel, p, q)).collect())
        .collect();
    let solved: Vec<Vec<f64>> = ks.iter().map(|k| solve(a.clone(), k.clone())).collect();
    let mean = ks
        .iter()
        .map(|k| mean_const + k.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let cov = (0..queries.len())
        .map(|i| {
            (0..queries.len())
                .map(|j| {
                    kernel_value(kernel, &queries[i], &queries[j])
                        - ks[i]
                            .iter()
                            .zip(&solved[j])
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                })
                .collect()
        })
        .collect();
    (mean, cov)
}

/// `½ log det(I + K/η²)` by elimination.
pub fn naive_info_gain(kernel: &Kernel, pts: &[Vec<f64>], noise_var: f64) -> f64 {
    let n = pts.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    kernel_value(kernel, &pts[i], &pts[j]) / noise_var
                        + if i == j { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    0.5 * determinant(a).ln()
}

/// Lower Cholesky factor of a positive-definite matrix, textbook loop.
pub fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).max(0.0).sqrt();
            } else {
                l[i][j] = if l[j][j] > 0.0 {
                    (a[i][j] - s) / l[j][j]
                } else {
                    0.0
                };
            }
        }
    }
    l
}

pub fn random_point<R: rand::Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

pub fn log_uniform<R: rand::Rng>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn random_kernel<R: rand::Rng>(dim: usize, scale: f64, rng: &mut R) -> Kernel {
    let family = if rng.random::<bool>() {
        KernelFamily::SquaredExponential
    } else {
        KernelFamily::Matern52
    };
    let h = (0..dim).map(|_| log_uniform(0.05, 1.0, rng)).collect();
    Kernel::new(family, h, scale).unwrap()
}

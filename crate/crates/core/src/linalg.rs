//! Small dense linear-algebra helpers shared by the GP and theory modules.

use nalgebra::{Cholesky, DMatrix, Dyn};

/// Jitter multipliers tried in order when a factorization fails. Each is
/// scaled by the kernel scale before being added to the diagonal.
pub(crate) const JITTER_LADDER: [f64; 8] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

pub(crate) const MAX_JITTER: f64 = 1e-4;

/// Cholesky of `a + jitter·I`, escalating the jitter along [`JITTER_LADDER`].
/// Returns the factor and the jitter that was finally used.
pub(crate) fn cholesky_with_jitter(
    a: &DMatrix<f64>,
    scale: f64,
) -> Option<(Cholesky<f64, Dyn>, f64)> {
    for mult in JITTER_LADDER {
        let jitter = mult * scale;
        let mut m = a.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(chol) = m.cholesky() {
            return Some((chol, jitter));
        }
    }
    None
}

/// Lower-triangular `L` with `L Lᵀ ≈ a` for a symmetric positive
/// semi-definite `a`.
///
/// Pivots below `1e-12 · max diag` are treated as exact zeros and their
/// column is left empty, so rank-deficient covariances (points with zero
/// posterior variance, duplicated candidates) factor without jitter. A pivot
/// more negative than `1e-8 · max diag` means the matrix is indefinite and
/// `None` is returned.
pub(crate) fn psd_cholesky(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0_f64, f64::max);
    if n == 0 {
        return Some(DMatrix::zeros(0, 0));
    }
    if max_diag <= 0.0 {
        return if (0..n).all(|i| a[(i, i)] >= -1e-300) {
            Some(DMatrix::zeros(n, n))
        } else {
            None
        };
    }
    let zero_tol = 1e-12 * max_diag;
    let neg_tol = 1e-8 * max_diag;

    // Blocked right-looking factorisation: each diagonal block and the panel
    // below it are factored column by column, then the trailing matrix is
    // updated with one matrix product.
    let mut w = a.clone();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for k0 in (0..n).step_by(BLOCK) {
        let k1 = (k0 + BLOCK).min(n);
        for j in k0..k1 {
            let mut col: Vec<f64> = w.view((j, j), (n - j, 1)).iter().copied().collect();
            for p in k0..j {
                let ljp = l[(j, p)];
                if ljp != 0.0 {
                    let lp = &l.as_slice()[p * n + j..(p + 1) * n];
                    for (c, x) in col.iter_mut().zip(lp) {
                        *c -= ljp * x;
                    }
                }
            }
            let d = col[0];
            if d < -neg_tol {
                return None;
            }
            if d <= zero_tol {
                continue;
            }
            let ljj = d.sqrt();
            let lj = &mut l.as_mut_slice()[j * n + j..(j + 1) * n];
            lj[0] = ljj;
            for (dst, c) in lj[1..].iter_mut().zip(&col[1..]) {
                *dst = c / ljj;
            }
        }
        if k1 < n {
            let r = n - k1;
            let panel = l.view((k1, k0), (r, k1 - k0)).clone_owned();
            w.view_mut((k1, k1), (r, r))
                .gemm(-1.0, &panel, &panel.transpose(), 1.0);
        }
    }
    Some(l)
}

const BLOCK: usize = 64;

/// `L⁻¹ B` for lower-triangular `L`; only the lower triangle of `l` is read.
pub(crate) fn solve_lower(l: &DMatrix<f64>, mut b: DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    for k0 in (0..n).step_by(BLOCK) {
        let kb = BLOCK.min(n - k0);
        let mut xb = b.rows(k0, kb).clone_owned();
        let ok = l
            .view((k0, k0), (kb, kb))
            .solve_lower_triangular_mut(&mut xb);
        debug_assert!(ok, "triangular factor has a zero diagonal entry");
        b.rows_mut(k0, kb).copy_from(&xb);
        if k0 + kb < n {
            b.rows_mut(k0 + kb, n - k0 - kb).gemm(
                -1.0,
                &l.view((k0 + kb, k0), (n - k0 - kb, kb)),
                &xb,
                1.0,
            );
        }
    }
    b
}

/// Factor of a covariance matrix for sampling: try the semi-definite
/// factorization, then escalate diagonal jitter.
pub(crate) fn sampling_factor(cov: &DMatrix<f64>, scale: f64) -> Option<DMatrix<f64>> {
    for mult in JITTER_LADDER {
        let jitter = mult * scale;
        let factor = if jitter > 0.0 {
            let mut m = cov.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
            psd_cholesky(&m)
        } else {
            psd_cholesky(cov)
        };
        if factor.is_some() {
            return factor;
        }
    }
    None
}

/// `log det` of a positive-definite matrix from its Cholesky factor.
pub(crate) fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

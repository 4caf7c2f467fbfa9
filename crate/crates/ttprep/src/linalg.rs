//! Thin wrappers around nalgebra's dense factorizations plus the pivoted
//! elimination used for rank detection. Everything here operates on small
//! matrices (at most a few hundred entries per axis in practice).

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Thin SVD with singular values sorted in decreasing order.
/// Returns `(U, σ, Vᵀ)` with `U: m×s`, `Vᵀ: s×n`, `s = min(m, n)`.
pub(crate) fn svd_thin(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    let svd = a.clone().try_svd(true, true, f64::EPSILON, 0)?;
    Some((svd.u?, svd.singular_values, svd.v_t?))
}

/// Thin QR: `A = Q·R` with `Q: m×s` column-orthonormal, `R: s×n`, `s = min(m, n)`.
pub(crate) fn qr_thin(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = a.clone().qr();
    (qr.q(), qr.r())
}

/// Thin LQ: `A = L·Q` with `L: m×s`, `Q: s×n` row-orthonormal, `s = min(m, n)`.
pub(crate) fn lq_thin(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (q, r) = qr_thin(&a.transpose());
    (r.transpose(), q.transpose())
}

/// Number of singular values above `rel_tol` times the largest one.
pub(crate) fn rank_from_singulars(s: &DVector<f64>, rel_tol: f64) -> usize {
    let smax = if s.is_empty() { 0.0 } else { s[0] };
    if smax <= 0.0 {
        return 0;
    }
    s.iter().take_while(|&&v| v > rel_tol * smax).count()
}

/// `M · A⁻¹` computed through an LU solve of `Aᵀ Xᵀ = Mᵀ` (never forms the inverse).
pub(crate) fn right_solve(m: &DMatrix<f64>, a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let lu = a.transpose().lu();
    lu.solve(&m.transpose()).map(|x| x.transpose())
}

/// Pivot rows of a column-by-column Gaussian elimination with partial
/// pivoting: a well-conditioned starting row set for maxvol and, at the same
/// time, a numerical-rank probe. Returns `Err(detected_rank)` when a pivot
/// falls below `rel_tol` times the largest absolute entry of `m`.
pub(crate) fn pivot_rows(m: &DMatrix<f64>, rel_tol: f64) -> Result<Vec<usize>, usize> {
    let (n, r) = m.shape();
    let scale = m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(0);
    }
    let tol = rel_tol * scale;
    let mut a = m.clone();
    let mut used = alloc::vec![false; n];
    let mut rows = Vec::with_capacity(r);
    for col in 0..r {
        let mut pick = usize::MAX;
        let mut best = 0.0f64;
        for row in 0..n {
            let v = a[(row, col)].abs();
            if !used[row] && v > best {
                best = v;
                pick = row;
            }
        }
        if pick == usize::MAX || best <= tol {
            return Err(col);
        }
        used[pick] = true;
        rows.push(pick);
        for row in 0..n {
            if !used[row] {
                let factor = a[(row, col)] / a[(pick, col)];
                for c in col..r {
                    a[(row, c)] -= factor * a[(pick, c)];
                }
            }
        }
    }
    Ok(rows)
}

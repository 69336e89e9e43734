use super::RealMatrix;
use crate::error::{NsfdError, Result};

/// Pivots smaller than this times `‖A‖∞` are treated as exact zeros.
pub const PIVOT_RELATIVE_TOLERANCE: f64 = 1e-14;

/// Solves `A x = rhs` by Gaussian elimination with partial pivoting.
pub fn lu_solve(a: &RealMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(NsfdError::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    NsfdError::check_dim(n, rhs.len())?;

    let threshold = PIVOT_RELATIVE_TOLERANCE * a.norm_inf();
    let mut lu = a.clone();
    let mut x = rhs.to_vec();

    for k in 0..n {
        let (p, pivot_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold(
                (k, -1.0),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
        if pivot_abs.is_nan() || pivot_abs <= threshold || pivot_abs == 0.0 {
            return Err(NsfdError::Singular {
                column: k,
                pivot: pivot_abs.max(0.0),
                threshold,
            });
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            x.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[(i, k)] = 0.0;
            for j in (k + 1)..n {
                lu[(i, j)] -= factor * lu[(k, j)];
            }
            x[i] -= factor * x[k];
        }
    }

    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s -= lu[(k, j)] * x[j];
        }
        x[k] = s / lu[(k, k)];
    }
    Ok(x)
}

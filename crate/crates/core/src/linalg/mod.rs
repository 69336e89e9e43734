//! Small dense linear algebra.
//!
//! Everything here is sized for compartmental models (n up to a few dozen):
//! unblocked O(n³) algorithms over a row-major [`RealMatrix`].

mod complex;
mod eigen;
mod lu;

use std::ops::{Index, IndexMut};

use crate::error::{NsfdError, Result};

pub use complex::ComplexScalar;
pub use eigen::{eigenvalues, MAX_EIGEN_DIM};
pub use lu::{lu_solve, PIVOT_RELATIVE_TOLERANCE};

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            NsfdError::check_dim(ncols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        NsfdError::check_dim(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        NsfdError::check_dim(self.cols, other.rows)?;
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &RealMatrix) -> Result<RealMatrix> {
        NsfdError::check_dim(self.rows, other.rows)?;
        NsfdError::check_dim(self.cols, other.cols)?;
        Ok(RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceMode {
    Row,
    Column,
}

/// First row/column index violating diagonal dominance, if any.
///
/// Strict mode requires `|a_jj| > Σ_{i≠j} |a_ij|`; non-strict allows equality.
pub fn dominance_violation(a: &RealMatrix, mode: DominanceMode, strict: bool) -> Option<usize> {
    assert!(a.is_square(), "dominance check needs a square matrix");
    let n = a.rows();
    (0..n).find(|&j| {
        let off: f64 = (0..n)
            .filter(|&i| i != j)
            .map(|i| match mode {
                DominanceMode::Column => a[(i, j)].abs(),
                DominanceMode::Row => a[(j, i)].abs(),
            })
            .sum();
        let diag = a[(j, j)].abs();
        if strict {
            diag <= off
        } else {
            diag < off
        }
    })
}

pub fn is_diagonally_dominant(a: &RealMatrix, mode: DominanceMode, strict: bool) -> bool {
    dominance_violation(a, mode, strict).is_none()
}

/// Square matrix with nonnegative off-diagonal entries.
pub fn is_metzler(a: &RealMatrix) -> bool {
    assert!(a.is_square(), "Metzler check needs a square matrix");
    let n = a.rows();
    (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)] >= 0.0))
}

/// Default central-difference increment for [`fd_jacobian`].
pub fn default_fd_eps(x: &[f64]) -> f64 {
    1e-6 * (1.0 + norm_inf(x))
}

/// Central-difference Jacobian of `map` at `x`.
///
/// Column j is `(map(x + eps e_j) - map(x - eps e_j)) / (2 eps)`.
pub fn fd_jacobian<F>(map: F, x: &[f64], eps: f64) -> Result<RealMatrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(NsfdError::InvalidParameter(format!(
            "finite-difference increment must be positive, got {eps}"
        )));
    }
    let n = x.len();
    let mut jac: Option<RealMatrix> = None;
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + eps;
        let plus = map(&probe)?;
        probe[j] = x[j] - eps;
        let minus = map(&probe)?;
        probe[j] = x[j];
        let m = jac.get_or_insert_with(|| RealMatrix::zeros(plus.len(), n));
        NsfdError::check_dim(m.rows(), plus.len())?;
        NsfdError::check_dim(m.rows(), minus.len())?;
        for i in 0..plus.len() {
            m[(i, j)] = (plus[i] - minus[i]) / (2.0 * eps);
        }
    }
    Ok(jac.unwrap_or_else(|| RealMatrix::zeros(0, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        let i3 = RealMatrix::identity(3);
        assert!(is_diagonally_dominant(&i3, DominanceMode::Column, true));
        assert!(is_diagonally_dominant(&i3, DominanceMode::Row, true));

        let tie = RealMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(!is_diagonally_dominant(&tie, DominanceMode::Column, true));
        assert_eq!(
            dominance_violation(&tie, DominanceMode::Column, true),
            Some(1)
        );
        assert!(is_diagonally_dominant(&tie, DominanceMode::Column, false));

        let sym = RealMatrix::from_rows(&[[3.0, 1.0], [1.0, 3.0]]).unwrap();
        assert!(is_diagonally_dominant(&sym, DominanceMode::Column, true));
        assert!(is_diagonally_dominant(&sym, DominanceMode::Row, true));
    }

    #[test]
    fn row_and_column_modes_differ() {
        let a = RealMatrix::from_rows(&[[2.0, 1.5], [0.0, 2.0]]).unwrap();
        assert!(is_diagonally_dominant(&a, DominanceMode::Column, true));
        assert!(is_diagonally_dominant(&a, DominanceMode::Row, true));
        let b = RealMatrix::from_rows(&[[1.0, 0.0], [1.5, 1.0]]).unwrap();
        assert!(!is_diagonally_dominant(&b, DominanceMode::Column, true));
        assert!(!is_diagonally_dominant(&b, DominanceMode::Row, true));
        let c = RealMatrix::from_rows(&[[1.0, 0.5], [0.6, 2.0]]).unwrap();
        assert!(is_diagonally_dominant(&c, DominanceMode::Row, true));
        assert!(is_diagonally_dominant(&c, DominanceMode::Column, true));
        let d = RealMatrix::from_rows(&[[1.0, 0.9], [0.9, 0.5]]).unwrap();
        assert!(!is_diagonally_dominant(&d, DominanceMode::Row, true));
    }

    #[test]
    fn metzler_examples() {
        let a = RealMatrix::from_rows(&[[-1.0, -0.1], [0.0, -1.0]]).unwrap();
        assert!(!is_metzler(&a));
        assert!(is_metzler(&RealMatrix::from_diagonal(&[-3.0, 2.0, -7.0])));
        let b = RealMatrix::from_rows(&[[-2.0, 0.5], [1.0, -4.0]]).unwrap();
        assert!(is_metzler(&b));
    }

    #[test]
    fn fd_jacobian_identity_and_linear() {
        let x = [0.3, -1.2, 2.5];
        let id = fd_jacobian(|v| Ok(v.to_vec()), &x, default_fd_eps(&x)).unwrap();
        assert!(id.max_abs_diff(&RealMatrix::identity(3)) <= 1e-10);

        let l =
            RealMatrix::from_rows(&[[1.0, 2.0, 0.0], [-3.0, 0.5, 4.0], [0.0, 0.0, -1.0]]).unwrap();
        let jac = fd_jacobian(|v| l.mul_vec(v), &x, default_fd_eps(&x)).unwrap();
        assert!(jac.max_abs_diff(&l) <= 1e-9);
    }

    #[test]
    fn fd_jacobian_of_logistic_at_half() {
        let x = [0.5];
        let jac = fd_jacobian(|v| Ok(vec![v[0] - v[0] * v[0]]), &x, default_fd_eps(&x)).unwrap();
        assert!(jac[(0, 0)].abs() <= 1e-8);
    }

    #[test]
    fn fd_jacobian_rejects_bad_eps() {
        assert!(fd_jacobian(|v| Ok(v.to_vec()), &[1.0], 0.0).is_err());
    }

    #[test]
    fn matrix_products() {
        let a = RealMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = RealMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab.to_rows(), vec![vec![2.0, 1.0], vec![4.0, 3.0]]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(a.norm_inf(), 7.0);
        assert!(a.mul_vec(&[1.0]).is_err());
        assert!(RealMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }
}

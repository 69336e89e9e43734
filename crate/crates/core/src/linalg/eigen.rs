//! Eigenvalues of a general real matrix.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis double-shift QR iteration with 1×1 / 2×2 deflation. Eigenvalues
//! only; complex pairs come out as conjugates.

#![allow(clippy::needless_range_loop)]

use super::{ComplexScalar, RealMatrix};
use crate::error::{NsfdError, Result};

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 32;

const SWEEPS_PER_DIM: usize = 100;

/// All eigenvalues of a square matrix, in no particular order.
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<ComplexScalar>> {
    if !a.is_square() {
        return Err(NsfdError::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    if n > MAX_EIGEN_DIM {
        return Err(NsfdError::InvalidParameter(format!(
            "eigenvalue solver supports n <= {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    if !a.is_finite() {
        return Err(NsfdError::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h: Vec<Vec<f64>> = a.to_rows();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

// Diagonal similarity with powers of two so rows and columns have comparable norms.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = ((k + 1)..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = ((k + 1)..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;

        // A <- H A, H = I - beta v vᵀ acting on rows k+1..n
        for j in k..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * a[k + 1 + t][j])
                .sum();
            let s = beta * s;
            for (t, vt) in v.iter().enumerate() {
                a[k + 1 + t][j] -= s * vt;
            }
        }
        // A <- A H acting on columns k+1..n
        for row in a.iter_mut() {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * row[k + 1 + t])
                .sum();
            let s = beta * s;
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= s * vt;
            }
        }
        a[k + 1][k] = alpha;
        for row in a.iter_mut().skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
fn hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<ComplexScalar>> {
    let n = a.len();
    let max_sweeps = SWEEPS_PER_DIM * n;
    let eps = f64::EPSILON;
    let mut wr = vec![ComplexScalar::ZERO; n];

    let mut anorm = 0.0;
    for (i, row) in a.iter().enumerate() {
        for v in row.iter().skip(i.saturating_sub(1)) {
            anorm += v.abs();
        }
    }

    let mut total_sweeps = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            // look for a negligible subdiagonal element
            let mut l = nu;
            while l > 0 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = ComplexScalar::real(x + t);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = ComplexScalar::real(x + z);
                    wr[nu] = if z != 0.0 {
                        ComplexScalar::real(x - w / z)
                    } else {
                        ComplexScalar::real(x + z)
                    };
                } else {
                    wr[nu] = ComplexScalar::new(x + p, -z);
                    wr[nu - 1] = wr[nu].conj();
                }
                nn -= 2;
                break;
            }

            if total_sweeps >= max_sweeps {
                return Err(NsfdError::EigenNoConvergence {
                    sweeps: total_sweeps,
                });
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;

            // find two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }

            // double QR step on rows l..nn and columns m..nn
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[k][k - 1] = -a[k][k - 1];
                    }
                } else {
                    a[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nu {
                    let mut pp = a[k][j] + q * a[k + 1][j];
                    if k + 1 != nu {
                        pp += r * a[k + 2][j];
                        a[k + 2][j] -= pp * z;
                    }
                    a[k + 1][j] -= pp * y;
                    a[k][j] -= pp * x;
                }
                let mmin = if nu < k + 3 { nu } else { k + 3 };
                for row in a.iter_mut().take(mmin + 1).skip(l) {
                    let mut pp = x * row[k] + y * row[k + 1];
                    if k + 1 != nu {
                        pp += z * row[k + 2];
                        row[k + 2] -= pp * r;
                    }
                    row[k + 1] -= pp * q;
                    row[k] -= pp;
                }
            }
        }
    }
    Ok(wr)
}

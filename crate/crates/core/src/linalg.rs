//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::error::{shape, Error, Result};

/// Eigen-decomposition of a symmetric matrix. `vectors` is row-major with
/// eigenvector `j` stored in column `j`; values are sorted ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }
}

const MAX_SWEEPS: usize = 100;

/// Checks `|M_ij - M_ji| <= tol · max(1, max|M|)`.
pub fn check_symmetric(m: &[f64], n: usize, tol: f64) -> Result<()> {
    if m.len() != n * n {
        return Err(shape(format!("matrix buffer of length {} is not {n}x{n}", m.len())));
    }
    let scale = m.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    for i in 0..n {
        for j in i + 1..n {
            let diff = (m[i * n + j] - m[j * n + i]).abs();
            if diff > tol * scale {
                return Err(Error::NotSymmetric { i: i + 1, j: j + 1, diff });
            }
        }
    }
    Ok(())
}

/// Diagonalizes a symmetric matrix by cyclic Jacobi rotations until the
/// off-diagonal Frobenius norm falls below `1e-12 · ‖M‖_F`. Only the upper
/// triangle is read.
pub fn jacobi_eigen(m: &[f64], n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    if m.len() != n * n {
        return Err(shape(format!("matrix buffer of length {} is not {n}x{n}", m.len())));
    }
    let mut a = m.to_vec();
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    } else {
        Vec::new()
    };

    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-12 * total;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, n, p, q, c, s);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = if want_vectors {
        let mut out = vec![0.0; n * n];
        for (col, &k) in order.iter().enumerate() {
            for i in 0..n {
                out[i * n + col] = v[i * n + k];
            }
        }
        out
    } else {
        Vec::new()
    };
    Ok(SymmetricEigen { n, values, vectors, sweeps })
}

/// Applies the rotation `Jᵀ A J` in the (p, q) plane, zeroing `A[p,q]`.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}

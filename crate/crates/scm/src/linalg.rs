//! Small dense linear algebra: just enough for desk-scale problems
//! (d ≤ 64, KKT systems ≤ 24 unknowns). Row-major storage, partial-pivot
//! LU, cyclic Jacobi eigenvalues for symmetric matrices.

// index loops keep the elimination/substitution kernels close to their
// textbook form
#![allow(clippy::needless_range_loop)]

use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from nested rows. All rows must have equal length and
    /// finite entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidOperator("matrix with zero rows".into()));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(Error::InvalidOperator("matrix with zero columns".into()));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::InvalidOperator(format!(
                    "ragged matrix: row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            if !all_finite(row) {
                return Err(Error::NonFinite(format!("matrix row {i}")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

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
            m.data[i * n + i] = 1.0;
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

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            out[i] = dot(&self.data[i * self.cols..(i + 1) * self.cols], x);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    /// `(A + Aᵀ) / 2`; requires a square matrix.
    pub fn symmetric_part(&self) -> Matrix {
        debug_assert!(self.is_square());
        let n = self.rows;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s.set(i, j, 0.5 * (self.at(i, j) + self.at(j, i)));
            }
        }
        s
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    /// Nested-row representation, used by the JSON serializers.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }
}

/// LU factorization with partial pivoting, stored packed.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
}

/// Factors a square matrix; returns `None` when a pivot falls below
/// `1e-12 * max|a_ij|` (treated as singular).
pub fn lu_factor(a: &Matrix) -> Option<LuFactors> {
    debug_assert!(a.is_square());
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = lu.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale.max(1e-300);
    for k in 0..n {
        let mut p = k;
        let mut best = lu.at(k, k).abs();
        for i in (k + 1)..n {
            let v = lu.at(i, k).abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= tol {
            return None;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu.at(k, j);
                lu.set(k, j, lu.at(p, j));
                lu.set(p, j, tmp);
            }
            perm.swap(k, p);
        }
        let pivot = lu.at(k, k);
        for i in (k + 1)..n {
            let factor = lu.at(i, k) / pivot;
            lu.set(i, k, factor);
            for j in (k + 1)..n {
                let v = lu.at(i, j) - factor * lu.at(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Some(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        debug_assert_eq!(b.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = b[self.perm[i]];
            for j in 0..i {
                sum -= self.lu.at(i, j) * y[j];
            }
            y[i] = sum;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for j in (i + 1)..n {
                sum -= self.lu.at(i, j) * x[j];
            }
            x[i] = sum / self.lu.at(i, i);
        }
        x
    }
}

/// One-shot solve of `a x = b`; `None` when singular.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    lu_factor(a).map(|f| f.solve(b))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. The input is assumed symmetric; only the given entries are
/// read, no symmetrization is applied.
pub fn symmetric_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    if !s.is_square() {
        return Err(Error::SingularSystem(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    let n = s.rows;
    let mut a = s.clone();
    let frob: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-15 * frob.max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.at(i, j).powi(2);
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a.at(p, p);
                let aqq = a.at(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s_ = t * c;
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, c * akp - s_ * akq);
                    a.set(k, q, s_ * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, c * apk - s_ * aqk);
                    a.set(q, k, s_ * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.at(i, i)).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_symmetric_eigenvalue(a: &Matrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(&a.symmetric_part())?;
    Ok(eig[0])
}

/// Largest singular value of `a`, via the eigenvalues of `AᵀA`.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    let gram = a.transpose().mul(a);
    let eig = symmetric_eigenvalues(&gram)?;
    Ok(eig[eig.len() - 1].max(0.0).sqrt())
}

// ---- slice helpers -------------------------------------------------------

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    norm(&sub(x, y))
}

/// `x + s * y`.
pub fn add_scaled(x: &[f64], s: f64, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a + s * b).collect()
}

/// `a * x + b * y`.
pub fn linear_comb(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

pub fn scale(s: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| s * v).collect()
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Errors unless every entry of `x` is finite.
pub fn ensure_finite(x: &[f64], context: &str) -> Result<()> {
    if all_finite(x) {
        Ok(())
    } else {
        Err(Error::NonFinite(context.to_string()))
    }
}

/// Errors unless `x` has length `expected`.
pub fn ensure_dim(x: &[f64], expected: usize) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn lu_solves_known_system() {
        let a = mat(&[&[4.0, 1.0], &[1.0, 3.0]]);
        let x = lu_solve(&a, &[1.0, 2.0]).unwrap();
        // exact solution (1/11, 7/11)
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(lu_solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn lu_with_pivoting() {
        // zero leading pivot forces a row swap
        let a = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = lu_solve(&a, &[3.0, 7.0]).unwrap();
        assert_eq!(x, vec![7.0, 3.0]);
    }

    #[test]
    fn jacobi_eigenvalues_diag() {
        let a = mat(&[&[3.0, 0.0], &[0.0, -1.0]]);
        let eig = symmetric_eigenvalues(&a).unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-14);
        assert!((eig[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_eigenvalues_2x2() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let a = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eig = symmetric_eigenvalues(&a).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_larger_matrix() {
        // tridiagonal(-1, 2, -1) of size n has eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 12;
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let eig = symmetric_eigenvalues(&a).unwrap();
        for (k, ev) in eig.iter().enumerate() {
            let exact =
                2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((ev - exact).abs() < 1e-12, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn spectral_norm_matches_known() {
        let a = mat(&[&[1.0, 0.0], &[0.0, -2.5]]);
        assert!((spectral_norm(&a).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn min_symmetric_eigenvalue_of_rotationish() {
        // A = [[1, -1], [1, 1]] has symmetric part I
        let a = mat(&[&[1.0, -1.0], &[1.0, 1.0]]);
        assert!((min_symmetric_eigenvalue(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_ragged_and_nonfinite() {
        assert!(Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(Matrix::from_rows(vec![vec![f64::NAN]]).is_err());
    }
}

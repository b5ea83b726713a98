//! Symmetric-definite generalized eigenproblem `A v = λ B v`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    /// Eigenvalues in descending order.
    pub values: DVector<f64>,
    /// Matching eigenvectors as columns, normalised so that `vᵀ B v = 1`.
    pub vectors: DMatrix<f64>,
}

/// Solve `A v = λ B v` for symmetric `A` and symmetric positive definite `B`
/// through the Cholesky reduction `L⁻¹ A L⁻ᵀ`.
pub fn symmetric_definite_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    let n = a.nrows();
    if a.shape() != (n, n) || b.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "generalized eigenproblem needs square matrices of equal size, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Linalg("right-hand matrix is not positive definite".into()))?;
    let l = chol.l();
    let y = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Linalg("singular Cholesky factor".into()))?;
    let mut c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Linalg("singular Cholesky factor".into()))?;
    symmetrize(&mut c);
    let (values, sorted) = symmetric_eigen(c);
    let vectors = l
        .transpose()
        .solve_upper_triangular(&sorted)
        .ok_or_else(|| Error::Linalg("singular Cholesky factor".into()))?;
    if values.iter().chain(vectors.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Linalg("non-finite generalized eigenpairs".into()));
    }
    Ok(GeneralizedEigen { values, vectors })
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenpairs of a symmetric matrix by cyclic Jacobi rotations, eigenvalues in
/// descending order with matching orthonormal eigenvector columns.
pub fn symmetric_eigen(mut a: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = f64::EPSILON * a.norm();
    let (m, w) = (a.as_mut_slice(), v.as_mut_slice());
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for q in 1..n {
            off += m[q * n..q * n + q].iter().map(|x| x * x).sum::<f64>();
        }
        if off.sqrt() <= tol {
            break;
        }
        for q in 1..n {
            for p in 0..q {
                let apq = m[p + q * n];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q + q * n] - m[p + p * n]) / (2.0 * apq);
                // 1/(|θ| + √(θ²+1)) without overflowing θ²
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(m, n, p, q, c, s);
                for k in 0..n {
                    let (x, y) = (m[p + k * n], m[q + k * n]);
                    m[p + k * n] = c * x - s * y;
                    m[q + k * n] = s * x + c * y;
                }
                rotate_columns(w, n, p, q, c, s);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let vectors = DMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    (values, vectors)
}

/// Givens rotation of columns `p < q` of a column-major slice with `rows` rows.
fn rotate_columns(m: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = m.split_at_mut(q * rows);
    for (x, y) in left[p * rows..(p + 1) * rows].iter_mut().zip(&mut right[..rows]) {
        let (u, z) = (*x, *y);
        *x = c * u - s * z;
        *y = s * u + c * z;
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Flip each column so its largest-magnitude entry is positive (first one on ties).
pub(crate) fn orient_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col.len() > 0 && col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

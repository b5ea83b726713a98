//! Two-class linear discriminant with shrinkage toward a scaled identity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Lda {
    pub weights: DVector<f64>,
    pub bias: f64,
}

/// `x` is samples × features, `y` holds 0/1 labels with both present.
pub fn fit_lda(x: &DMatrix<f64>, y: &[u8], shrinkage: f64) -> Result<Lda> {
    let (n, d) = x.shape();
    let idx = |c: u8| -> Vec<usize> { (0..n).filter(|&i| y[i] == c).collect() };
    let (i0, i1) = (idx(0), idx(1));
    let mean = |ids: &[usize]| {
        let mut m = DVector::zeros(d);
        for &i in ids {
            m += x.row(i).transpose();
        }
        m / ids.len() as f64
    };
    let (m0, m1) = (mean(&i0), mean(&i1));
    let mut pooled = DMatrix::zeros(d, d);
    for (ids, m) in [(&i0, &m0), (&i1, &m1)] {
        for &i in ids.iter() {
            let r = x.row(i).transpose() - m;
            pooled.ger(1.0, &r, &r, 1.0);
        }
    }
    let dof = (n as f64 - 2.0).max(1.0);
    pooled /= dof;
    let scale = pooled.trace() / d as f64;
    let mut sigma = pooled * (1.0 - shrinkage);
    let ridge = if scale > 0.0 { shrinkage * scale } else { shrinkage.max(1e-12) };
    for k in 0..d {
        sigma[(k, k)] += ridge;
    }
    let chol = sigma
        .cholesky()
        .ok_or_else(|| Error::Classifier("pooled covariance is not positive definite".into()))?;
    let weights = chol.solve(&(&m1 - &m0));
    let prior = (i1.len() as f64 / i0.len() as f64).ln();
    let bias = -0.5 * weights.dot(&(&m1 + &m0)) + prior;
    Ok(Lda { weights, bias })
}

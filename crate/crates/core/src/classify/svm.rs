//! Linear soft-margin SVM (hinge loss) solved by dual coordinate descent.
//! The bias is learned as the weight of an appended constant feature.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSolution {
    pub weights: DVector<f64>,
    pub bias: f64,
    pub alpha: Vec<f64>,
    pub epochs: usize,
    /// Spread of the projected gradient at exit; zero at an exact optimum.
    pub violation: f64,
}

/// `x` is samples × features and `y` holds ±1 labels.
pub fn svm_dual_solve(
    x: &DMatrix<f64>,
    y: &[f64],
    c: f64,
    tol: f64,
    max_epochs: usize,
    seed: u64,
) -> SvmSolution {
    let (n, d) = x.shape();
    let mut w = DVector::zeros(d);
    let mut b = 0.0;
    let mut alpha = vec![0.0; n];
    let diag: Vec<f64> = (0..n).map(|i| x.row(i).norm_squared() + 1.0).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violation = f64::INFINITY;
    let mut epochs = 0;
    while epochs < max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let xi = x.row(i);
            let g = y[i] * (xi.dot(&w.transpose()) + b) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            hi = hi.max(pg);
            lo = lo.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                w.axpy(step, &xi.transpose(), 1.0);
                b += step;
            }
        }
        violation = hi - lo;
        if violation < tol {
            break;
        }
    }
    SvmSolution {
        weights: w,
        bias: b,
        alpha,
        epochs,
        violation,
    }
}

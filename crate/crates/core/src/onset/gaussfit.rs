//! Damped least-squares fit of `a * exp(-((x - b) / c)^2) + d`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GaussianParams {
    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.b) / self.c;
        self.a * (-u * u).exp() + self.d
    }

    fn to_vec(self) -> Vector4<f64> {
        Vector4::new(self.a, self.b, self.c, self.d)
    }

    fn from_vec(v: &Vector4<f64>) -> Self {
        GaussianParams {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOutcome {
    pub params: GaussianParams,
    pub converged: bool,
    pub iterations: usize,
    pub cost: f64,
}

fn cost(p: &GaussianParams, y: &[f64]) -> f64 {
    y.iter()
        .enumerate()
        .map(|(i, v)| (p.eval(i as f64) - v).powi(2))
        .sum::<f64>()
        * 0.5
}

/// Levenberg–Marquardt with Marquardt diagonal scaling.
///
/// Initial guess: `a = max - min`, `b = argmax`, `c = len / 10`, `d = min`.
/// Converges when an accepted step changes the cost by less than `tol`
/// relative, when the cost underflows, or when damping can no longer find a
/// descent step.
pub fn fit_gaussian(y: &[f64], max_iter: usize, tol: f64) -> FitOutcome {
    let n = y.len();
    let (mut lo, mut hi, mut arg) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for (i, &v) in y.iter().enumerate() {
        lo = lo.min(v);
        if v > hi {
            hi = v;
            arg = i;
        }
    }
    let mut p = GaussianParams {
        a: hi - lo,
        b: arg as f64,
        c: (n as f64 / 10.0).max(1.0),
        d: lo,
    };
    let mut f = cost(&p, y);
    let mut lambda = 1e-3;
    let floor = 1e-30 * n as f64;

    for iter in 1..=max_iter {
        if f <= floor {
            return FitOutcome { params: p, converged: true, iterations: iter - 1, cost: f };
        }
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (i, &v) in y.iter().enumerate() {
            let x = i as f64;
            let u = (x - p.b) / p.c;
            let g = (-u * u).exp();
            let r = p.a * g + p.d - v;
            let j = Vector4::new(
                g,
                p.a * g * 2.0 * u / p.c,
                p.a * g * 2.0 * u * u / p.c,
                1.0,
            );
            jtj += j * j.transpose();
            jtr += j * r;
        }
        loop {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let step = damped.lu().solve(&(-jtr));
            let accepted = step.and_then(|s| {
                let cand = GaussianParams::from_vec(&(p.to_vec() + s));
                let fc = cost(&cand, y);
                (fc.is_finite() && fc < f && cand.c != 0.0).then_some((cand, fc))
            });
            match accepted {
                Some((cand, fc)) => {
                    let rel = (f - fc) / f.max(f64::MIN_POSITIVE);
                    p = cand;
                    f = fc;
                    lambda = (lambda / 10.0).max(1e-12);
                    if rel < tol {
                        return FitOutcome { params: p, converged: true, iterations: iter, cost: f };
                    }
                    break;
                }
                None => {
                    lambda *= 10.0;
                    if lambda > 1e16 {
                        return FitOutcome { params: p, converged: true, iterations: iter, cost: f };
                    }
                }
            }
        }
    }
    FitOutcome { params: p, converged: false, iterations: max_iter, cost: f }
}

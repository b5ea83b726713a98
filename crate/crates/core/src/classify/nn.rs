//! One hidden tanh layer with a logistic output, trained by full-batch
//! gradient descent on the mean binary cross-entropy.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    /// hidden × inputs
    pub w1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub w2: DVector<f64>,
    pub b2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrad {
    pub w1: DMatrix<f64>,
    pub b1: DVector<f64>,
    pub w2: DVector<f64>,
    pub b2: f64,
}

impl Mlp {
    /// Uniform Glorot init for the hidden layer; the output layer starts at zero.
    pub fn init(inputs: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limit = (6.0 / (inputs + hidden) as f64).sqrt();
        Mlp {
            w1: DMatrix::from_fn(hidden, inputs, |_, _| rng.gen_range(-limit..limit)),
            b1: DVector::zeros(hidden),
            w2: DVector::zeros(hidden),
            b2: 0.0,
        }
    }

    fn hidden(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut h = x * self.w1.transpose();
        for mut row in h.row_iter_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = (*v + self.b1[k]).tanh();
            }
        }
        h
    }

    /// Output logits, one per sample.
    pub fn logits(&self, x: &DMatrix<f64>) -> DVector<f64> {
        (self.hidden(x) * &self.w2).add_scalar(self.b2)
    }

    pub fn loss(&self, x: &DMatrix<f64>, y: &[f64]) -> f64 {
        let z = self.logits(x);
        z.iter()
            .zip(y)
            .map(|(&z, &t)| softplus(z) - t * z)
            .sum::<f64>()
            / y.len() as f64
    }

    pub fn gradient(&self, x: &DMatrix<f64>, y: &[f64]) -> MlpGrad {
        let n = y.len() as f64;
        let h = self.hidden(x);
        let z = (&h * &self.w2).add_scalar(self.b2);
        let dz = DVector::from_iterator(y.len(), z.iter().zip(y).map(|(&z, &t)| (sigmoid(z) - t) / n));
        let w2 = h.transpose() * &dz;
        let b2 = dz.sum();
        let mut da = &dz * self.w2.transpose();
        da.zip_apply(&h, |g, hv| *g *= 1.0 - hv * hv);
        let w1 = da.transpose() * x;
        let b1 = DVector::from_iterator(da.ncols(), da.column_iter().map(|c| c.sum()));
        MlpGrad { w1, b1, w2, b2 }
    }

    pub fn step(&mut self, g: &MlpGrad, lr: f64) {
        self.w1 -= &g.w1 * lr;
        self.b1 -= &g.b1 * lr;
        self.w2 -= &g.w2 * lr;
        self.b2 -= g.b2 * lr;
    }
}

pub fn train_mlp(x: &DMatrix<f64>, y: &[f64], hidden: usize, epochs: usize, lr: f64, seed: u64) -> Mlp {
    let mut net = Mlp::init(x.ncols(), hidden, seed);
    for _ in 0..epochs {
        let g = net.gradient(x, y);
        net.step(&g, lr);
    }
    net
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

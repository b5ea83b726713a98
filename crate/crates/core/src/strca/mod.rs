//! Task-related component analysis (TRCA) spatial filters and the six
//! correlation features computed against the class templates.

mod cca;
mod geneig;
mod persist;

pub use cca::{cca, cca_whitened, cross_gram, projected_correlation, CcaFit, Moments, Whitener, WHITEN_CUTOFF};
pub use geneig::{symmetric_definite_eigen, symmetric_eigen, GeneralizedEigen};
pub use persist::{load_model, save_model};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::{ClassLabel, CoefficientKind, EpochSet, FeatureMatrix};
use crate::error::{Error, Result};
use geneig::{orient_columns, symmetrize};

/// Eigenvectors kept per class.
pub const DEFAULT_COMPONENTS: usize = 3;

/// Relative ridge added to the total covariance before the generalized solve.
pub const RIDGE: f64 = 1e-10;

/// Inter-trial covariance sum `S` and covariance of the trial sum `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrcaMatrices {
    pub s: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

pub fn trca_matrices(x: &EpochSet) -> Result<TrcaMatrices> {
    let trials: Vec<&DMatrix<f64>> = x.trials().iter().collect();
    trca_matrices_of(&trials)
}

/// `Q = Cov(Σ_j X_j)` and `S = Q − Σ_j Cov(X_j)`, each trial centred per channel.
pub fn trca_matrices_of(trials: &[&DMatrix<f64>]) -> Result<TrcaMatrices> {
    if trials.len() < 2 {
        return Err(Error::Dimension(format!(
            "TRCA needs at least 2 trials, got {}",
            trials.len()
        )));
    }
    let (nc, ns) = trials[0].shape();
    if ns < 2 {
        return Err(Error::Dimension("TRCA needs at least 2 samples".into()));
    }
    let mut total = DMatrix::zeros(nc, ns);
    let mut own = DMatrix::zeros(nc, nc);
    for t in trials {
        if t.shape() != (nc, ns) {
            return Err(Error::Dimension(format!(
                "trial shape {:?} differs from {:?}",
                t.shape(),
                (nc, ns)
            )));
        }
        let c = centre_rows(t);
        own += cross_gram(&c, &c);
        total += c;
    }
    let denom = ns as f64 - 1.0;
    let mut q = cross_gram(&total, &total) / denom;
    symmetrize(&mut q);
    let mut s = &q - own / denom;
    symmetrize(&mut s);
    Ok(TrcaMatrices { s, q })
}

fn centre_rows(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        let m = row.mean();
        row.add_scalar_mut(-m);
    }
    c
}

/// Top `n_vec` TRCA filters of one class, scaled to unit `Q`-norm.
pub fn class_filters(trials: &[&DMatrix<f64>], n_vec: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let m = trca_matrices_of(trials)?;
    let nc = m.q.nrows();
    if n_vec == 0 || n_vec > nc {
        return Err(Error::InvalidParameter(format!(
            "cannot keep {n_vec} components from {nc} channels"
        )));
    }
    let eps = RIDGE * m.q.trace() / nc as f64;
    let q_reg = &m.q + DMatrix::identity(nc, nc) * eps;
    let eig = symmetric_definite_eigen(&m.s, &q_reg)?;
    let mut w = eig.vectors.columns(0, n_vec).into_owned();
    for mut col in w.column_iter_mut() {
        let norm = (col.transpose() * &m.q * &col)[(0, 0)];
        if norm > 0.0 && norm.is_finite() {
            col /= norm.sqrt();
        }
    }
    orient_columns(&mut w);
    Ok((w, eig.values.iter().take(n_vec).copied().collect()))
}

/// Correlation features of one trial, ordered as [`CoefficientKind::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcpFeatures {
    pub rho: [f64; 6],
}

impl CcpFeatures {
    pub fn get(&self, kind: CoefficientKind) -> f64 {
        self.rho[kind.index()]
    }
}

/// Statistics of one template-side signal used by every trial.
#[derive(Debug, Clone, PartialEq)]
struct Reference {
    signal: DMatrix<f64>,
    moments: Moments,
    whitener: Whitener,
}

impl Reference {
    fn new(signal: DMatrix<f64>) -> Self {
        let moments = Moments::of(&signal);
        let whitener = Whitener::new(&moments.covariance());
        Reference {
            signal,
            moments,
            whitener,
        }
    }
}

/// Trained spatial filters and class templates of one subband.
#[derive(Debug, Clone)]
pub struct StrcaModel {
    filters: DMatrix<f64>,
    templates: [DMatrix<f64>; 2],
    eigenvalues: Vec<f64>,
    n_vec: usize,
    // Wᵀ·template of each class, and Wᵀ·(own − other template)
    projected: [Reference; 2],
    contrast: [Reference; 2],
    // V_other · (V_k − V_other)ᵀ
    contrast_offset: [DMatrix<f64>; 2],
}

impl PartialEq for StrcaModel {
    fn eq(&self, other: &Self) -> bool {
        self.filters == other.filters
            && self.templates == other.templates
            && self.eigenvalues == other.eigenvalues
            && self.n_vec == other.n_vec
    }
}

impl StrcaModel {
    /// Train on movement (class 1) and rest (class 2) trials.
    pub fn fit(movement: &[&DMatrix<f64>], rest: &[&DMatrix<f64>], n_vec: usize) -> Result<Self> {
        let shape = movement
            .first()
            .ok_or_else(|| Error::Dimension("no movement trials".into()))?
            .shape();
        if rest.iter().any(|t| t.shape() != shape) {
            return Err(Error::Dimension(format!(
                "rest trials do not match movement shape {shape:?}"
            )));
        }
        let (w1, e1) = class_filters(movement, n_vec)?;
        let (w2, e2) = class_filters(rest, n_vec)?;
        let mut filters = DMatrix::zeros(shape.0, 2 * n_vec);
        filters.columns_mut(0, n_vec).copy_from(&w1);
        filters.columns_mut(n_vec, n_vec).copy_from(&w2);
        let templates = [mean_trial(movement), mean_trial(rest)];
        Self::from_parts(filters, templates, [e1, e2].concat(), n_vec)
    }

    pub(crate) fn from_parts(
        filters: DMatrix<f64>,
        templates: [DMatrix<f64>; 2],
        eigenvalues: Vec<f64>,
        n_vec: usize,
    ) -> Result<Self> {
        let nc = filters.nrows();
        if filters.ncols() != 2 * n_vec
            || templates.iter().any(|t| t.nrows() != nc || t.shape() != templates[0].shape())
            || templates[0].ncols() < 2
        {
            return Err(Error::Dimension("inconsistent model dimensions".into()));
        }
        if filters.iter().chain(templates[0].iter()).chain(templates[1].iter()).any(|v| !v.is_finite()) {
            return Err(Error::Linalg("non-finite spatial filter or template".into()));
        }
        let wt = filters.transpose();
        let proj = [&wt * &templates[0], &wt * &templates[1]];
        let contrast = [
            Reference::new(&proj[0] - &proj[1]),
            Reference::new(&proj[1] - &proj[0]),
        ];
        let contrast_offset = [
            cross_gram(&proj[1], &contrast[0].signal),
            cross_gram(&proj[0], &contrast[1].signal),
        ];
        let [p0, p1] = proj;
        Ok(StrcaModel {
            contrast_offset,
            filters,
            templates,
            eigenvalues,
            n_vec,
            projected: [Reference::new(p0), Reference::new(p1)],
            contrast,
        })
    }

    /// Spatial filters `[W¹ | W²]`, channels × (2·components).
    pub fn filters(&self) -> &DMatrix<f64> {
        &self.filters
    }

    pub fn templates(&self) -> &[DMatrix<f64>; 2] {
        &self.templates
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n_components(&self) -> usize {
        self.n_vec
    }

    pub fn n_channels(&self) -> usize {
        self.filters.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.templates[0].ncols()
    }

    pub fn extract(&self, x: &DMatrix<f64>) -> Result<CcpFeatures> {
        if x.shape() != self.templates[0].shape() {
            return Err(Error::Dimension(format!(
                "trial shape {:?} does not match model {:?}",
                x.shape(),
                self.templates[0].shape()
            )));
        }
        let p = self.filters.tr_mul(x);
        let pm = Moments::of(&p);
        let p_white = Whitener::new(&pm.covariance());
        let cross = [
            cross_gram(&p, &self.projected[0].signal),
            cross_gram(&p, &self.projected[1].signal),
        ];
        let mut rho = [0.0; 6];
        for k in 0..2 {
            let other = 1 - k;
            let r = &self.projected[k];
            rho[k] = projected_correlation(&pm, &r.moments, &cross[k], None);
            let fit = cca_whitened(&pm, &p_white, &r.moments, &cross[k], &r.whitener);
            rho[2 + k] = projected_correlation(&pm, &r.moments, &cross[k], Some(&fit.b));

            // d = P − V_other, its moments and its cross Gram with the contrast,
            // expanded in terms of the products already at hand
            let o = &self.projected[other];
            let dm = Moments {
                n: pm.n,
                sum: &pm.sum - &o.moments.sum,
                gram: &pm.gram - &cross[other] - cross[other].transpose() + &o.moments.gram,
            };
            let c = &self.contrast[k];
            let dcross = &cross[k] - &cross[other] - &self.contrast_offset[k];
            let fit = cca(&dm, &c.moments, &dcross, &c.whitener);
            rho[4 + k] = projected_correlation(&dm, &c.moments, &dcross, Some(&fit.b));
        }
        Ok(CcpFeatures { rho })
    }

    /// Features of every trial, trials × 6.
    pub fn features(&self, e: &EpochSet) -> Result<DMatrix<f64>> {
        let rows = e
            .trials()
            .par_iter()
            .map(|t| self.extract(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(rows.len(), 6, |i, j| rows[i].rho[j]))
    }
}

fn mean_trial(trials: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(trials[0].nrows(), trials[0].ncols());
    for t in trials {
        m += *t;
    }
    m / trials.len() as f64
}

pub fn trca_filter(movement: &EpochSet, rest: &EpochSet, n_vec: usize) -> Result<StrcaModel> {
    check_classes(movement, rest)?;
    let m: Vec<&DMatrix<f64>> = movement.trials().iter().collect();
    let r: Vec<&DMatrix<f64>> = rest.trials().iter().collect();
    StrcaModel::fit(&m, &r, n_vec)
}

pub fn ccp_extract(model: &StrcaModel, x: &DMatrix<f64>) -> Result<CcpFeatures> {
    model.extract(x)
}

fn check_classes(movement: &EpochSet, rest: &EpochSet) -> Result<()> {
    if movement.label() != ClassLabel::Movement || rest.label() != ClassLabel::Rest {
        return Err(Error::InvalidParameter(
            "expected movement and rest epoch sets in that order".into(),
        ));
    }
    if movement.n_channels() != rest.n_channels() || movement.n_samples() != rest.n_samples() {
        return Err(Error::Dimension(format!(
            "class shapes differ: {}x{} vs {}x{}",
            movement.n_channels(),
            movement.n_samples(),
            rest.n_channels(),
            rest.n_samples()
        )));
    }
    Ok(())
}

/// Features of the training trials and of a held-out set under one model.
#[derive(Debug, Clone)]
pub struct StrcaFeatures {
    pub model: StrcaModel,
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
}

/// Train on `movement` and `rest`, then extract features for the training
/// trials (movement first) and for `test`.
pub fn strca_features(movement: &EpochSet, rest: &EpochSet, test: &EpochSet) -> Result<StrcaFeatures> {
    let model = trca_filter(movement, rest, DEFAULT_COMPONENTS)?;
    let fm = model.features(movement)?;
    let fr = model.features(rest)?;
    let train_values = DMatrix::from_fn(fm.nrows() + fr.nrows(), 6, |i, j| {
        if i < fm.nrows() {
            fm[(i, j)]
        } else {
            fr[(i - fm.nrows(), j)]
        }
    });
    let mut labels = vec![1u8; fm.nrows()];
    labels.extend(std::iter::repeat(0u8).take(fr.nrows()));
    let train = FeatureMatrix::band_major(train_values, labels)?;
    let test_values = model.features(test)?;
    let test = FeatureMatrix::band_major(test_values, vec![test.label().bit(); test.n_trials()])?;
    Ok(StrcaFeatures { model, train, test })
}

//! Band-major feature engine: each band is filtered once, then every fold
//! trains its spatial filters on that band and featurises all trials.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::audit::{Access, AuditLog, Stage};
use super::folds::Folds;
use crate::classify::{train, ClassifierConfig, ClassifierKind};
use crate::data::{ClassLabel, EpochSet};
use crate::error::{Error, Result};
use crate::filterbank::{design_butterworth, filter_trial, BandSpec, PAD_SECONDS};
use crate::strca::{StrcaModel, DEFAULT_COMPONENTS};

/// Movement and rest trials in one list; movement first, label 1.
#[derive(Debug, Clone)]
pub(crate) struct Pooled {
    pub trials: Vec<DMatrix<f64>>,
    pub labels: Vec<u8>,
    pub fs: f64,
}

impl Pooled {
    pub fn new(movement: &EpochSet, rest: &EpochSet) -> Result<Self> {
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
        if (movement.fs() - rest.fs()).abs() > 1e-9 * movement.fs() {
            return Err(Error::Dimension(format!(
                "sampling rates differ: {} vs {} Hz",
                movement.fs(),
                rest.fs()
            )));
        }
        let mut trials = movement.trials().to_vec();
        trials.extend_from_slice(rest.trials());
        let mut labels = vec![1u8; movement.n_trials()];
        labels.extend(vec![0u8; rest.n_trials()]);
        Ok(Pooled {
            trials,
            labels,
            fs: movement.fs(),
        })
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<u8> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }
}

/// Features of one band under each outer fold's model.
#[derive(Debug, Clone)]
pub(crate) struct BandOutcome {
    /// Per outer fold, trials × 6 features of every trial; empty when not requested.
    pub outer: Vec<DMatrix<f64>>,
    /// Per outer fold, mean inner-fold STRCA+LDA accuracy.
    pub inner_score: Option<Vec<f64>>,
}

pub(crate) struct Context<'a> {
    pub data: &'a Pooled,
    pub folds: &'a Folds,
    pub log: &'a AuditLog,
}

impl Context<'_> {
    pub fn access(&self, stage: Stage, outer_fold: usize, inner_fold: Option<usize>, band: Option<usize>) -> Access {
        Access {
            stage,
            outer_fold,
            inner_fold,
            band,
        }
    }

    fn fit_strca(&self, x: &[DMatrix<f64>], idx: &[usize], access: Access) -> Result<StrcaModel> {
        self.log.record_checked(self.folds, access, idx)?;
        let (mut m, mut r) = (Vec::new(), Vec::new());
        for &i in idx {
            if self.data.labels[i] == 1 {
                m.push(&x[i]);
            } else {
                r.push(&x[i]);
            }
        }
        StrcaModel::fit(&m, &r, DEFAULT_COMPONENTS)
    }

    /// Train LDA on rows `train` of `feats` and score it on rows `test`.
    pub fn lda_accuracy(&self, feats: &DMatrix<f64>, train_idx: &[usize], test_idx: &[usize], access: Access) -> Result<f64> {
        self.log.record_checked(self.folds, access, train_idx)?;
        let x = feats.select_rows(train_idx);
        let c = train(ClassifierKind::Lda, &x, &self.data.labels_of(train_idx), &ClassifierConfig::default())?;
        let p = c.predict(&feats.select_rows(test_idx))?;
        Ok(p.accuracy(&self.data.labels_of(test_idx)))
    }

    fn filtered(&self, band: &BandSpec) -> Result<Vec<DMatrix<f64>>> {
        let design = design_butterworth(band, self.data.fs)?;
        let pad = (PAD_SECONDS * self.data.fs).round() as usize;
        Ok(self.data.trials.par_iter().map(|t| filter_trial(&design, t, pad)).collect())
    }

    /// Features of every trial under the model trained on outer fold `f`'s training split.
    fn outer_features(&self, x: &[DMatrix<f64>], position: usize, f: usize) -> Result<DMatrix<f64>> {
        let train_idx = self.folds.train(f);
        let model = self.fit_strca(x, &train_idx, self.access(Stage::SpatialFilter, f, None, Some(position)))?;
        featurise(&model, x, &(0..x.len()).collect::<Vec<_>>())
    }

    /// Mean STRCA+LDA accuracy over the inner folds of outer fold `f`.
    fn inner_score(&self, x: &[DMatrix<f64>], position: usize, f: usize) -> Result<f64> {
        let train_idx = self.folds.train(f);
        let mut acc = 0.0;
        for g in 0..self.folds.n_inner() {
            let it = self.folds.inner_train(f, g);
            let model = self.fit_strca(x, &it, self.access(Stage::SpatialFilter, f, Some(g), Some(position)))?;
            let feats = featurise(&model, x, &train_idx)?;
            acc += self.lda_accuracy(
                &feats,
                &it,
                &self.folds.inner_test(f, g),
                self.access(Stage::Classifier, f, Some(g), Some(position)),
            )?;
        }
        Ok(acc / self.folds.n_inner() as f64)
    }

    /// Filter the data into `band` once and run the requested work of every fold.
    pub fn run_band(&self, band: &BandSpec, position: usize, work: BandWork) -> Result<BandOutcome> {
        let x = self.filtered(band)?;
        let folds = 0..self.folds.n_outer();
        let outer = if work.outer {
            folds.clone().map(|f| self.outer_features(&x, position, f)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let inner_score = if work.inner {
            Some(folds.map(|f| self.inner_score(&x, position, f)).collect::<Result<_>>()?)
        } else {
            None
        };
        Ok(BandOutcome { outer, inner_score })
    }

    pub fn run_bands(&self, bands: &[BandSpec], work: &[BandWork]) -> Result<Vec<BandOutcome>> {
        bands
            .par_iter()
            .zip(work.par_iter())
            .enumerate()
            .map(|(p, (b, &w))| self.run_band(b, p, w))
            .collect()
    }

    /// Outer-fold features of one band for the listed folds only.
    pub fn fold_features(&self, band: &BandSpec, position: usize, folds: &[usize]) -> Result<Vec<DMatrix<f64>>> {
        let x = self.filtered(band)?;
        folds.iter().map(|&f| self.outer_features(&x, position, f)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BandWork {
    pub outer: bool,
    pub inner: bool,
}

/// All-trial feature table whose rows outside `idx` are zero.
fn featurise(model: &StrcaModel, x: &[DMatrix<f64>], idx: &[usize]) -> Result<DMatrix<f64>> {
    let rows = idx
        .par_iter()
        .map(|&i| model.extract(&x[i]))
        .collect::<Result<Vec<_>>>()?;
    let mut out = DMatrix::zeros(x.len(), 6);
    for (&i, r) in idx.iter().zip(rows) {
        for j in 0..6 {
            out[(i, j)] = r.rho[j];
        }
    }
    Ok(out)
}

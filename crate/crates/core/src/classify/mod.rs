//! Binary classifiers over selected features: shrinkage LDA, linear SVM and a
//! small neural network.

mod lda;
mod nn;
mod svm;

pub use lda::{fit_lda, Lda};
pub use nn::{sigmoid, train_mlp, Mlp, MlpGrad};
pub use svm::{svm_dual_solve, SvmSolution};

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lda,
    Svm,
    Nn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Lda, ClassifierKind::Svm, ClassifierKind::Nn];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Lda => "lda",
            ClassifierKind::Svm => "svm",
            ClassifierKind::Nn => "nn",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown classifier '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub lda_shrinkage: f64,
    pub svm_c: f64,
    pub svm_tol: f64,
    pub svm_max_epochs: usize,
    pub nn_hidden: usize,
    pub nn_epochs: usize,
    pub nn_learning_rate: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            lda_shrinkage: 1e-4,
            svm_c: 1.0,
            svm_tol: 1e-4,
            svm_max_epochs: 1000,
            nn_hidden: 10,
            nn_epochs: 200,
            nn_learning_rate: 0.01,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(0.0..=1.0).contains(&self.lda_shrinkage) {
            return bad("lda_shrinkage must lie in [0, 1]");
        }
        if !(self.svm_c > 0.0 && self.svm_tol > 0.0) || self.svm_max_epochs == 0 {
            return bad("svm_c, svm_tol and svm_max_epochs must be positive");
        }
        if self.nn_hidden == 0 || self.nn_epochs == 0 || !(self.nn_learning_rate > 0.0) {
            return bad("nn_hidden, nn_epochs and nn_learning_rate must be positive");
        }
        Ok(())
    }
}

/// Train-fold column means and sample standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Self {
        let n = x.nrows() as f64;
        let mean: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
        let sd = x
            .column_iter()
            .zip(&mean)
            .map(|(c, m)| {
                let v = c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                let s = v.sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, sd }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| (x[(i, j)] - self.mean[j]) / self.sd[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Params {
    Linear { weights: DVector<f64>, bias: f64 },
    Network(Mlp),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    kind: ClassifierKind,
    config: ClassifierConfig,
    n_features: usize,
    standardizer: Option<Standardizer>,
    params: Params,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub labels: Vec<u8>,
    /// Positive values favour class 1 (movement).
    pub decision: Vec<f64>,
}

impl Prediction {
    pub fn accuracy(&self, truth: &[u8]) -> f64 {
        let hits = self.labels.iter().zip(truth).filter(|(a, b)| a == b).count();
        hits as f64 / truth.len() as f64
    }
}

pub fn train(kind: ClassifierKind, x: &DMatrix<f64>, y: &[u8], cfg: &ClassifierConfig) -> Result<TrainedClassifier> {
    cfg.validate()?;
    let (n, d) = x.shape();
    if y.len() != n {
        return Err(Error::Dimension(format!("{n} samples but {} labels", y.len())));
    }
    if d == 0 {
        return Err(Error::Classifier("no features to train on".into()));
    }
    if let Some(l) = y.iter().find(|&&l| l > 1) {
        return Err(Error::Classifier(format!("labels must be 0 or 1, found {l}")));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::Classifier("training data must contain both classes".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Classifier("non-finite feature value".into()));
    }
    let (standardizer, params) = match kind {
        ClassifierKind::Lda => {
            let m = fit_lda(x, y, cfg.lda_shrinkage)?;
            (None, Params::Linear { weights: m.weights, bias: m.bias })
        }
        ClassifierKind::Svm => {
            let s = Standardizer::fit(x);
            let z = s.apply(x);
            let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
            let sol = svm_dual_solve(&z, &signs, cfg.svm_c, cfg.svm_tol, cfg.svm_max_epochs, cfg.seed);
            (Some(s), Params::Linear { weights: sol.weights, bias: sol.bias })
        }
        ClassifierKind::Nn => {
            let s = Standardizer::fit(x);
            let z = s.apply(x);
            let t: Vec<f64> = y.iter().map(|&l| l as f64).collect();
            let net = train_mlp(&z, &t, cfg.nn_hidden, cfg.nn_epochs, cfg.nn_learning_rate, cfg.seed);
            (Some(s), Params::Network(net))
        }
    };
    let c = TrainedClassifier {
        kind,
        config: *cfg,
        n_features: d,
        standardizer,
        params,
    };
    if !c.parameters_finite() {
        return Err(Error::Classifier(format!("{kind} training produced non-finite parameters")));
    }
    Ok(c)
}

pub fn train_features(kind: ClassifierKind, f: &FeatureMatrix, cfg: &ClassifierConfig) -> Result<TrainedClassifier> {
    train(kind, f.values(), f.labels(), cfg)
}

impl TrainedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn parameters_finite(&self) -> bool {
        let lin = match &self.params {
            Params::Linear { weights, bias } => weights.iter().all(|v| v.is_finite()) && bias.is_finite(),
            Params::Network(m) => m
                .w1
                .iter()
                .chain(m.b1.iter())
                .chain(m.w2.iter())
                .all(|v| v.is_finite())
                && m.b2.is_finite(),
        };
        lin && self
            .standardizer
            .as_ref()
            .map_or(true, |s| s.mean.iter().chain(&s.sd).all(|v| v.is_finite()))
    }

    pub fn decision(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::Dimension(format!(
                "classifier expects {} features, got {}",
                self.n_features,
                x.ncols()
            )));
        }
        let z = match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.clone(),
        };
        Ok(match &self.params {
            Params::Linear { weights, bias } => (z * weights).add_scalar(*bias).iter().copied().collect(),
            Params::Network(m) => m.logits(&z).iter().copied().collect(),
        })
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Prediction> {
        let decision = self.decision(x)?;
        let labels = decision.iter().map(|&v| (v > 0.0) as u8).collect();
        Ok(Prediction { labels, decision })
    }

    /// Writes `classifier.json` and `classifier.bin` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut blocks: Vec<(String, usize, usize, Vec<f64>)> = Vec::new();
        match &self.params {
            Params::Linear { weights, bias } => {
                blocks.push(("weights".into(), weights.len(), 1, weights.iter().copied().collect()));
                blocks.push(("bias".into(), 1, 1, vec![*bias]));
            }
            Params::Network(m) => {
                blocks.push(("w1".into(), m.w1.nrows(), m.w1.ncols(), m.w1.iter().copied().collect()));
                blocks.push(("b1".into(), m.b1.len(), 1, m.b1.iter().copied().collect()));
                blocks.push(("w2".into(), m.w2.len(), 1, m.w2.iter().copied().collect()));
                blocks.push(("b2".into(), 1, 1, vec![m.b2]));
            }
        }
        let header = SavedHeader {
            kind: self.kind,
            config: self.config,
            n_features: self.n_features,
            standardizer: self.standardizer.clone(),
            blocks: blocks.iter().map(|(n, r, c, _)| (n.clone(), *r, *c)).collect(),
        };
        let hp = dir.join("classifier.json");
        fs::write(&hp, serde_json::to_string_pretty(&header).expect("header serialises"))
            .map_err(|e| Error::io(&hp, e))?;
        let bytes: Vec<u8> = blocks
            .iter()
            .flat_map(|(_, _, _, v)| v.iter().flat_map(|x| x.to_le_bytes()))
            .collect();
        let bp = dir.join("classifier.bin");
        fs::write(&bp, bytes).map_err(|e| Error::io(&bp, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let hp = dir.join("classifier.json");
        let text = fs::read_to_string(&hp).map_err(|e| Error::io(&hp, e))?;
        let h: SavedHeader = serde_json::from_str(&text).map_err(|e| Error::Sidecar {
            path: hp.clone(),
            reason: e.to_string(),
        })?;
        let bp = dir.join("classifier.bin");
        let bytes = fs::read(&bp).map_err(|e| Error::io(&bp, e))?;
        let want: usize = h.blocks.iter().map(|(_, r, c)| 8 * r * c).sum();
        if bytes.len() != want {
            return Err(Error::Dimension(format!(
                "classifier payload has {} bytes, expected {want}",
                bytes.len()
            )));
        }
        let mut values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        let mut blocks = std::collections::HashMap::new();
        for (name, r, c) in &h.blocks {
            blocks.insert(name.as_str(), DMatrix::from_iterator(*r, *c, values.by_ref().take(r * c)));
        }
        let get = |name: &str| {
            blocks
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Sidecar {
                    path: hp.clone(),
                    reason: format!("missing block '{name}'"),
                })
        };
        let params = match h.kind {
            ClassifierKind::Lda | ClassifierKind::Svm => Params::Linear {
                weights: get("weights")?.column(0).into_owned(),
                bias: get("bias")?[(0, 0)],
            },
            ClassifierKind::Nn => Params::Network(Mlp {
                w1: get("w1")?,
                b1: get("b1")?.column(0).into_owned(),
                w2: get("w2")?.column(0).into_owned(),
                b2: get("b2")?[(0, 0)],
            }),
        };
        Ok(TrainedClassifier {
            kind: h.kind,
            config: h.config,
            n_features: h.n_features,
            standardizer: h.standardizer,
            params,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SavedHeader {
    kind: ClassifierKind,
    config: ClassifierConfig,
    n_features: usize,
    standardizer: Option<Standardizer>,
    blocks: Vec<(String, usize, usize)>,
}

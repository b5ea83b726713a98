use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub outer_folds: usize,
    /// Folds of the band-scoring cross-validation inside each outer training split.
    pub inner_folds: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            outer_folds: 10,
            inner_folds: 9,
            seed: 0,
            shuffle: true,
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_folds < 2 || self.inner_folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "fold counts must be at least 2 (outer {}, inner {})",
                self.outer_folds, self.inner_folds
            )));
        }
        Ok(())
    }
}

/// Stratified fold id of every trial; `labels` are 0/1.
///
/// Class 1 trials are dealt round-robin first, class 0 continues where class
/// 1 stopped, so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[u8], k: usize, shuffle: bool, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("{k} folds requested, need at least 2")));
    }
    let mut fold = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for class in [1u8, 0] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::InvalidParameter(format!(
                "class {class} has {} trials, fewer than {k} folds",
                idx.len()
            )));
        }
        if shuffle {
            idx.shuffle(rng);
        }
        for i in idx {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

/// Outer partition plus, for every outer fold, a partition of its training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Folds {
    outer: Vec<usize>,
    k_outer: usize,
    // inner[f][i]: inner fold of trial i, usize::MAX for outer test trials
    inner: Vec<Vec<usize>>,
    k_inner: usize,
}

impl Folds {
    pub fn new(labels: &[u8], cfg: &CvConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let outer = stratified_folds(labels, cfg.outer_folds, cfg.shuffle, &mut rng)?;
        let mut inner = Vec::with_capacity(cfg.outer_folds);
        for f in 0..cfg.outer_folds {
            let train: Vec<usize> = (0..labels.len()).filter(|&i| outer[i] != f).collect();
            let sub: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(1 + f as u64);
            let ids = stratified_folds(&sub, cfg.inner_folds, cfg.shuffle, &mut rng)?;
            let mut row = vec![usize::MAX; labels.len()];
            for (&i, g) in train.iter().zip(ids) {
                row[i] = g;
            }
            inner.push(row);
        }
        Ok(Folds {
            outer,
            k_outer: cfg.outer_folds,
            inner,
            k_inner: cfg.inner_folds,
        })
    }

    pub fn n_trials(&self) -> usize {
        self.outer.len()
    }

    pub fn n_outer(&self) -> usize {
        self.k_outer
    }

    pub fn n_inner(&self) -> usize {
        self.k_inner
    }

    pub fn outer_fold_of(&self, trial: usize) -> usize {
        self.outer[trial]
    }

    pub fn inner_fold_of(&self, outer: usize, trial: usize) -> Option<usize> {
        Some(self.inner[outer][trial]).filter(|&g| g != usize::MAX)
    }

    pub fn train(&self, f: usize) -> Vec<usize> {
        (0..self.outer.len()).filter(|&i| self.outer[i] != f).collect()
    }

    pub fn test(&self, f: usize) -> Vec<usize> {
        (0..self.outer.len()).filter(|&i| self.outer[i] == f).collect()
    }

    pub fn inner_train(&self, f: usize, g: usize) -> Vec<usize> {
        let row = &self.inner[f];
        (0..row.len()).filter(|&i| row[i] != usize::MAX && row[i] != g).collect()
    }

    pub fn inner_test(&self, f: usize, g: usize) -> Vec<usize> {
        let row = &self.inner[f];
        (0..row.len()).filter(|&i| row[i] == g).collect()
    }
}

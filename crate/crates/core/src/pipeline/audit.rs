use std::sync::Mutex;

use serde::Serialize;

use super::folds::Folds;
use crate::error::{Error, Result};

/// Training stage that read trial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    SpatialFilter,
    Selection,
    Classifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Access {
    pub stage: Stage,
    pub outer_fold: usize,
    pub inner_fold: Option<usize>,
    pub band: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub access: Access,
    pub trials: Vec<usize>,
}

/// Record of every trial index a fitted component was trained on.
#[derive(Debug, Default)]
pub struct AuditLog {
    entries: Mutex<Vec<AuditEntry>>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, access: Access, trials: &[usize]) {
        self.entries.lock().expect("audit log poisoned").push(AuditEntry {
            access,
            trials: trials.to_vec(),
        });
    }

    /// Record, refusing the access if it would train on held-out trials.
    pub fn record_checked(&self, folds: &Folds, access: Access, trials: &[usize]) -> Result<()> {
        let entry = AuditEntry {
            access,
            trials: trials.to_vec(),
        };
        let bad = held_out(folds, &entry);
        self.entries.lock().expect("audit log poisoned").push(entry);
        if bad {
            return Err(Error::Leakage(format!("{access:?}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("audit log poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries in a canonical order, independent of thread scheduling.
    pub fn entries(&self) -> Vec<AuditEntry> {
        let mut e = self.entries.lock().expect("audit log poisoned").clone();
        e.sort_by(|a, b| a.access.cmp(&b.access).then_with(|| a.trials.cmp(&b.trials)));
        e
    }

    pub fn count(&self, stage: Stage, outer_fold: usize) -> usize {
        self.entries
            .lock()
            .expect("audit log poisoned")
            .iter()
            .filter(|e| e.access.stage == stage && e.access.outer_fold == outer_fold)
            .count()
    }

    /// Entries that trained on a trial held out from them: an outer test
    /// trial of their fold, or an inner test trial of their inner fold.
    pub fn violations(&self, folds: &Folds) -> Vec<AuditEntry> {
        self.entries()
            .into_iter()
            .filter(|e| held_out(folds, e))
            .collect()
    }
}

fn held_out(folds: &Folds, e: &AuditEntry) -> bool {
    let f = e.access.outer_fold;
    e.trials.iter().any(|&i| {
        i >= folds.n_trials()
            || folds.outer_fold_of(i) == f
            || (e.access.inner_fold.is_some() && folds.inner_fold_of(f, i) == e.access.inner_fold)
    })
}

//! Mutual-information feature selection over the subband correlation features.

mod mi;
mod select;

pub use mi::{
    conditional_mutual_information, default_bins, entropy_codes, equal_frequency_bins, mi_codes,
    mutual_information, MiTable,
};
pub use select::{
    project_simplex, qpfs_weights, rank_features, step_score, Selector, SelectorRanking,
    QPFS_MAX_ITER, QPFS_TOL,
};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{CoefficientKind, FeatureMatrix};
use crate::error::{Error, Result};

/// How selection is applied across the coefficient kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ArrangementPlan {
    /// `k1` features from each of the six coefficient kinds.
    Type1 { k1: usize },
    /// `k2` features from all columns at once.
    Type2 { k2: usize },
}

impl Default for ArrangementPlan {
    fn default() -> Self {
        ArrangementPlan::Type2 { k2: 13 }
    }
}

impl ArrangementPlan {
    pub fn n_selected(&self) -> usize {
        match *self {
            ArrangementPlan::Type1 { k1 } => 6 * k1,
            ArrangementPlan::Type2 { k2 } => k2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Selected columns of the feature matrix: Type1 lists the picks of each
    /// kind in kind order, Type2 lists picks best first.
    pub columns: Vec<usize>,
    /// One ranking per group, indices local to that group.
    pub rankings: Vec<SelectorRanking>,
    pub groups: Vec<Vec<usize>>,
}

pub fn select_arrangement(
    f: &FeatureMatrix,
    plan: ArrangementPlan,
    method: Selector,
    bins: Option<usize>,
) -> Result<Selection> {
    let m = f.n_bands();
    let d = f.n_features();
    match plan {
        ArrangementPlan::Type1 { k1 } if k1 == 0 || k1 > m => {
            return Err(Error::Selection(format!("K1 = {k1} must lie in 1..={m}")))
        }
        ArrangementPlan::Type2 { k2 } if k2 == 0 || k2 > d => {
            return Err(Error::Selection(format!("K2 = {k2} must lie in 1..={d}")))
        }
        _ => {}
    }
    let table = MiTable::compute(f.values(), f.labels(), bins, method.needs_conditional())?;
    let (groups, k): (Vec<Vec<usize>>, usize) = match plan {
        ArrangementPlan::Type1 { k1 } => (
            CoefficientKind::ALL.iter().map(|&kind| f.kind_group(kind)).collect(),
            k1,
        ),
        ArrangementPlan::Type2 { k2 } => (vec![(0..d).collect()], k2),
    };
    let mut columns = Vec::with_capacity(plan.n_selected());
    let mut rankings = Vec::with_capacity(groups.len());
    for g in &groups {
        let r = rank_features(&table.subset(g), method, k)?;
        columns.extend(r.order.iter().map(|&i| g[i]));
        rankings.push(r);
    }
    Ok(Selection {
        columns,
        rankings,
        groups,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectedColumn {
    pub column: usize,
    pub header: String,
    pub band: usize,
    pub kind: CoefficientKind,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankingReport {
    pub method: Selector,
    pub plan: ArrangementPlan,
    pub selected: Vec<SelectedColumn>,
}

impl RankingReport {
    pub fn new(f: &FeatureMatrix, method: Selector, plan: ArrangementPlan, s: &Selection) -> Self {
        let mut selected = Vec::with_capacity(s.columns.len());
        for (g, r) in s.groups.iter().zip(&s.rankings) {
            for (&i, &score) in r.order.iter().zip(&r.scores) {
                let c = f.columns()[g[i]];
                selected.push(SelectedColumn {
                    column: g[i],
                    header: c.header(),
                    band: c.band,
                    kind: c.kind,
                    score,
                });
            }
        }
        RankingReport {
            method,
            plan,
            selected,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("report serialises");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }
}

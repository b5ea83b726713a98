//! Greedy information-theoretic selectors and the quadratic-programming one.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::MiTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Miq,
    Maxrel,
    Minred,
    Mrmr,
    Qpfs,
    Cife,
    Cmim,
    Mrmtr,
}

impl Selector {
    pub const ALL: [Selector; 8] = [
        Selector::Miq,
        Selector::Maxrel,
        Selector::Minred,
        Selector::Mrmr,
        Selector::Qpfs,
        Selector::Cife,
        Selector::Cmim,
        Selector::Mrmtr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Miq => "miq",
            Selector::Maxrel => "maxrel",
            Selector::Minred => "minred",
            Selector::Mrmr => "mrmr",
            Selector::Qpfs => "qpfs",
            Selector::Cife => "cife",
            Selector::Cmim => "cmim",
            Selector::Mrmtr => "mrmtr",
        }
    }

    /// Whether the criterion uses class-conditional redundancy.
    pub fn needs_conditional(self) -> bool {
        matches!(self, Selector::Cife | Selector::Cmim)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown selector '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorRanking {
    pub method: Selector,
    /// Selected feature indices, best first.
    pub order: Vec<usize>,
    /// Criterion value of each pick (QPFS: the weight of the feature).
    pub scores: Vec<f64>,
}

/// Greedy step criterion of `candidate` given the already selected set.
pub fn step_score(method: Selector, mi: &MiTable, selected: &[usize], candidate: usize) -> f64 {
    let rel = mi.relevance[candidate];
    if selected.is_empty() {
        return rel;
    }
    let red = |j: usize| mi.redundancy[(candidate, j)];
    let cond = |j: usize| {
        mi.conditional
            .as_ref()
            .expect("conditional redundancy computed")[(candidate, j)]
    };
    let s = selected.len() as f64;
    let sum_red: f64 = selected.iter().map(|&j| red(j)).sum();
    match method {
        Selector::Maxrel => rel,
        Selector::Minred => -sum_red / s,
        Selector::Mrmr => rel - sum_red / s,
        Selector::Miq => rel / (sum_red / s).max(1e-12),
        Selector::Mrmtr => rel - 2.0 / s * sum_red,
        Selector::Cife => rel - selected.iter().map(|&j| red(j) - cond(j)).sum::<f64>(),
        Selector::Cmim => selected
            .iter()
            .map(|&j| rel - (red(j) - cond(j)))
            .fold(f64::INFINITY, f64::min),
        Selector::Qpfs => unreachable!("QPFS is not greedy"),
    }
}

pub fn rank_features(mi: &MiTable, method: Selector, k: usize) -> Result<SelectorRanking> {
    let d = mi.n_features();
    if d == 0 {
        return Err(Error::Selection("empty candidate pool".into()));
    }
    if k == 0 || k > d {
        return Err(Error::Selection(format!("cannot select {k} of {d} features")));
    }
    if method.needs_conditional() && mi.conditional.is_none() {
        return Err(Error::Selection(format!(
            "{method} needs class-conditional redundancy"
        )));
    }
    if method == Selector::Qpfs {
        let alpha = qpfs_weights(mi)?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| alpha[j].total_cmp(&alpha[i]).then(i.cmp(&j)));
        order.truncate(k);
        let scores = order.iter().map(|&i| alpha[i]).collect();
        return Ok(SelectorRanking { method, order, scores });
    }
    let mut order = Vec::with_capacity(k);
    let mut scores = Vec::with_capacity(k);
    let mut taken = vec![false; d];
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..d).filter(|&i| !taken[i]) {
            let s = step_score(method, mi, &order, i);
            // strict comparison keeps the lowest index on ties
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        let (i, s) = best.expect("candidates remain while k <= d");
        taken[i] = true;
        order.push(i);
        scores.push(s);
    }
    Ok(SelectorRanking { method, order, scores })
}

/// Iteration cap of the QPFS solver.
pub const QPFS_MAX_ITER: usize = 1000;
/// QPFS stops once no weight moves by more than this in one step.
pub const QPFS_TOL: f64 = 1e-5;

/// Feature weights minimising `½(1−θ)·αᵀHα − θ·qᵀα` over the probability
/// simplex, with `H` the redundancy and `q` the relevance.
pub fn qpfs_weights(mi: &MiTable) -> Result<Vec<f64>> {
    let d = mi.n_features();
    let q = &mi.relevance;
    let h = &mi.redundancy;
    let mean_q = q.iter().sum::<f64>() / d as f64;
    let mean_h = h.mean();
    let theta = if mean_q + mean_h > 0.0 {
        mean_q / (mean_q + mean_h)
    } else {
        0.5
    };
    let quad = h * (1.0 - theta);
    let lipschitz = largest_eigenvalue(&quad);
    let mut alpha = vec![1.0 / d as f64; d];
    if !(lipschitz > 0.0) {
        // flat quadratic term: all weight on the most relevant features
        return Ok(project_simplex(&q.iter().map(|v| v * 1e6).collect::<Vec<_>>()));
    }
    let step = 1.0 / lipschitz;
    // projected gradient with Nesterov momentum, evaluated at the extrapolated point
    let mut point = alpha.clone();
    let mut t = 1.0f64;
    for _ in 0..QPFS_MAX_ITER {
        let grad = &quad * nalgebra::DVector::from_column_slice(&point);
        let moved: Vec<f64> = (0..d).map(|i| point[i] - step * (grad[i] - theta * q[i])).collect();
        let next = project_simplex(&moved);
        let change = next
            .iter()
            .zip(&alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        point = (0..d).map(|i| next[i] + beta * (next[i] - alpha[i])).collect();
        t = t_next;
        alpha = next;
        if change <= QPFS_TOL {
            return Ok(alpha);
        }
    }
    Err(Error::Selection(format!(
        "QPFS did not converge within {QPFS_MAX_ITER} iterations"
    )))
}

fn largest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Euclidean projection onto `{α : α ≥ 0, Σα = 1}` by sorting.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

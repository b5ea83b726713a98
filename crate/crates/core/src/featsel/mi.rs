//! Plug-in mutual information on equal-frequency bins (nats).

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default bin count for `n` observations: `max(2, floor(sqrt(n / 5)))`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64 / 5.0).sqrt().floor() as usize).max(2)
}

/// Bin codes by rank; tied values share a bin. Variables with at most `bins`
/// distinct values keep one code per value.
pub fn equal_frequency_bins(x: &[f64], bins: usize) -> Vec<usize> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]).then(i.cmp(&j)));
    let mut distinct = 0;
    for k in 0..n {
        if k == 0 || x[order[k]] != x[order[k - 1]] {
            distinct += 1;
        }
    }
    let mut codes = vec![0; n];
    let mut group_start = 0;
    let mut group = 0;
    for k in 0..n {
        if k > 0 && x[order[k]] != x[order[k - 1]] {
            group_start = k;
            group += 1;
        }
        codes[order[k]] = if distinct <= bins {
            group
        } else {
            group_start * bins / n
        };
    }
    codes
}

/// Mutual information of two code vectors.
pub fn mi_codes(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; ka * kb];
    let mut pa = vec![0usize; ka];
    let mut pb = vec![0usize; kb];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * kb + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = joint[i * kb + j];
            if c > 0 {
                let c = c as f64;
                mi += c / nf * (c * nf / (pa[i] as f64 * pb[j] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

pub fn entropy_codes(a: &[usize]) -> f64 {
    mi_codes(a, a)
}

fn check(x: &[f64], y: &[f64], bins: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "mutual information of vectors with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "mutual information needs at least 4 observations, got {}",
            x.len()
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("bins must be >= 2, got {bins}")));
    }
    Ok(())
}

pub fn mutual_information(x: &[f64], y: &[f64], bins: usize) -> Result<f64> {
    check(x, y, bins)?;
    Ok(mi_codes(&equal_frequency_bins(x, bins), &equal_frequency_bins(y, bins)))
}

/// `I(x; y | z)` for a discrete `z`: each stratum is binned separately and the
/// per-stratum estimates are weighted by stratum frequency.
pub fn conditional_mutual_information(x: &[f64], y: &[f64], z: &[u8], bins: usize) -> Result<f64> {
    check(x, y, bins)?;
    if z.len() != x.len() {
        return Err(Error::Dimension("conditioning vector length differs".into()));
    }
    let n = x.len() as f64;
    let mut total = 0.0;
    for class in distinct_classes(z) {
        let idx: Vec<usize> = (0..z.len()).filter(|&i| z[i] == class).collect();
        let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let w = idx.len() as f64 / n;
        total += w * mi_codes(&equal_frequency_bins(&xs, bins), &equal_frequency_bins(&ys, bins));
    }
    Ok(total)
}

fn distinct_classes(z: &[u8]) -> Vec<u8> {
    let mut c = z.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Relevance, redundancy and (optionally) class-conditional redundancy of
/// every feature column.
#[derive(Debug, Clone, PartialEq)]
pub struct MiTable {
    pub relevance: Vec<f64>,
    pub redundancy: DMatrix<f64>,
    pub conditional: Option<DMatrix<f64>>,
    pub bins: usize,
}

impl MiTable {
    /// `x` is trials × features; `labels` one class code per trial.
    pub fn compute(x: &DMatrix<f64>, labels: &[u8], bins: Option<usize>, conditional: bool) -> Result<Self> {
        let (n, d) = x.shape();
        if labels.len() != n {
            return Err(Error::Dimension(format!(
                "{n} feature rows but {} labels",
                labels.len()
            )));
        }
        if n < 4 {
            return Err(Error::InvalidParameter(format!(
                "mutual information needs at least 4 observations, got {n}"
            )));
        }
        if d == 0 {
            return Err(Error::Selection("no feature columns".into()));
        }
        let bins = bins.unwrap_or_else(|| default_bins(n));
        if bins < 2 {
            return Err(Error::InvalidParameter(format!("bins must be >= 2, got {bins}")));
        }
        let label_codes: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
        let codes: Vec<Vec<usize>> = (0..d)
            .into_par_iter()
            .map(|j| equal_frequency_bins(x.column(j).as_slice(), bins))
            .collect();
        let relevance: Vec<f64> = codes.iter().map(|c| mi_codes(c, &label_codes)).collect();
        let redundancy = pairwise(d, |i, j| mi_codes(&codes[i], &codes[j]));

        let conditional = if conditional {
            let strata: Vec<(f64, Vec<Vec<usize>>)> = distinct_classes(labels)
                .into_iter()
                .map(|class| {
                    let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                    let w = idx.len() as f64 / n as f64;
                    let codes = (0..d)
                        .into_par_iter()
                        .map(|j| {
                            let col: Vec<f64> = idx.iter().map(|&i| x[(i, j)]).collect();
                            equal_frequency_bins(&col, bins)
                        })
                        .collect();
                    (w, codes)
                })
                .collect();
            Some(pairwise(d, |i, j| {
                strata.iter().map(|(w, c)| w * mi_codes(&c[i], &c[j])).sum()
            }))
        } else {
            None
        };
        Ok(MiTable {
            relevance,
            redundancy,
            conditional,
            bins,
        })
    }

    pub fn n_features(&self) -> usize {
        self.relevance.len()
    }

    /// Table restricted to `cols`, in that order.
    pub fn subset(&self, cols: &[usize]) -> MiTable {
        let k = cols.len();
        let pick = |m: &DMatrix<f64>| DMatrix::from_fn(k, k, |i, j| m[(cols[i], cols[j])]);
        MiTable {
            relevance: cols.iter().map(|&c| self.relevance[c]).collect(),
            redundancy: pick(&self.redundancy),
            conditional: self.conditional.as_ref().map(pick),
            bins: self.bins,
        }
    }
}

fn pairwise(d: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| (i..d).map(|j| f(i, j)).collect())
        .collect();
    let mut m = DMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            m[(i, i + off)] = v;
            m[(i + off, i)] = v;
        }
    }
    m
}

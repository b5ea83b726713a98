//! Containers for epoched EEG, hand trajectories and CCP feature tables.

mod features;
mod io;
mod normalize;

pub use features::{export_features, import_features};
pub use io::{load_dataset, load_epochs, save_dataset, save_epochs, EpochFormat};
pub use normalize::zscore_normalize;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class tag of an epoch set. Movement is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Movement,
    Rest,
}

impl ClassLabel {
    /// Binary code used by feature tables and classifiers (movement = 1).
    pub fn bit(self) -> u8 {
        match self {
            ClassLabel::Movement => 1,
            ClassLabel::Rest => 0,
        }
    }
}

/// A stack of equally shaped trials recorded at one sampling rate.
///
/// Trials are stored as `n_channels × n_samples` matrices. The epoch window is
/// given in seconds relative to (possibly fake) movement onset.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSet {
    trials: Vec<DMatrix<f64>>,
    fs: f64,
    channel_names: Vec<String>,
    label: ClassLabel,
    window: (f64, f64),
}

impl EpochSet {
    pub fn new(
        trials: Vec<DMatrix<f64>>,
        fs: f64,
        channel_names: Vec<String>,
        label: ClassLabel,
        window: (f64, f64),
    ) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        if trials.len() < 2 {
            return Err(Error::Dimension(format!(
                "an epoch set needs at least 2 trials, got {}",
                trials.len()
            )));
        }
        let (nc, ns) = trials[0].shape();
        if nc < 2 {
            return Err(Error::Dimension(format!(
                "an epoch set needs at least 2 channels, got {nc}"
            )));
        }
        if let Some(j) = trials.iter().position(|t| t.shape() != (nc, ns)) {
            return Err(Error::Dimension(format!(
                "trial {j} has shape {:?}, expected ({nc}, {ns})",
                trials[j].shape()
            )));
        }
        if channel_names.len() != nc {
            return Err(Error::Dimension(format!(
                "{} channel names for {nc} channels",
                channel_names.len()
            )));
        }
        let expected = ((window.1 - window.0) * fs).round();
        if !(expected >= 0.0) || expected as usize != ns {
            return Err(Error::Dimension(format!(
                "window {:?} at {fs} Hz implies {expected} samples, trials have {ns}",
                window
            )));
        }
        for (t, m) in trials.iter().enumerate() {
            for s in 0..ns {
                for c in 0..nc {
                    if !m[(c, s)].is_finite() {
                        return Err(Error::NonFinite {
                            channel: c,
                            sample: s,
                            trial: t,
                        });
                    }
                }
            }
        }
        Ok(EpochSet {
            trials,
            fs,
            channel_names,
            label,
            window,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.trials[0].nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.trials[0].ncols()
    }

    pub fn n_trials(&self) -> usize {
        self.trials.len()
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> ClassLabel {
        self.label
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn trials(&self) -> &[DMatrix<f64>] {
        &self.trials
    }

    pub fn trial(&self, j: usize) -> &DMatrix<f64> {
        &self.trials[j]
    }

    /// Same metadata, new payload. The payload is re-validated.
    pub fn with_trials(&self, trials: Vec<DMatrix<f64>>) -> Result<Self> {
        EpochSet::new(
            trials,
            self.fs,
            self.channel_names.clone(),
            self.label,
            self.window,
        )
    }

    /// Subset of trials in the given order.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let trials = idx
            .iter()
            .map(|&j| {
                self.trials.get(j).cloned().ok_or_else(|| {
                    Error::Dimension(format!("trial index {j} out of range {}", self.n_trials()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_trials(trials)
    }
}

/// One hand/limb trajectory channel of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<f64>,
    pub fs: f64,
    pub trial_id: usize,
}

impl Trajectory {
    pub fn new(samples: Vec<f64>, fs: f64, trial_id: usize) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter(
                "a trajectory needs at least 2 samples".into(),
            ));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        Ok(Trajectory {
            samples,
            fs,
            trial_id,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// The six CCP coefficients extracted per subband, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoefficientKind {
    /// Plain correlation with the movement template.
    Rho11,
    /// Plain correlation with the rest template.
    Rho12,
    /// CCA-projected correlation with the movement template.
    Rho21,
    /// CCA-projected correlation with the rest template.
    Rho22,
    /// Template-difference correlation, movement side.
    Rho31,
    /// Template-difference correlation, rest side.
    Rho32,
}

impl CoefficientKind {
    pub const ALL: [CoefficientKind; 6] = [
        CoefficientKind::Rho11,
        CoefficientKind::Rho12,
        CoefficientKind::Rho21,
        CoefficientKind::Rho22,
        CoefficientKind::Rho31,
        CoefficientKind::Rho32,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            CoefficientKind::Rho11 => "rho1_1",
            CoefficientKind::Rho12 => "rho1_2",
            CoefficientKind::Rho21 => "rho2_1",
            CoefficientKind::Rho22 => "rho2_2",
            CoefficientKind::Rho31 => "rho3_1",
            CoefficientKind::Rho32 => "rho3_2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Provenance of one feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub band: usize,
    pub kind: CoefficientKind,
}

impl FeatureColumn {
    pub fn header(&self) -> String {
        format!("b{}_{}", self.band, self.kind)
    }

    pub fn parse_header(s: &str) -> Option<Self> {
        let rest = s.strip_prefix('b')?;
        let (band, kind) = rest.split_once('_')?;
        Some(FeatureColumn {
            band: band.parse().ok()?,
            kind: CoefficientKind::from_name(kind)?,
        })
    }
}

/// Trials × features table of CCP coefficients with column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
    columns: Vec<FeatureColumn>,
    labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>, columns: Vec<FeatureColumn>, labels: Vec<u8>) -> Result<Self> {
        if values.ncols() != columns.len() {
            return Err(Error::Dimension(format!(
                "{} columns of values but {} provenance entries",
                values.ncols(),
                columns.len()
            )));
        }
        if values.nrows() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} rows but {} labels",
                values.nrows(),
                labels.len()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidParameter(format!("label {l} is not binary")));
        }
        let mut bands: Vec<usize> = columns.iter().map(|c| c.band).collect();
        bands.sort_unstable();
        bands.dedup();
        if columns.len() != 6 * bands.len() {
            return Err(Error::Dimension(format!(
                "{} columns for {} bands, expected 6 per band",
                columns.len(),
                bands.len()
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(columns.len());
        for c in &columns {
            if !seen.insert(*c) {
                return Err(Error::Dimension(format!("duplicate column {}", c.header())));
            }
        }
        for (k, col) in values.column_iter().enumerate() {
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Dimension(format!(
                    "column {} has non-finite values",
                    columns[k].header()
                )));
            }
        }
        Ok(FeatureMatrix {
            values,
            columns,
            labels,
        })
    }

    /// Band-major layout: column `6 * band + kind`.
    pub fn band_major(values: DMatrix<f64>, labels: Vec<u8>) -> Result<Self> {
        let m = values.ncols() / 6;
        let columns = (0..m)
            .flat_map(|band| CoefficientKind::ALL.map(|kind| FeatureColumn { band, kind }))
            .collect();
        FeatureMatrix::new(values, columns, labels)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n_trials(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_bands(&self) -> usize {
        self.columns.len() / 6
    }

    /// Column indices of every feature of the given coefficient kind, in band order.
    pub fn kind_group(&self, kind: CoefficientKind) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.columns.len())
            .filter(|&i| self.columns[i].kind == kind)
            .collect();
        idx.sort_by_key(|&i| self.columns[i].band);
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(nc: usize, ns: usize, nt: usize) -> Result<EpochSet> {
        let trials = (0..nt)
            .map(|t| DMatrix::from_fn(nc, ns, |c, s| (c + s + t) as f64))
            .collect();
        let names = (0..nc).map(|c| format!("ch{c}")).collect();
        EpochSet::new(trials, 256.0, names, ClassLabel::Movement, (-(ns as f64) / 256.0, 0.0))
    }

    #[test]
    fn epoch_invariants() {
        assert!(set(11, 512, 60).is_ok());
        assert!(matches!(set(1, 512, 60), Err(Error::Dimension(_))));
        assert!(matches!(set(3, 512, 1), Err(Error::Dimension(_))));
        let e = set(2, 8, 2).unwrap();
        let mut bad = e.trials().to_vec();
        bad[1][(1, 3)] = f64::INFINITY;
        assert!(matches!(
            e.with_trials(bad),
            Err(Error::NonFinite { channel: 1, sample: 3, trial: 1 })
        ));
    }

    #[test]
    fn window_must_match_samples() {
        let trials = vec![DMatrix::zeros(2, 10); 2];
        let names = vec!["a".into(), "b".into()];
        assert!(EpochSet::new(trials, 256.0, names, ClassLabel::Rest, (-2.0, 0.0)).is_err());
    }

    #[test]
    fn feature_provenance_is_a_bijection() {
        let f = FeatureMatrix::band_major(DMatrix::zeros(3, 12), vec![0, 1, 0]).unwrap();
        let mut cols = f.columns().to_vec();
        cols.sort_by_key(|c| (c.band, c.kind));
        cols.dedup();
        assert_eq!(cols.len(), 12);
        assert_eq!(f.kind_group(CoefficientKind::Rho22), vec![3, 9]);

        let mut dup = f.columns().to_vec();
        dup[1] = dup[0];
        assert!(FeatureMatrix::new(DMatrix::zeros(3, 12), dup, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn header_round_trip() {
        let c = FeatureColumn {
            band: 42,
            kind: CoefficientKind::Rho31,
        };
        assert_eq!(c.header(), "b42_rho3_1");
        assert_eq!(FeatureColumn::parse_header(&c.header()), Some(c));
        assert_eq!(FeatureColumn::parse_header("label"), None);
    }
}

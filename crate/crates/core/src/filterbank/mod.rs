//! Subband definitions and zero-phase Butterworth filter banks.

mod bands;
mod butterworth;

pub use bands::{
    default_shifted_highs, default_shifted_lows, make_bands, make_shifted_grid, BandGridConfig,
    BandSpec, Setting, MAX_BAND_HZ,
};
pub use butterworth::{design_bandpass, design_butterworth, BandDesign, Sos, BUTTERWORTH_ORDER};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::EpochSet;
use crate::error::{Error, Result};

/// Mirror padding applied before forward-backward filtering, in seconds.
pub const PAD_SECONDS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    designs: Vec<BandDesign>,
    fs: f64,
}

impl FilterBank {
    pub fn design(bands: &[BandSpec], fs: f64) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidParameter("filter bank without bands".into()));
        }
        let designs = bands
            .iter()
            .map(|b| design_butterworth(b, fs))
            .collect::<Result<Vec<_>>>()?;
        Ok(FilterBank { designs, fs })
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn order(&self) -> usize {
        BUTTERWORTH_ORDER
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn designs(&self) -> &[BandDesign] {
        &self.designs
    }

    pub fn bands(&self) -> Vec<BandSpec> {
        self.designs.iter().map(|d| d.band).collect()
    }

    pub fn pad_len(&self) -> usize {
        (PAD_SECONDS * self.fs).round() as usize
    }
}

/// Zero-phase filter every channel of every trial with one band design.
pub fn filter_trial(design: &BandDesign, x: &DMatrix<f64>, pad: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    let mut row = vec![0.0; x.ncols()];
    for c in 0..x.nrows() {
        for (s, v) in row.iter_mut().enumerate() {
            *v = x[(c, s)];
        }
        let y = design.filtfilt(&row, pad);
        for (s, v) in y.into_iter().enumerate() {
            out[(c, s)] = v;
        }
    }
    out
}

pub fn apply_design(design: &BandDesign, e: &EpochSet, pad: usize) -> Result<EpochSet> {
    if (design.fs - e.fs()).abs() > 1e-9 * e.fs() {
        return Err(Error::Dimension(format!(
            "filter designed for {} Hz applied to {} Hz epochs",
            design.fs,
            e.fs()
        )));
    }
    let trials = e.trials().iter().map(|t| filter_trial(design, t, pad)).collect();
    e.with_trials(trials)
}

/// Decompose epochs into one subband epoch set per band, in bank order.
pub fn apply_bank(fb: &FilterBank, e: &EpochSet) -> Result<Vec<EpochSet>> {
    let pad = fb.pad_len();
    fb.designs
        .par_iter()
        .map(|d| apply_design(d, e, pad))
        .collect()
}

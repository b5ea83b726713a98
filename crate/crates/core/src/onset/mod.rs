//! Movement-onset localisation from hand trajectories and trial rejection.
//!
//! Limb movements are thresholded on the max-normalised trajectory, hand
//! movements are first fitted with a Gaussian bump, and rest trials receive a
//! fake onset a fixed delay after the cue beep.

mod gaussfit;
mod smoothing;

pub use gaussfit::{fit_gaussian, FitOutcome, GaussianParams};
pub use smoothing::{first_difference, savgol_order1};

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnsetStatus {
    Accepted,
    RejectedVariance,
    RejectedFit,
    RejectedManual,
}

impl fmt::Display for OnsetStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OnsetStatus::Accepted => "accepted",
            OnsetStatus::RejectedVariance => "rejected-variance",
            OnsetStatus::RejectedFit => "rejected-fit",
            OnsetStatus::RejectedManual => "rejected-manual",
        })
    }
}

/// Outcome for one trial. `onset_index` is set exactly when accepted;
/// `fit_params` is set exactly when a Gaussian fit was attempted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetResult {
    pub trial_id: usize,
    pub onset_index: Option<usize>,
    pub status: OnsetStatus,
    pub fit_params: Option<GaussianParams>,
}

impl OnsetResult {
    fn rejected(trial_id: usize, status: OnsetStatus, fit_params: Option<GaussianParams>) -> Self {
        OnsetResult {
            trial_id,
            onset_index: None,
            status,
            fit_params,
        }
    }

    fn accepted(trial_id: usize, index: usize, fit_params: Option<GaussianParams>) -> Self {
        OnsetResult {
            trial_id,
            onset_index: Some(index),
            status: OnsetStatus::Accepted,
            fit_params,
        }
    }
}

/// Which signal the limb variance gate looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceSource {
    Raw,
    SmoothedDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimbConfig {
    pub var_threshold: f64,
    pub onset_threshold: f64,
    pub window: usize,
    pub variance_source: VarianceSource,
}

impl Default for LimbConfig {
    fn default() -> Self {
        LimbConfig {
            var_threshold: 0.05,
            onset_threshold: 0.2,
            window: 31,
            variance_source: VarianceSource::Raw,
        }
    }
}

/// Rejection bounds and fit settings for hand movements.
///
/// `c_max` is in samples; `a_min` and `d_max` are in trajectory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub a_min: f64,
    pub c_max: f64,
    pub d_max: f64,
    pub onset_threshold: f64,
    pub window: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            a_min: 0.05,
            c_max: 100.0,
            d_max: 10.0,
            onset_threshold: 0.2,
            window: 31,
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestConfig {
    pub var_threshold: f64,
    pub beep_time_s: f64,
    pub delay_s: f64,
}

impl Default for RestConfig {
    fn default() -> Self {
        RestConfig {
            var_threshold: 0.02,
            beep_time_s: 0.0,
            delay_s: 2.5,
        }
    }
}

/// Savitzky–Golay (order 1) smoothing of the first difference; length `n - 1`.
pub fn smooth_diff(t: &Trajectory, window: usize) -> Result<Vec<f64>> {
    let d = first_difference(&t.samples);
    savgol_order1(&d, window)
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
}

fn max_of(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn locate_onset_limb(t: &Trajectory, cfg: &LimbConfig) -> Result<OnsetResult> {
    let gate = match cfg.variance_source {
        VarianceSource::Raw => sample_variance(&t.samples),
        VarianceSource::SmoothedDiff => sample_variance(&smooth_diff(t, cfg.window)?),
    };
    if gate < cfg.var_threshold {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedVariance, None));
    }
    let peak = max_of(&t.samples);
    if !(peak > 0.0) {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedManual, None));
    }
    Ok(t.samples
        .iter()
        .position(|v| v / peak > cfg.onset_threshold)
        .map(|i| OnsetResult::accepted(t.trial_id, i, None))
        .unwrap_or_else(|| OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedManual, None)))
}

/// Gaussian-fit onset for low-amplitude hand movements.
///
/// The fit runs on the smoothed max-normalised trajectory; reported `a` and
/// `d` are scaled back to trajectory units and a trial is rejected when any
/// bound is violated.
pub fn locate_onset_fit(t: &Trajectory, cfg: &FitConfig) -> Result<OnsetResult> {
    let peak = max_of(&t.samples);
    if !(peak > 0.0) || sample_variance(&t.samples) == 0.0 {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedVariance, None));
    }
    let normalized: Vec<f64> = t.samples.iter().map(|v| v / peak).collect();
    let smoothed = savgol_order1(&normalized, cfg.window)?;
    let fit = fit_gaussian(&smoothed, cfg.max_iter, cfg.tol);
    let params = GaussianParams {
        a: fit.params.a * peak,
        b: fit.params.b,
        c: fit.params.c.abs(),
        d: fit.params.d * peak,
    };
    if !fit.converged {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedFit, Some(params)));
    }
    if params.a < cfg.a_min || params.c > cfg.c_max || params.d > cfg.d_max {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedFit, Some(params)));
    }
    Ok(smoothed
        .iter()
        .position(|&v| v > cfg.onset_threshold)
        .map(|i| OnsetResult::accepted(t.trial_id, i, Some(params)))
        .unwrap_or_else(|| {
            OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedManual, Some(params))
        }))
}

/// Rest trials: variance gate (strictly greater rejects), then a fake onset
/// `delay_s` after the beep.
pub fn fake_onset_rest(t: &Trajectory, cfg: &RestConfig) -> Result<OnsetResult> {
    let index = ((cfg.beep_time_s + cfg.delay_s) * t.fs).round();
    if !(index >= 0.0) || index as usize >= t.len() {
        return Err(Error::InvalidParameter(format!(
            "trajectory of {} samples does not cover the fake onset at sample {index}",
            t.len()
        )));
    }
    if sample_variance(&t.samples) > cfg.var_threshold {
        return Ok(OnsetResult::rejected(t.trial_id, OnsetStatus::RejectedVariance, None));
    }
    Ok(OnsetResult::accepted(t.trial_id, index as usize, None))
}

/// Onset report: `trial_id,status,onset_index,a,b,c,d` with empty cells for
/// absent values.
pub fn write_onset_report(results: &[OnsetResult], path: &Path) -> Result<()> {
    let mut out = String::from("trial_id,status,onset_index,a,b,c,d\n");
    for r in results {
        out.push_str(&format!("{},{},", r.trial_id, r.status));
        if let Some(i) = r.onset_index {
            out.push_str(&i.to_string());
        }
        match r.fit_params {
            Some(p) => out.push_str(&format!(
                ",{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.a, p.b, p.c, p.d
            )),
            None => out.push_str(",,,,\n"),
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

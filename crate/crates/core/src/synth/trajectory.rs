//! Synthetic movement trajectories with a known onset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    /// Sigmoid rise crossing 20 % of its height at the onset.
    Limb,
    /// Gaussian bump centred on the onset.
    Hand,
    /// Flat line.
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    pub onset_s: f64,
    pub duration_s: f64,
    pub fs: f64,
    pub noise_sd: f64,
    /// Bump height, width in samples and baseline for the hand kind.
    pub amplitude: f64,
    pub width_samples: f64,
    pub baseline: f64,
    /// Sigmoid time constant of the limb kind, seconds.
    pub rise_s: f64,
    pub seed: u64,
    pub trial_id: usize,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec {
            kind: TrajectoryKind::Limb,
            onset_s: 2.0,
            duration_s: 6.0,
            fs: 256.0,
            noise_sd: 0.0,
            amplitude: 1.0,
            width_samples: 40.0,
            baseline: 0.0,
            rise_s: 0.1,
            seed: 0,
            trial_id: 0,
        }
    }
}

pub fn generate_trajectory(spec: &TrajectorySpec) -> Result<Trajectory> {
    if !(spec.fs > 0.0 && spec.duration_s > 0.0) {
        return Err(Error::InvalidParameter("fs and duration must be positive".into()));
    }
    if !(spec.onset_s >= 0.0 && spec.onset_s < spec.duration_s) {
        return Err(Error::InvalidParameter(format!(
            "onset {} s lies outside the {} s trajectory",
            spec.onset_s, spec.duration_s
        )));
    }
    if !(spec.noise_sd >= 0.0) || !(spec.rise_s > 0.0) || !(spec.width_samples > 0.0) {
        return Err(Error::InvalidParameter(
            "noise_sd must be non-negative, rise_s and width_samples positive".into(),
        ));
    }
    let n = (spec.duration_s * spec.fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centre = spec.onset_s * spec.fs;
    // a logistic reaches 0.2 at ln(1/4) time constants before its midpoint
    let midpoint = spec.onset_s + spec.rise_s * 4f64.ln();
    let samples = (0..n)
        .map(|i| {
            let clean = match spec.kind {
                TrajectoryKind::Limb => {
                    let t = i as f64 / spec.fs;
                    spec.amplitude / (1.0 + (-(t - midpoint) / spec.rise_s).exp())
                }
                TrajectoryKind::Hand => {
                    let z = (i as f64 - centre) / spec.width_samples;
                    spec.amplitude * (-z * z).exp() + spec.baseline
                }
                TrajectoryKind::Rest => spec.baseline,
            };
            clean + spec.noise_sd * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Trajectory::new(samples, spec.fs, spec.trial_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onset::{
        fake_onset_rest, locate_onset_fit, locate_onset_limb, FitConfig, LimbConfig, OnsetStatus, RestConfig,
    };

    #[test]
    fn limb_onset_is_recovered() {
        for (seed, onset) in [(1, 1.5), (2, 2.0), (3, 3.25)] {
            let spec = TrajectorySpec {
                onset_s: onset,
                noise_sd: 0.005,
                seed,
                ..TrajectorySpec::default()
            };
            let t = generate_trajectory(&spec).unwrap();
            let r = locate_onset_limb(&t, &LimbConfig::default()).unwrap();
            let want = (onset * spec.fs).round() as i64;
            assert!((r.onset_index.unwrap() as i64 - want).abs() <= 2);
        }
    }

    #[test]
    fn hand_bump_parameters_are_recovered() {
        let spec = TrajectorySpec {
            kind: TrajectoryKind::Hand,
            onset_s: 2.0,
            amplitude: 0.5,
            width_samples: 40.0,
            noise_sd: 0.002,
            seed: 4,
            ..TrajectorySpec::default()
        };
        let t = generate_trajectory(&spec).unwrap();
        let r = locate_onset_fit(&t, &FitConfig::default()).unwrap();
        assert_eq!(r.status, OnsetStatus::Accepted);
        let p = r.fit_params.unwrap();
        assert!((p.a - 0.5).abs() <= 0.05);
        assert!((p.b - 512.0).abs() <= 51.2);
        assert!((p.c - 40.0).abs() <= 4.0);
        assert!(p.d.abs() <= 0.05);
    }

    #[test]
    fn quiet_rest_is_accepted() {
        let spec = TrajectorySpec {
            kind: TrajectoryKind::Rest,
            noise_sd: 0.01,
            seed: 5,
            ..TrajectorySpec::default()
        };
        let t = generate_trajectory(&spec).unwrap();
        assert_eq!(fake_onset_rest(&t, &RestConfig::default()).unwrap().status, OnsetStatus::Accepted);
    }

    #[test]
    fn onset_outside_duration_is_rejected() {
        let spec = TrajectorySpec {
            onset_s: 7.0,
            ..TrajectorySpec::default()
        };
        assert!(generate_trajectory(&spec).is_err());
    }
}

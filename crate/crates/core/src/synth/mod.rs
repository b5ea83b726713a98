//! Synthetic pre-movement epochs with a known class-discriminative component.
//!
//! Movement trials follow `x_c(t) = a1_c·g·s(t) + a2·n_c(t)` where `s` is a
//! band-limited readiness-potential-like ramp, `g` a per-trial amplitude
//! jitter and `n` a mix of pink, white and spatially correlated noise. Rest
//! trials contain only the noise term.

mod trajectory;

pub use trajectory::{generate_trajectory, TrajectoryKind, TrajectorySpec};

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use libm::erf;

use crate::data::{ClassLabel, EpochSet};
use crate::error::{Error, Result};

/// Channel names used when eleven channels are generated.
pub const DEFAULT_CHANNELS: [&str; 11] = [
    "F3", "Fz", "F4", "C3", "Cz", "C4", "P3", "Pz", "P4", "FCz", "CPz",
];

/// Variance shares of the noise components (normalised to sum to one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub pink: f64,
    pub white: f64,
    pub common: f64,
    /// Number of spatially mixed pink sources behind the common share.
    pub n_common: usize,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            pink: 0.6,
            white: 0.2,
            common: 0.2,
            n_common: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_channels: usize,
    pub n_samples: usize,
    /// Trials per class.
    pub n_trials: usize,
    pub fs: f64,
    pub template_band: (f64, f64),
    /// Mean signal power over mean noise power on each channel.
    pub snr: f64,
    /// Relative sd of the per-trial signal amplitude.
    pub amplitude_jitter: f64,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_channels: 11,
            n_samples: 512,
            n_trials: 60,
            fs: 256.0,
            template_band: (0.05, 3.0),
            snr: 1.0,
            amplitude_jitter: 0.2,
            noise: NoiseSpec::default(),
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return bad(format!("snr must be positive and finite, got {}", self.snr));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return bad(format!("fs must be positive, got {}", self.fs));
        }
        let (lo, hi) = self.template_band;
        if !(lo > 0.0 && lo < hi && hi < self.fs / 2.0) {
            return bad(format!(
                "template band ({lo}, {hi}) Hz must satisfy 0 < low < high < fs/2"
            ));
        }
        if self.n_channels < 2 || self.n_samples < 8 || self.n_trials < 2 {
            return bad("need at least 2 channels, 8 samples and 2 trials per class".into());
        }
        if !(self.amplitude_jitter >= 0.0 && self.amplitude_jitter < 1.0) {
            return bad("amplitude_jitter must lie in [0, 1)".into());
        }
        let n = &self.noise;
        if [n.pink, n.white, n.common].iter().any(|w| !(*w >= 0.0)) || n.pink + n.white + n.common <= 0.0 {
            return bad("noise shares must be non-negative with a positive sum".into());
        }
        if n.common > 0.0 && n.n_common == 0 {
            return bad("a common noise share needs at least one common source".into());
        }
        // the band must contain at least one DFT bin
        let df = self.fs / self.n_samples as f64;
        if (1..=self.n_samples / 2).all(|k| {
            let f = k as f64 * df;
            f < lo || f > hi
        }) {
            return bad(format!(
                "template band ({lo}, {hi}) Hz holds no frequency bin at resolution {df} Hz"
            ));
        }
        Ok(())
    }

    pub fn channel_names(&self) -> Vec<String> {
        if self.n_channels == DEFAULT_CHANNELS.len() {
            DEFAULT_CHANNELS.iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.n_channels).map(|c| format!("ch{c}")).collect()
        }
    }

    pub fn window(&self) -> (f64, f64) {
        (-(self.n_samples as f64) / self.fs, 0.0)
    }
}

/// Everything the generator drew that downstream checks may need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SynthSpec,
    pub source: Vec<f64>,
    /// Per-channel signal gains, mean square one.
    pub signal_mixing: Vec<f64>,
    /// Noise gain shared by all channels.
    pub noise_gain: f64,
    /// Per-trial amplitude factors of the movement class.
    pub trial_gains: Vec<f64>,
    /// channels × sources mixing of the common noise sources.
    pub common_mixing: Vec<Vec<f64>>,
}

impl GroundTruth {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("truth serialises");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub movement: EpochSet,
    pub rest: EpochSet,
    pub truth: GroundTruth,
}

/// Readiness-potential-like template: a negative integrated-Gaussian ramp
/// reaching its floor at the end of the epoch, restricted to the DFT bins
/// inside `band` and scaled to unit RMS.
pub fn readiness_template(n: usize, fs: f64, band: (f64, f64)) -> Vec<f64> {
    let duration = n as f64 / fs;
    let centre = 0.7 * duration;
    let width = 0.2 * duration;
    let ramp: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            -0.5 * (1.0 + erf((t - centre) / (width * 2f64.sqrt())))
        })
        .collect();
    let mut s = band_project(&ramp, fs, band);
    let rms = (s.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        s.iter_mut().for_each(|v| *v /= rms);
    }
    s
}

/// Keep only the DFT bins with frequency inside `band` (inclusive).
pub fn band_project(x: &[f64], fs: f64, band: (f64, f64)) -> Vec<f64> {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 * fs / n as f64;
        if f < band.0 || f > band.1 {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Fraction of the energy of `x` whose DFT bins fall inside `band`.
pub fn in_band_energy_fraction(x: &[f64], fs: f64, band: (f64, f64)) -> f64 {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (mut inside, mut total) = (0.0, 0.0);
    for (k, c) in buf.iter().enumerate() {
        let f = k.min(n - k) as f64 * fs / n as f64;
        let e = c.norm_sqr();
        total += e;
        if f >= band.0 && f <= band.1 {
            inside += e;
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

/// Unit-variance pink noise of length `n`, cut from the middle of a buffer
/// eight times longer so the lowest frequencies are represented.
fn pink_noise(n: usize, rng: &mut ChaCha8Rng, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let len = (8 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    planner.plan_fft_forward(len).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let f = k.min(len - k);
        *c = if f == 0 {
            Complex::new(0.0, 0.0)
        } else {
            *c / (f as f64).sqrt()
        };
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let full: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let sd = (full.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt();
    let start = (len - n) / 2;
    full[start..start + n].iter().map(|v| v / sd).collect()
}

fn white_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Stream ids keep every trial's draws independent of scheduling.
fn trial_rng(seed: u64, class: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + (class as u64) * (1 << 32) + trial as u64);
    rng
}

struct Mixing {
    signal: Vec<f64>,
    common: DMatrix<f64>,
    noise_gain: f64,
}

fn noise_trial(spec: &SynthSpec, mix: &Mixing, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (nc, ns) = (spec.n_channels, spec.n_samples);
    let shares = spec.noise;
    let total = shares.pink + shares.white + shares.common;
    let (wp, ww, wc) = (
        (shares.pink / total).sqrt(),
        (shares.white / total).sqrt(),
        (shares.common / total).sqrt(),
    );
    let mut planner = FftPlanner::new();
    let mut x = DMatrix::zeros(nc, ns);
    for c in 0..nc {
        let p = pink_noise(ns, rng, &mut planner);
        let w = white_noise(ns, rng);
        for s in 0..ns {
            x[(c, s)] = wp * p[s] + ww * w[s];
        }
    }
    if shares.common > 0.0 {
        let sources: Vec<Vec<f64>> = (0..shares.n_common)
            .map(|_| pink_noise(ns, rng, &mut planner))
            .collect();
        for c in 0..nc {
            for (k, src) in sources.iter().enumerate() {
                let g = wc * mix.common[(c, k)];
                for s in 0..ns {
                    x[(c, s)] += g * src[s];
                }
            }
        }
    }
    x * mix.noise_gain
}

pub fn generate(spec: &SynthSpec) -> Result<SynthDataset> {
    spec.validate()?;
    let (nc, ns, nt) = (spec.n_channels, spec.n_samples, spec.n_trials);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let source = readiness_template(ns, spec.fs, spec.template_band);

    let mut signal: Vec<f64> = (0..nc).map(|_| rng.gen_range(0.3..1.0)).collect();
    let ms = signal.iter().map(|a| a * a).sum::<f64>() / nc as f64;
    signal.iter_mut().for_each(|a| *a /= ms.sqrt());
    // rows normalised so each channel receives unit common-source variance
    let mut common = DMatrix::from_fn(nc, spec.noise.n_common, |_, _| rng.sample::<f64, _>(StandardNormal));
    for mut row in common.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    let mix = Mixing {
        signal,
        common,
        noise_gain: (1.0 / spec.snr).sqrt(),
    };
    let trial_gains: Vec<f64> = (0..nt)
        .map(|j| {
            let mut r = trial_rng(spec.seed, 2, j);
            (1.0 + spec.amplitude_jitter * r.sample::<f64, _>(StandardNormal)).max(0.0)
        })
        .collect();

    let movement: Vec<DMatrix<f64>> = (0..nt)
        .into_par_iter()
        .map(|j| {
            let mut r = trial_rng(spec.seed, 0, j);
            let mut x = noise_trial(spec, &mix, &mut r);
            for c in 0..nc {
                let g = mix.signal[c] * trial_gains[j];
                for s in 0..ns {
                    x[(c, s)] += g * source[s];
                }
            }
            x
        })
        .collect();
    let rest: Vec<DMatrix<f64>> = (0..nt)
        .into_par_iter()
        .map(|j| noise_trial(spec, &mix, &mut trial_rng(spec.seed, 1, j)))
        .collect();

    let names = spec.channel_names();
    let movement = EpochSet::new(movement, spec.fs, names.clone(), ClassLabel::Movement, spec.window())?;
    let rest = EpochSet::new(rest, spec.fs, names, ClassLabel::Rest, spec.window())?;
    let truth = GroundTruth {
        spec: spec.clone(),
        source,
        signal_mixing: mix.signal,
        noise_gain: mix.noise_gain,
        trial_gains,
        common_mixing: mix.common.row_iter().map(|r| r.iter().copied().collect()).collect(),
    };
    Ok(SynthDataset { movement, rest, truth })
}

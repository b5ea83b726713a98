use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit of every subband in the low-frequency decoding range.
pub const MAX_BAND_HZ: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    M1,
    M2,
    M3,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::M1 => "M1",
            Setting::M2 => "M2",
            Setting::M3 => "M3",
            Setting::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub low_hz: f64,
    pub high_hz: f64,
    pub setting: Setting,
    pub index: usize,
}

impl BandSpec {
    pub fn new(low_hz: f64, high_hz: f64, setting: Setting, index: usize) -> Result<Self> {
        if !(low_hz > 0.0 && low_hz < high_hz && high_hz <= MAX_BAND_HZ + 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "band [{low_hz}, {high_hz}] Hz must satisfy 0 < low < high <= {MAX_BAND_HZ}"
            )));
        }
        Ok(BandSpec {
            low_hz,
            high_hz,
            setting,
            index,
        })
    }

    pub fn label(&self) -> String {
        format!("{}-{} Hz", fmt_hz(self.low_hz), fmt_hz(self.high_hz))
    }
}

fn fmt_hz(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Subbands of one frequency-range setting.
///
/// * M1: equal widths `f_max / m`, the first band starting at `f_min`.
/// * M2: low edges at multiples of `0.9 * f_max / m` (the first at `f_min`),
///   high edge twice the low edge, clipped at `f_max`; with `m = 10` this is
///   0.05–0.9, 0.9–1.8, 1.8–3.6, …, 8.1–10 Hz.
/// * M3: nested bands `[f_min, k * f_max / m]`.
pub fn make_bands(setting: Setting, m: usize, f_min: f64, f_max: f64) -> Result<Vec<BandSpec>> {
    if m == 0 {
        return Err(Error::InvalidParameter("a filter bank needs m >= 1".into()));
    }
    if !(f_min > 0.0 && f_min < f_max && f_max <= MAX_BAND_HZ) {
        return Err(Error::InvalidParameter(format!(
            "frequency range [{f_min}, {f_max}] outside (0, {MAX_BAND_HZ}]"
        )));
    }
    let width = f_max / m as f64;
    let edges: Vec<(f64, f64)> = match setting {
        Setting::M1 => (0..m)
            .map(|k| {
                let lo = if k == 0 { f_min } else { k as f64 * width };
                let hi = if k + 1 == m { f_max } else { (k + 1) as f64 * width };
                (lo, hi)
            })
            .collect(),
        Setting::M2 => {
            let step = 0.9 * f_max / m as f64;
            (0..m)
                .map(|k| {
                    if k == 0 {
                        (f_min, step)
                    } else {
                        let lo = k as f64 * step;
                        (lo, (2.0 * lo).min(f_max))
                    }
                })
                .collect()
        }
        Setting::M3 => (1..=m)
            .map(|k| (f_min, if k == m { f_max } else { k as f64 * width }))
            .collect(),
        Setting::Custom => {
            return Err(Error::InvalidParameter(
                "custom bands are given explicitly, not generated".into(),
            ))
        }
    };
    edges
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            BandSpec::new(lo, hi, setting, i).map_err(|_| {
                Error::InvalidParameter(format!(
                    "{setting} with m = {m} over [{f_min}, {f_max}] Hz yields an empty band {i}"
                ))
            })
        })
        .collect()
}

/// Default low edges of the shifted grid: 0.05, 0.10, …, 0.50 Hz.
pub fn default_shifted_lows() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 20.0).collect()
}

/// Default high edges of the shifted grid: 1, 2, …, 10 Hz.
pub fn default_shifted_highs() -> Vec<f64> {
    (1..=10).map(|k| k as f64).collect()
}

/// Cartesian grid of (low, high) edges, ordered lexicographically.
pub fn make_shifted_grid(lows: &[f64], highs: &[f64]) -> Result<Vec<BandSpec>> {
    let mut pairs: Vec<(f64, f64)> = lows
        .iter()
        .flat_map(|&lo| highs.iter().map(move |&hi| (lo, hi)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| BandSpec::new(lo, hi, Setting::Custom, i))
        .collect()
}

/// Band grid as written in JSON run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandGridConfig {
    Setting {
        setting: Setting,
        m: usize,
        #[serde(default = "default_f_min")]
        f_min: f64,
        #[serde(default = "default_f_max")]
        f_max: f64,
    },
    Shifted {
        shifted_lows: Vec<f64>,
        shifted_highs: Vec<f64>,
    },
    Explicit {
        bands: Vec<(f64, f64)>,
    },
}

fn default_f_min() -> f64 {
    0.05
}

fn default_f_max() -> f64 {
    MAX_BAND_HZ
}

impl Default for BandGridConfig {
    fn default() -> Self {
        BandGridConfig::Shifted {
            shifted_lows: default_shifted_lows(),
            shifted_highs: default_shifted_highs(),
        }
    }
}

impl BandGridConfig {
    pub fn build(&self) -> Result<Vec<BandSpec>> {
        match self {
            BandGridConfig::Setting {
                setting,
                m,
                f_min,
                f_max,
            } => make_bands(*setting, *m, *f_min, *f_max),
            BandGridConfig::Shifted {
                shifted_lows,
                shifted_highs,
            } => make_shifted_grid(shifted_lows, shifted_highs),
            BandGridConfig::Explicit { bands } => bands
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| BandSpec::new(lo, hi, Setting::Custom, i))
                .collect(),
        }
    }
}

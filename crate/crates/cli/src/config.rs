//! Run configurations: defaults, JSON config files and command-line overrides.
//!
//! Precedence is flags > config file > defaults.

use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fbtrca::classify::ClassifierKind;
use fbtrca::data::EpochFormat;
use fbtrca::featsel::Selector;
use fbtrca::filterbank::{BandGridConfig, BandSpec, Setting};
use fbtrca::onset::{FitConfig, LimbConfig, RestConfig};
use fbtrca::pipeline::{CvConfig, FbtrcaOptions, Method, SweepConfig};
use fbtrca::synth::{SynthSpec, TrajectoryKind};

use crate::UsageError;

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    #[default]
    Binary,
    Csv,
}

impl From<DataFormat> for EpochFormat {
    fn from(f: DataFormat) -> Self {
        match f {
            DataFormat::Binary => EpochFormat::PackedBinary,
            DataFormat::Csv => EpochFormat::CsvDir,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthRun {
    #[serde(flatten)]
    pub spec: SynthSpec,
    pub format: DataFormat,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OnsetRun {
    pub kind: Option<TrajectoryKind>,
    pub fs: Option<f64>,
    pub limb: LimbConfig,
    pub fit: FitConfig,
    pub rest: RestConfig,
}

fn default_methods() -> Vec<Method> {
    vec![
        Method::Strca1,
        Method::Strca2,
        Method::Cvt,
        Method::Fbtrca(ClassifierKind::Lda),
        Method::Fbtrca(ClassifierKind::Svm),
        Method::Fbtrca(ClassifierKind::Nn),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchRun {
    pub methods: Vec<Method>,
    pub grid: BandGridConfig,
    pub cv: CvConfig,
    pub fbtrca: FbtrcaOptions,
}

impl Default for BenchRun {
    fn default() -> Self {
        BenchRun {
            methods: default_methods(),
            grid: BandGridConfig::default(),
            cv: CvConfig::default(),
            fbtrca: FbtrcaOptions::default(),
        }
    }
}

impl BenchRun {
    pub fn validate(&self) -> anyhow::Result<Vec<BandSpec>> {
        if self.methods.is_empty() {
            return Err(UsageError("no methods requested".into()).into());
        }
        if self.methods.contains(&Method::Strca) {
            return Err(UsageError("use strca1 or strca2; custom single bands are not benchmarked".into()).into());
        }
        let grid = self.grid.build()?;
        self.cv.validate()?;
        self.fbtrca.validate(grid.len())?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepRun {
    pub grid: BandGridConfig,
    pub cv: CvConfig,
    pub sweep: SweepConfig,
}

impl SweepRun {
    pub fn validate(&self) -> anyhow::Result<Vec<BandSpec>> {
        let grid = self.grid.build()?;
        self.cv.validate()?;
        self.sweep.classifier.validate()?;
        if self.sweep.selectors.is_empty() || self.sweep.classifiers.is_empty() {
            return Err(UsageError("sweep needs at least one selector and one classifier".into()).into());
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareRun {
    pub settings: Vec<Setting>,
    pub m: usize,
    pub cv: CvConfig,
}

impl Default for CompareRun {
    fn default() -> Self {
        CompareRun {
            settings: vec![Setting::M1, Setting::M2, Setting::M3],
            m: 10,
            cv: CvConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportRun {
    pub grid: BandGridConfig,
}

/// Comma-separated list parsed item by item.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| UsageError(e.to_string()).into()))
        .collect()
}

pub fn parse_selectors(s: &str) -> anyhow::Result<Vec<Selector>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Selector::ALL.to_vec());
    }
    parse_list(s)
}

pub fn parse_setting(s: &str) -> anyhow::Result<Setting> {
    match s.to_ascii_uppercase().as_str() {
        "M1" => Ok(Setting::M1),
        "M2" => Ok(Setting::M2),
        "M3" => Ok(Setting::M3),
        _ => Err(UsageError(format!("unknown setting '{s}' (expected M1, M2 or M3)")).into()),
    }
}

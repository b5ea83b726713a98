use std::fs;
use std::path::Path;

use anyhow::Context;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use fbtrca::classify::ClassifierKind;
use fbtrca::data::{export_features as write_features, load_dataset, save_dataset, EpochSet, FeatureMatrix, Trajectory};
use fbtrca::featsel::{ArrangementPlan, Selector};
use fbtrca::filterbank::{apply_design, design_butterworth, BandGridConfig, BandSpec, PAD_SECONDS};
use fbtrca::onset::{fake_onset_rest, locate_onset_fit, locate_onset_limb, write_onset_report, OnsetStatus};
use fbtrca::pipeline::{
    self, compare_settings as run_compare, run_benchmark, write_results_csv, AuditLog, CvConfig, Folds,
};
use fbtrca::strca::{trca_filter, DEFAULT_COMPONENTS};
use fbtrca::synth::{generate, TrajectoryKind};

use crate::config::{self, parse_list, parse_selectors, parse_setting, BenchRun, CompareRun, DataFormat, ExportRun, OnsetRun, SweepRun, SynthRun};
use crate::{BenchArgs, CompareArgs, DataArgs, ExportArgs, GridArgs, OnsetArgs, SweepArgs, SynthArgs, UsageError};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Config echo heading every JSON output.
#[derive(Serialize)]
struct Echo<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    #[serde(flatten)]
    report: R,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn out_dir(p: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(p).with_context(|| format!("creating output directory {}", p.display()))
}

fn apply_cv(cv: &mut CvConfig, seed: Option<u64>, d: &DataArgs) {
    if let Some(s) = seed {
        cv.seed = s;
    }
    if let Some(k) = d.outer_folds {
        cv.outer_folds = k;
    }
    if let Some(k) = d.inner_folds {
        cv.inner_folds = k;
    }
    if d.no_shuffle {
        cv.shuffle = false;
    }
}

fn apply_grid(grid: &mut BandGridConfig, a: &GridArgs) -> anyhow::Result<()> {
    if let Some(g) = &a.grid {
        *grid = if g.eq_ignore_ascii_case("shifted") {
            BandGridConfig::default()
        } else {
            BandGridConfig::Setting {
                setting: parse_setting(g)?,
                m: a.bands.unwrap_or(10),
                f_min: 0.05,
                f_max: fbtrca::filterbank::MAX_BAND_HZ,
            }
        };
    } else if let Some(n) = a.bands {
        match grid {
            BandGridConfig::Setting { m, .. } => *m = n,
            _ => return Err(UsageError("--bands applies to m1/m2/m3 grids".into()).into()),
        }
    }
    Ok(())
}

fn load_data(dir: &Path) -> anyhow::Result<(EpochSet, EpochSet)> {
    load_dataset(dir).with_context(|| format!("loading dataset {}", dir.display()))
}

pub fn synth(a: SynthArgs) -> anyhow::Result<()> {
    let mut run: SynthRun = config::load(a.common.config.as_deref())?;
    let s = &mut run.spec;
    if let Some(v) = a.channels {
        s.n_channels = v;
    }
    if let Some(v) = a.samples {
        s.n_samples = v;
    }
    if let Some(v) = a.trials {
        s.n_trials = v;
    }
    if let Some(v) = a.fs {
        s.fs = v;
    }
    if let Some(v) = a.snr {
        s.snr = v;
    }
    if let Some(v) = a.band_low {
        s.template_band.0 = v;
    }
    if let Some(v) = a.band_high {
        s.template_band.1 = v;
    }
    if let Some(v) = a.common.seed {
        s.seed = v;
    }
    if let Some(f) = &a.format {
        run.format = match f.to_ascii_lowercase().as_str() {
            "binary" => DataFormat::Binary,
            "csv" => DataFormat::Csv,
            _ => return Err(UsageError(format!("unknown format '{f}' (expected binary or csv)")).into()),
        };
    }
    run.spec.validate()?;
    let d = generate(&run.spec)?;
    out_dir(&a.common.out)?;
    save_dataset(&a.common.out, &d.movement, &d.rest, run.format.into())?;
    d.truth.write(&a.common.out.join("truth.json"))?;
    write_json(
        &a.common.out.join("config.json"),
        &Echo { command: "synth", version: VERSION, config: &run, report: () },
    )
}

fn read_trajectories(path: &Path, fs_hz: f64) -> anyhow::Result<Vec<Trajectory>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let samples = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| UsageError(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(Trajectory::new(samples, fs_hz, i)?);
    }
    if out.is_empty() {
        return Err(UsageError(format!("{} holds no trajectories", path.display())).into());
    }
    Ok(out)
}

pub fn onset(a: OnsetArgs) -> anyhow::Result<()> {
    let mut run: OnsetRun = config::load(a.common.config.as_deref())?;
    if let Some(k) = &a.kind {
        run.kind = Some(match k.to_ascii_lowercase().as_str() {
            "limb" => TrajectoryKind::Limb,
            "hand" => TrajectoryKind::Hand,
            "rest" => TrajectoryKind::Rest,
            _ => return Err(UsageError(format!("unknown trajectory kind '{k}'")).into()),
        });
    }
    if a.fs.is_some() {
        run.fs = a.fs;
    }
    let kind = run.kind.ok_or_else(|| UsageError("--kind is required".into()))?;
    let fs_hz = run.fs.ok_or_else(|| UsageError("--fs is required".into()))?;
    let trajectories = read_trajectories(&a.input, fs_hz)?;
    let results = trajectories
        .iter()
        .map(|t| match kind {
            TrajectoryKind::Limb => locate_onset_limb(t, &run.limb),
            TrajectoryKind::Hand => locate_onset_fit(t, &run.fit),
            TrajectoryKind::Rest => fake_onset_rest(t, &run.rest),
        })
        .collect::<Result<Vec<_>, _>>()?;
    out_dir(&a.common.out)?;
    write_onset_report(&results, &a.common.out.join("onsets.csv"))?;
    #[derive(Serialize)]
    struct Report<'a> {
        accepted: usize,
        results: &'a [fbtrca::onset::OnsetResult],
    }
    let accepted = results.iter().filter(|r| r.status == OnsetStatus::Accepted).count();
    write_json(
        &a.common.out.join("onsets.json"),
        &Echo { command: "onset", version: VERSION, config: &run, report: Report { accepted, results: &results } },
    )
}

fn apply_plan(plan: &mut ArrangementPlan, a: &BenchArgs) -> anyhow::Result<()> {
    let kind = match &a.arrangement {
        Some(s) => s.to_ascii_lowercase(),
        None => match (a.k1, a.k2) {
            (Some(_), Some(_)) => return Err(UsageError("give --k1 or --k2, not both, without --arrangement".into()).into()),
            (Some(_), None) => "type1".into(),
            (None, Some(_)) => "type2".into(),
            (None, None) => return Ok(()),
        },
    };
    *plan = match kind.as_str() {
        "type1" => {
            let current = match *plan {
                ArrangementPlan::Type1 { k1 } => Some(k1),
                _ => None,
            };
            let k1 = a
                .k1
                .or(current)
                .ok_or_else(|| UsageError("--k1 is required with --arrangement type1".into()))?;
            ArrangementPlan::Type1 { k1 }
        }
        "type2" => {
            let current = match *plan {
                ArrangementPlan::Type2 { k2 } => Some(k2),
                _ => None,
            };
            ArrangementPlan::Type2 { k2: a.k2.or(current).unwrap_or(13) }
        }
        _ => return Err(UsageError(format!("unknown arrangement '{kind}' (expected type1 or type2)")).into()),
    };
    Ok(())
}

fn pooled_labels(movement: &EpochSet, rest: &EpochSet) -> Vec<u8> {
    let mut l = vec![1u8; movement.n_trials()];
    l.extend(vec![0u8; rest.n_trials()]);
    l
}

#[derive(Serialize)]
struct DatasetInfo {
    path: String,
    movement_trials: usize,
    rest_trials: usize,
    channels: usize,
    samples: usize,
    fs: f64,
}

impl DatasetInfo {
    fn new(path: &Path, m: &EpochSet, r: &EpochSet) -> Self {
        DatasetInfo {
            path: path.display().to_string(),
            movement_trials: m.n_trials(),
            rest_trials: r.n_trials(),
            channels: m.n_channels(),
            samples: m.n_samples(),
            fs: m.fs(),
        }
    }
}

pub fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let mut run: BenchRun = config::load(a.common.config.as_deref())?;
    if let Some(m) = &a.methods {
        run.methods = parse_list(m)?;
    }
    if let Some(s) = &a.selector {
        run.fbtrca.selector = s.parse::<Selector>().map_err(|e| UsageError(e.to_string()))?;
    }
    apply_plan(&mut run.fbtrca.plan, &a)?;
    if a.bins.is_some() {
        run.fbtrca.bins = a.bins;
    }
    apply_cv(&mut run.cv, a.common.seed, &a.data);
    apply_grid(&mut run.grid, &a.grid)?;
    let grid = run.validate()?;
    let (m, r) = load_data(&a.data.data)?;

    let log = AuditLog::new();
    let results = run_benchmark(&m, &r, &grid, &run.methods, &run.fbtrca, &run.cv, &log)?;
    let folds = Folds::new(&pooled_labels(&m, &r), &run.cv)?;

    #[derive(Serialize)]
    struct Audit {
        fit_accesses: usize,
        held_out_reads: usize,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        dataset: DatasetInfo,
        aggregation: &'a str,
        audit: Audit,
        results: &'a [pipeline::BenchmarkResult],
    }
    out_dir(&a.common.out)?;
    write_results_csv(&results, &a.common.out.join("results.csv"))?;
    write_json(
        &a.common.out.join("results.json"),
        &Echo {
            command: "bench",
            version: VERSION,
            config: &run,
            report: Report {
                dataset: DatasetInfo::new(&a.data.data, &m, &r),
                aggregation: "mean and sample sd over the outer folds of this one dataset",
                audit: Audit {
                    fit_accesses: log.len(),
                    held_out_reads: log.violations(&folds).len(),
                },
                results: &results,
            },
        },
    )
}

pub fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    let mut run: SweepRun = config::load(a.common.config.as_deref())?;
    if let Some(s) = &a.selectors {
        run.sweep.selectors = parse_selectors(s)?;
    }
    if let Some(s) = &a.classifiers {
        run.sweep.classifiers = parse_list::<ClassifierKind>(s)?;
    }
    if let Some(k) = a.k1_max {
        run.sweep.k1_max = k;
    }
    if let Some(k) = a.k2_max {
        run.sweep.k2_max = k;
    }
    if a.bins.is_some() {
        run.sweep.bins = a.bins;
    }
    apply_cv(&mut run.cv, a.common.seed, &a.data);
    apply_grid(&mut run.grid, &a.grid)?;
    let grid = run.validate()?;
    let (m, r) = load_data(&a.data.data)?;
    let table = pipeline::sweep(&m, &r, &grid, &run.sweep, &run.cv)?;

    #[derive(Serialize)]
    struct Best {
        selector: Selector,
        arrangement: &'static str,
        classifier: ClassifierKind,
        k: usize,
        mean: f64,
        sd: f64,
    }
    let mut best = Vec::new();
    for &selector in &run.sweep.selectors {
        for (arrangement, type1) in [("type1", true), ("type2", false)] {
            for &classifier in &run.sweep.classifiers {
                let row = table.best(selector, type1, classifier).expect("sweep rows present");
                let k = match row.plan {
                    ArrangementPlan::Type1 { k1 } => k1,
                    ArrangementPlan::Type2 { k2 } => k2,
                };
                best.push(Best { selector, arrangement, classifier, k, mean: row.mean, sd: row.sd });
            }
        }
    }
    out_dir(&a.common.out)?;
    table.write_csv(&a.common.out.join("sweep.csv"))?;
    let mut csv = String::from("selector,arrangement,classifier,k,mean,sd\n");
    for b in &best {
        csv.push_str(&format!("{},{},{},{},{},{}\n", b.selector, b.arrangement, b.classifier, b.k, b.mean, b.sd));
    }
    fs::write(a.common.out.join("best_k.csv"), csv)?;

    #[derive(Serialize)]
    struct Report<'a> {
        dataset: DatasetInfo,
        best: &'a [Best],
        rows: &'a [pipeline::SweepRow],
    }
    write_json(
        &a.common.out.join("sweep.json"),
        &Echo {
            command: "sweep",
            version: VERSION,
            config: &run,
            report: Report { dataset: DatasetInfo::new(&a.data.data, &m, &r), best: &best, rows: &table.rows },
        },
    )
}

pub fn compare_settings(a: CompareArgs) -> anyhow::Result<()> {
    let mut run: CompareRun = config::load(a.common.config.as_deref())?;
    if let Some(s) = &a.settings {
        run.settings = s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_setting(x.trim())).collect::<anyhow::Result<_>>()?;
    }
    if let Some(m) = a.m {
        run.m = m;
    }
    apply_cv(&mut run.cv, a.common.seed, &a.data);
    run.cv.validate()?;
    if run.settings.is_empty() || run.m == 0 {
        return Err(UsageError("need at least one setting and one band".into()).into());
    }
    let (m, r) = load_data(&a.data.data)?;
    let rows = run_compare(&m, &r, &run.settings, run.m, &run.cv)?;
    out_dir(&a.common.out)?;
    let mut csv = String::from("setting,band_index,low_hz,high_hz,mean,sd\n");
    for x in &rows {
        csv.push_str(&format!("{},{},{},{},{},{}\n", x.setting, x.band_index, x.low_hz, x.high_hz, x.mean, x.sd));
    }
    fs::write(a.common.out.join("settings.csv"), csv)?;
    #[derive(Serialize)]
    struct Report<'a> {
        dataset: DatasetInfo,
        rows: &'a [pipeline::SettingRow],
    }
    write_json(
        &a.common.out.join("settings.json"),
        &Echo {
            command: "compare-settings",
            version: VERSION,
            config: &run,
            report: Report { dataset: DatasetInfo::new(&a.data.data, &m, &r), rows: &rows },
        },
    )
}

/// Features of every trial (movement first) under a model fitted on all trials of one band.
fn band_features(band: &BandSpec, m: &EpochSet, r: &EpochSet) -> fbtrca::Result<DMatrix<f64>> {
    let design = design_butterworth(band, m.fs())?;
    let pad = (PAD_SECONDS * m.fs()).round() as usize;
    let (fm, fr) = (apply_design(&design, m, pad)?, apply_design(&design, r, pad)?);
    let model = trca_filter(&fm, &fr, DEFAULT_COMPONENTS)?;
    let (a, b) = (model.features(&fm)?, model.features(&fr)?);
    Ok(DMatrix::from_fn(a.nrows() + b.nrows(), 6, |i, j| {
        if i < a.nrows() {
            a[(i, j)]
        } else {
            b[(i - a.nrows(), j)]
        }
    }))
}

pub fn export_features(a: ExportArgs) -> anyhow::Result<()> {
    let mut run: ExportRun = config::load(a.common.config.as_deref())?;
    apply_grid(&mut run.grid, &a.grid)?;
    let grid = run.grid.build()?;
    let (m, r) = load_data(&a.data)?;
    let per_band = grid
        .par_iter()
        .map(|b| band_features(b, &m, &r))
        .collect::<fbtrca::Result<Vec<_>>>()?;
    let n = m.n_trials() + r.n_trials();
    let values = DMatrix::from_fn(n, 6 * grid.len(), |i, j| per_band[j / 6][(i, j % 6)]);
    let features = FeatureMatrix::band_major(values, pooled_labels(&m, &r))?;
    out_dir(&a.common.out)?;
    write_features(&features, &a.common.out.join("features.csv"))?;
    #[derive(Serialize)]
    struct Report<'a> {
        dataset: DatasetInfo,
        bands: &'a [BandSpec],
    }
    write_json(
        &a.common.out.join("features.json"),
        &Echo {
            command: "export-features",
            version: VERSION,
            config: &run,
            report: Report { dataset: DatasetInfo::new(&a.data, &m, &r), bands: &grid },
        },
    )
}

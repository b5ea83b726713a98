//! Cross-validated benchmarks of STRCA, CVT and FBTRCA.

pub mod audit;
mod engine;
pub mod folds;

pub use audit::{Access, AuditEntry, AuditLog, Stage};
pub use folds::{stratified_folds, CvConfig, Folds};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classify::{train, ClassifierConfig, ClassifierKind};
use crate::data::{EpochSet, FeatureMatrix};
use crate::error::{Error, Result};
use crate::featsel::{select_arrangement, ArrangementPlan, Selection, Selector};
use crate::filterbank::{make_bands, BandSpec, Setting, MAX_BAND_HZ};
use engine::{BandOutcome, BandWork, Context, Pooled};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    /// STRCA on a caller-chosen band.
    Strca,
    Strca1,
    Strca2,
    Cvt,
    Fbtrca(ClassifierKind),
}

impl Method {
    pub fn name(self) -> String {
        match self {
            Method::Strca => "STRCA".into(),
            Method::Strca1 => "STRCA1".into(),
            Method::Strca2 => "STRCA2".into(),
            Method::Cvt => "CVT".into(),
            Method::Fbtrca(k) => format!("FBTRCA-{}", k.name().to_uppercase()),
        }
    }

    /// Fixed band of the single-band baselines.
    pub fn band(self) -> Option<BandSpec> {
        match self {
            Method::Strca1 => Some(strca1_band()),
            Method::Strca2 => Some(strca2_band()),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `strca1`, `cvt`, `fbtrca:svm`, `FBTRCA-SVM` and the like.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "strca" => return Ok(Method::Strca),
            "strca1" => return Ok(Method::Strca1),
            "strca2" => return Ok(Method::Strca2),
            "cvt" => return Ok(Method::Cvt),
            _ => {}
        }
        if let Some(kind) = t.strip_prefix("fbtrca:").or_else(|| t.strip_prefix("fbtrca-")) {
            return Ok(Method::Fbtrca(kind.parse()?));
        }
        Err(Error::InvalidParameter(format!(
            "unknown method '{s}' (expected strca1, strca2, cvt or fbtrca:{{lda,svm,nn}})"
        )))
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

pub fn strca1_band() -> BandSpec {
    BandSpec::new(0.5, MAX_BAND_HZ, Setting::Custom, 0).expect("valid band")
}

pub fn strca2_band() -> BandSpec {
    BandSpec::new(0.05, MAX_BAND_HZ, Setting::Custom, 0).expect("valid band")
}

/// Selection and classifier settings of FBTRCA runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FbtrcaOptions {
    pub selector: Selector,
    pub plan: ArrangementPlan,
    /// Equal-frequency bins of the MI estimates; `None` picks from the sample size.
    pub bins: Option<usize>,
    pub classifier: ClassifierConfig,
}

impl Default for FbtrcaOptions {
    fn default() -> Self {
        FbtrcaOptions {
            selector: Selector::Mrmr,
            plan: ArrangementPlan::default(),
            bins: None,
            classifier: ClassifierConfig::default(),
        }
    }
}

impl FbtrcaOptions {
    pub fn validate(&self, n_bands: usize) -> Result<()> {
        self.classifier.validate()?;
        let ok = match self.plan {
            ArrangementPlan::Type1 { k1 } => (1..=n_bands).contains(&k1),
            ArrangementPlan::Type2 { k2 } => (1..=6 * n_bands).contains(&k2),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "{:?} does not fit a grid of {n_bands} bands",
                self.plan
            )));
        }
        if self.bins.is_some_and(|b| b < 2) {
            return Err(Error::InvalidParameter("MI estimates need at least 2 bins".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub method: Method,
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1) of the fold accuracies.
    pub sd: f64,
    /// Mean wall-clock seconds per fold spent in feature selection.
    pub feature_selection_seconds: f64,
    pub strca_trainings_per_fold: usize,
    /// Features fed to the classifier.
    pub n_features: usize,
    /// Band chosen in each outer fold (CVT), or the fixed band (STRCA).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bands: Vec<BandSpec>,
}

impl BenchmarkResult {
    fn new(method: Method, per_fold_accuracy: Vec<f64>) -> Self {
        let (mean, sd) = mean_sd(&per_fold_accuracy);
        BenchmarkResult {
            method,
            per_fold_accuracy,
            mean,
            sd,
            feature_selection_seconds: 0.0,
            strca_trainings_per_fold: 1,
            n_features: 6,
            bands: Vec::new(),
        }
    }
}

/// Arithmetic mean and sample standard deviation; sd is 0 below two values.
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Table summary with one row per result.
pub fn write_results_csv(results: &[BenchmarkResult], path: &Path) -> Result<()> {
    let mut s = String::from("method,mean,sd,folds,n_features,strca_trainings_per_fold,feature_selection_seconds\n");
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.method,
            r.mean,
            r.sd,
            r.per_fold_accuracy.len(),
            r.n_features,
            r.strca_trainings_per_fold,
            r.feature_selection_seconds
        ));
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

fn same_band(a: &BandSpec, b: &BandSpec) -> bool {
    (a.low_hz - b.low_hz).abs() < 1e-9 && (a.high_hz - b.high_hz).abs() < 1e-9
}

/// Run several methods on one dataset, sharing filtered bands and fold models.
///
/// Every training access is recorded in `log` and refused with
/// [`Error::Leakage`] if it touches a held-out trial.
pub fn run_benchmark(
    movement: &EpochSet,
    rest: &EpochSet,
    grid: &[BandSpec],
    methods: &[Method],
    opts: &FbtrcaOptions,
    cfg: &CvConfig,
    log: &AuditLog,
) -> Result<Vec<BenchmarkResult>> {
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    if methods.contains(&Method::Strca) {
        return Err(Error::InvalidParameter(
            "STRCA on a custom band runs through run_strca".into(),
        ));
    }
    let needs_grid = methods.iter().any(|m| matches!(m, Method::Cvt | Method::Fbtrca(_)));
    if needs_grid {
        if grid.is_empty() {
            return Err(Error::InvalidParameter("empty band grid".into()));
        }
        if methods.iter().any(|m| matches!(m, Method::Fbtrca(_))) {
            opts.validate(grid.len())?;
        }
    }
    let data = Pooled::new(movement, rest)?;
    let folds = Folds::new(&data.labels, cfg)?;
    let ctx = Context {
        data: &data,
        folds: &folds,
        log,
    };

    let mut bands: Vec<BandSpec> = Vec::new();
    let mut work: Vec<BandWork> = Vec::new();
    if needs_grid {
        let outer = methods.iter().any(|m| matches!(m, Method::Fbtrca(_)));
        let inner = methods.contains(&Method::Cvt);
        bands.extend_from_slice(grid);
        work.extend(std::iter::repeat(BandWork { outer, inner }).take(grid.len()));
    }
    for b in methods.iter().filter_map(|m| m.band()) {
        match bands.iter().position(|x| same_band(x, &b)) {
            Some(p) => work[p].outer = true,
            None => {
                bands.push(b);
                work.push(BandWork { outer: true, inner: false });
            }
        }
    }
    let mut outcomes = ctx.run_bands(&bands, &work)?;

    let mut results = Vec::with_capacity(methods.len());
    for &method in methods {
        let r = match method {
            Method::Strca1 | Method::Strca2 => {
                let band = method.band().expect("fixed band");
                let p = bands.iter().position(|x| same_band(x, &band)).expect("band scheduled");
                let mut r = single_band(&ctx, &outcomes[p].outer, p, method)?;
                r.bands = vec![band];
                r
            }
            Method::Cvt => cvt(&ctx, grid, &mut outcomes[..grid.len()])?,
            Method::Fbtrca(kind) => fbtrca(&ctx, &outcomes[..grid.len()], kind, opts, cfg)?,
            Method::Strca => unreachable!("rejected above"),
        };
        results.push(r);
    }
    Ok(results)
}

fn single_band(ctx: &Context, feats: &[DMatrix<f64>], position: usize, method: Method) -> Result<BenchmarkResult> {
    let acc = (0..ctx.folds.n_outer())
        .map(|f| {
            ctx.lda_accuracy(
                &feats[f],
                &ctx.folds.train(f),
                &ctx.folds.test(f),
                ctx.access(Stage::Classifier, f, None, Some(position)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkResult::new(method, acc))
}

/// Grid position with the best inner score in outer fold `f`; lower index wins ties.
fn best_band(outcomes: &[BandOutcome], f: usize) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (p, o) in outcomes.iter().enumerate() {
        let s = o.inner_score.as_ref().expect("inner scores computed")[f];
        if s > best.1 {
            best = (p, s);
        }
    }
    best.0
}

fn cvt(ctx: &Context, grid: &[BandSpec], outcomes: &mut [BandOutcome]) -> Result<BenchmarkResult> {
    let k = ctx.folds.n_outer();
    let chosen: Vec<usize> = (0..k).map(|f| best_band(outcomes, f)).collect();
    // retrain the chosen band on each full training split unless already done
    let mut by_band: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (f, &p) in chosen.iter().enumerate() {
        if outcomes[p].outer.is_empty() {
            by_band.entry(p).or_default().push(f);
        }
    }
    let mut fresh: BTreeMap<(usize, usize), DMatrix<f64>> = BTreeMap::new();
    for (&p, fs) in &by_band {
        for (&f, m) in fs.iter().zip(ctx.fold_features(&grid[p], p, fs)?) {
            fresh.insert((p, f), m);
        }
    }
    let mut acc = Vec::with_capacity(k);
    for (f, &p) in chosen.iter().enumerate() {
        let feats = fresh.get(&(p, f)).unwrap_or_else(|| &outcomes[p].outer[f]);
        acc.push(ctx.lda_accuracy(
            feats,
            &ctx.folds.train(f),
            &ctx.folds.test(f),
            ctx.access(Stage::Classifier, f, None, Some(p)),
        )?);
    }
    let mut r = BenchmarkResult::new(Method::Cvt, acc);
    r.strca_trainings_per_fold = grid.len() * ctx.folds.n_inner() + 1;
    r.bands = chosen.iter().map(|&p| grid[p]).collect();
    Ok(r)
}

/// Trials × 6m table of outer fold `f`, band-major in grid order.
fn fold_table(outcomes: &[BandOutcome], f: usize, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), 6 * outcomes.len(), |i, j| outcomes[j / 6].outer[f][(rows[i], j % 6)])
}

/// Selection on the training rows of fold `f`, timed.
fn select_fold(
    ctx: &Context,
    outcomes: &[BandOutcome],
    f: usize,
    plan: ArrangementPlan,
    method: Selector,
    bins: Option<usize>,
) -> Result<(Selection, f64)> {
    let train_idx = ctx.folds.train(f);
    ctx.log
        .record_checked(ctx.folds, ctx.access(Stage::Selection, f, None, None), &train_idx)?;
    let table = FeatureMatrix::band_major(fold_table(outcomes, f, &train_idx), ctx.data.labels_of(&train_idx))?;
    let start = Instant::now();
    let s = select_arrangement(&table, plan, method, bins)?;
    Ok((s, start.elapsed().as_secs_f64()))
}

fn classify_fold(
    ctx: &Context,
    outcomes: &[BandOutcome],
    f: usize,
    columns: &[usize],
    kind: ClassifierKind,
    ccfg: &ClassifierConfig,
) -> Result<f64> {
    let train_idx = ctx.folds.train(f);
    let test_idx = ctx.folds.test(f);
    ctx.log
        .record_checked(ctx.folds, ctx.access(Stage::Classifier, f, None, None), &train_idx)?;
    let x = fold_table(outcomes, f, &train_idx).select_columns(columns);
    let c = train(kind, &x, &ctx.data.labels_of(&train_idx), ccfg)?;
    let xt = fold_table(outcomes, f, &test_idx).select_columns(columns);
    Ok(c.predict(&xt)?.accuracy(&ctx.data.labels_of(&test_idx)))
}

fn fold_classifier_config(opts: &FbtrcaOptions, cfg: &CvConfig, f: usize) -> ClassifierConfig {
    ClassifierConfig {
        seed: cfg.seed.wrapping_add(opts.classifier.seed).wrapping_add(f as u64),
        ..opts.classifier
    }
}

fn fbtrca(
    ctx: &Context,
    outcomes: &[BandOutcome],
    kind: ClassifierKind,
    opts: &FbtrcaOptions,
    cfg: &CvConfig,
) -> Result<BenchmarkResult> {
    let k = ctx.folds.n_outer();
    let mut acc = Vec::with_capacity(k);
    let mut seconds = 0.0;
    for f in 0..k {
        let (sel, t) = select_fold(ctx, outcomes, f, opts.plan, opts.selector, opts.bins)?;
        seconds += t;
        acc.push(classify_fold(ctx, outcomes, f, &sel.columns, kind, &fold_classifier_config(opts, cfg, f))?);
    }
    let mut r = BenchmarkResult::new(Method::Fbtrca(kind), acc);
    r.feature_selection_seconds = seconds / k as f64;
    r.strca_trainings_per_fold = outcomes.len();
    r.n_features = opts.plan.n_selected();
    Ok(r)
}

/// STRCA with LDA on one band.
pub fn run_strca(movement: &EpochSet, rest: &EpochSet, band: BandSpec, cfg: &CvConfig) -> Result<BenchmarkResult> {
    let log = AuditLog::new();
    let data = Pooled::new(movement, rest)?;
    let folds = Folds::new(&data.labels, cfg)?;
    let ctx = Context {
        data: &data,
        folds: &folds,
        log: &log,
    };
    let method = if same_band(&band, &strca1_band()) {
        Method::Strca1
    } else if same_band(&band, &strca2_band()) {
        Method::Strca2
    } else {
        Method::Strca
    };
    let o = ctx.run_band(&band, 0, BandWork { outer: true, inner: false })?;
    let mut r = single_band(&ctx, &o.outer, 0, method)?;
    r.bands = vec![band];
    Ok(r)
}

pub fn run_cvt(movement: &EpochSet, rest: &EpochSet, grid: &[BandSpec], cfg: &CvConfig) -> Result<BenchmarkResult> {
    let log = AuditLog::new();
    let r = run_benchmark(movement, rest, grid, &[Method::Cvt], &FbtrcaOptions::default(), cfg, &log)?;
    Ok(r.into_iter().next().expect("one result"))
}

pub fn run_fbtrca(
    movement: &EpochSet,
    rest: &EpochSet,
    grid: &[BandSpec],
    kind: ClassifierKind,
    opts: &FbtrcaOptions,
    cfg: &CvConfig,
) -> Result<BenchmarkResult> {
    let log = AuditLog::new();
    let r = run_benchmark(movement, rest, grid, &[Method::Fbtrca(kind)], opts, cfg, &log)?;
    Ok(r.into_iter().next().expect("one result"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingRow {
    pub setting: Setting,
    pub band_index: usize,
    pub low_hz: f64,
    pub high_hz: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Per-band STRCA+LDA accuracy of each frequency-range setting with `m` bands over 0.05–10 Hz.
pub fn compare_settings(
    movement: &EpochSet,
    rest: &EpochSet,
    settings: &[Setting],
    m: usize,
    cfg: &CvConfig,
) -> Result<Vec<SettingRow>> {
    let mut bands = Vec::new();
    for &s in settings {
        bands.extend(make_bands(s, m, 0.05, MAX_BAND_HZ)?);
    }
    if bands.is_empty() {
        return Err(Error::InvalidParameter("no settings requested".into()));
    }
    let log = AuditLog::new();
    let data = Pooled::new(movement, rest)?;
    let folds = Folds::new(&data.labels, cfg)?;
    let ctx = Context {
        data: &data,
        folds: &folds,
        log: &log,
    };
    let work = vec![BandWork { outer: true, inner: false }; bands.len()];
    let outcomes = ctx.run_bands(&bands, &work)?;
    bands
        .iter()
        .zip(&outcomes)
        .enumerate()
        .map(|(p, (b, o))| {
            let r = single_band(&ctx, &o.outer, p, Method::Strca)?;
            Ok(SettingRow {
                setting: b.setting,
                band_index: b.index,
                low_hz: b.low_hz,
                high_hz: b.high_hz,
                mean: r.mean,
                sd: r.sd,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub selectors: Vec<Selector>,
    pub classifiers: Vec<ClassifierKind>,
    pub k1_max: usize,
    pub k2_max: usize,
    pub bins: Option<usize>,
    pub classifier: ClassifierConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            selectors: Selector::ALL.to_vec(),
            classifiers: ClassifierKind::ALL.to_vec(),
            k1_max: 5,
            k2_max: 30,
            bins: None,
            classifier: ClassifierConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub selector: Selector,
    pub plan: ArrangementPlan,
    pub classifier: ClassifierKind,
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Mean seconds per fold to rank up to the largest K of this arrangement.
    pub selection_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Row with the highest mean for one selector, arrangement type and
    /// classifier; the smaller K wins ties.
    pub fn best(&self, selector: Selector, type1: bool, classifier: ClassifierKind) -> Option<&SweepRow> {
        let mut best: Option<&SweepRow> = None;
        for r in self.rows.iter().filter(|r| {
            r.selector == selector
                && r.classifier == classifier
                && matches!(r.plan, ArrangementPlan::Type1 { .. }) == type1
        }) {
            if best.map_or(true, |b| r.mean > b.mean) {
                best = Some(r);
            }
        }
        best
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut s = String::from("selector,arrangement,k,classifier,mean,sd,selection_seconds\n");
        for r in &self.rows {
            let (t, k) = match r.plan {
                ArrangementPlan::Type1 { k1 } => ("type1", k1),
                ArrangementPlan::Type2 { k2 } => ("type2", k2),
            };
            s.push_str(&format!(
                "{},{t},{k},{},{},{},{}\n",
                r.selector, r.classifier, r.mean, r.sd, r.selection_seconds
            ));
        }
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }
}

/// Columns of the first `k` picks of each group of a selection ranked to a larger K.
fn prefix_columns(sel: &Selection, k: usize) -> Vec<usize> {
    sel.groups
        .iter()
        .zip(&sel.rankings)
        .flat_map(|(g, r)| r.order[..k].iter().map(move |&i| g[i]))
        .collect()
}

/// Accuracy against K for every selector, arrangement type and classifier.
///
/// Rankings are computed once at the largest K; greedy and weight-sorted
/// rankings are prefix-consistent, so smaller K reuse their prefixes.
pub fn sweep(
    movement: &EpochSet,
    rest: &EpochSet,
    grid: &[BandSpec],
    sc: &SweepConfig,
    cfg: &CvConfig,
) -> Result<SweepTable> {
    if sc.selectors.is_empty() || sc.classifiers.is_empty() {
        return Err(Error::InvalidParameter("sweep needs selectors and classifiers".into()));
    }
    if sc.k1_max == 0 || sc.k1_max > grid.len() || sc.k2_max == 0 || sc.k2_max > 6 * grid.len() {
        return Err(Error::InvalidParameter(format!(
            "K1 up to {} and K2 up to {} do not fit a grid of {} bands",
            sc.k1_max,
            sc.k2_max,
            grid.len()
        )));
    }
    sc.classifier.validate()?;
    let log = AuditLog::new();
    let data = Pooled::new(movement, rest)?;
    let folds = Folds::new(&data.labels, cfg)?;
    let ctx = Context {
        data: &data,
        folds: &folds,
        log: &log,
    };
    let work = vec![BandWork { outer: true, inner: false }; grid.len()];
    let outcomes = ctx.run_bands(grid, &work)?;
    let n_folds = folds.n_outer();
    let plans = [
        (ArrangementPlan::Type1 { k1: sc.k1_max }, sc.k1_max),
        (ArrangementPlan::Type2 { k2: sc.k2_max }, sc.k2_max),
    ];

    let mut rows = Vec::new();
    for &selector in &sc.selectors {
        for &(plan, kmax) in &plans {
            let mut acc = vec![vec![Vec::with_capacity(n_folds); sc.classifiers.len()]; kmax];
            let mut seconds = 0.0;
            for f in 0..n_folds {
                let (sel, t) = select_fold(&ctx, &outcomes, f, plan, selector, sc.bins)?;
                seconds += t;
                let opts = FbtrcaOptions {
                    classifier: sc.classifier,
                    ..FbtrcaOptions::default()
                };
                let ccfg = fold_classifier_config(&opts, cfg, f);
                for (ki, per_k) in acc.iter_mut().enumerate() {
                    let cols = prefix_columns(&sel, ki + 1);
                    for (ci, &kind) in sc.classifiers.iter().enumerate() {
                        per_k[ci].push(classify_fold(&ctx, &outcomes, f, &cols, kind, &ccfg)?);
                    }
                }
            }
            for (ki, per_k) in acc.into_iter().enumerate() {
                let plan = match plan {
                    ArrangementPlan::Type1 { .. } => ArrangementPlan::Type1 { k1: ki + 1 },
                    ArrangementPlan::Type2 { .. } => ArrangementPlan::Type2 { k2: ki + 1 },
                };
                for (ci, a) in per_k.into_iter().enumerate() {
                    let (mean, sd) = mean_sd(&a);
                    rows.push(SweepRow {
                        selector,
                        plan,
                        classifier: sc.classifiers[ci],
                        per_fold_accuracy: a,
                        mean,
                        sd,
                        selection_seconds: seconds / n_folds as f64,
                    });
                }
            }
        }
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests;

//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any criterion fails.
//!
//! `FBTRCA_ACCEPT=1,2,7` restricts the run to the listed criteria.
//! `FBTRCA_DATASET=<dir>` enables the real-data check (criterion 9); the
//! directory holds one sub-directory per subject×movement dataset.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use fbtrca::classify::{train, ClassifierConfig, ClassifierKind, Mlp};
use fbtrca::data::load_dataset;
use fbtrca::featsel::{qpfs_weights, rank_features, MiTable, Selector};
use fbtrca::filterbank::{default_shifted_highs, default_shifted_lows, design_butterworth, make_shifted_grid, PAD_SECONDS};
use fbtrca::filterbank::Setting;
use fbtrca::pipeline::{
    compare_settings, mean_sd, run_benchmark, stratified_folds, AuditLog, CvConfig, FbtrcaOptions, Folds, Method,
};
use fbtrca::strca::{class_filters, symmetric_definite_eigen, StrcaModel};
use fbtrca::synth::{generate, SynthSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn planted_recovery() -> Outcome {
    let t = Instant::now();
    let d = generate(&SynthSpec {
        n_channels: 11,
        n_samples: 512,
        n_trials: 60,
        snr: 1.0,
        seed: 11,
        ..SynthSpec::default()
    })
    .unwrap();
    let trials: Vec<&DMatrix<f64>> = d.movement.trials().iter().collect();
    let (w, _) = class_filters(&trials, 1).unwrap();
    let mean = trials.iter().fold(DMatrix::zeros(11, 512), |acc, x| acc + *x) / trials.len() as f64;
    let y: Vec<f64> = (w.column(0).transpose() * mean).iter().copied().collect();
    let r = pearson(&y, &d.truth.source).abs();
    let el = t.elapsed();
    outcome(r >= 0.95 && within(el, 5.0), format!("|corr| = {r:.4}, {:.2} s", el.as_secs_f64()))
}

/// Lag of the cross-correlation peak of `y` against `x`.
fn peak_lag(x: &[f64], y: &[f64], max_lag: isize) -> isize {
    let n = x.len() as isize;
    (-max_lag..=max_lag)
        .map(|lag| {
            let c: f64 = (0..n)
                .filter(|&i| i + lag >= 0 && i + lag < n)
                .map(|i| x[i as usize] * y[(i + lag) as usize])
                .sum();
            (lag, c)
        })
        .fold((0, f64::NEG_INFINITY), |b, (l, c)| if c > b.1 { (l, c) } else { b })
        .0
}

fn filter_correctness() -> Outcome {
    let t = Instant::now();
    let fs = 256.0;
    let pad = (PAD_SECONDS * fs).round() as usize;
    let grid = make_shifted_grid(&default_shifted_lows(), &default_shifted_highs()).unwrap();
    let mut failures = Vec::new();
    let (mut worst_edge, mut worst_stop) = (0.0f64, 0.0f64);
    for band in &grid {
        let d = design_butterworth(band, fs).unwrap();
        for f in [band.low_hz, band.high_hz] {
            let db = 20.0 * d.magnitude(f).log10();
            worst_edge = worst_edge.max((db + 3.0).abs());
            if (db + 3.0).abs() > 0.5 {
                failures.push(format!("{} edge {f} Hz at {db:.2} dB", band.label()));
            }
        }
        // 8 s tone at 2.5× the high edge, starting and ending on a zero crossing
        let stop_hz = 2.5 * band.high_hz;
        let x: Vec<f64> = (0..=2048).map(|i| (2.0 * PI * stop_hz * i as f64 / fs).sin()).collect();
        let ratio = rms(&d.filtfilt(&x, pad)) / rms(&x);
        worst_stop = worst_stop.max(ratio);
        if ratio > 0.05 {
            failures.push(format!("{} passes {ratio:.3} at {stop_hz} Hz", band.label()));
        }
        // Hann-windowed tone at the geometric band centre, several periods long
        let centre = (band.low_hz * band.high_hz).sqrt();
        let n = ((8.0 / centre) * fs).max(1024.0) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
                w * (2.0 * PI * centre * i as f64 / fs).sin()
            })
            .collect();
        let lag = peak_lag(&x, &d.filtfilt(&x, pad), 64);
        if lag != 0 {
            failures.push(format!("{} lags by {lag} samples", band.label()));
        }
    }
    let el = t.elapsed();
    let pass = failures.is_empty() && grid.len() == 100 && within(el, 30.0);
    let mut detail = format!(
        "{} bands, worst edge error {worst_edge:.3} dB, worst stop-band pass-through {worst_stop:.2e}, {:.1} s",
        grid.len(),
        el.as_secs_f64()
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    outcome(pass, detail)
}

/// Columns 0 and 1 are one strongly informative feature twice; column 2 is a
/// weaker feature with independent noise.
fn duplicated_construction(n: usize, seed: u64) -> (DMatrix<f64>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let mut x = DMatrix::zeros(n, 3);
    for i in 0..n {
        let y = labels[i] as f64;
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        x[(i, 0)] = 2.0 * y + 0.6 * a;
        x[(i, 1)] = x[(i, 0)];
        x[(i, 2)] = y + 0.8 * b;
    }
    (x, labels)
}

fn step_criterion(m: Selector, t: &MiTable, s: &[usize], i: usize) -> f64 {
    let c = t.conditional.as_ref().unwrap();
    let rel = t.relevance[i];
    if s.is_empty() {
        return rel;
    }
    let n = s.len() as f64;
    let red: f64 = s.iter().map(|&j| t.redundancy[(i, j)]).sum();
    let gaps: Vec<f64> = s.iter().map(|&j| t.redundancy[(i, j)] - c[(i, j)]).collect();
    match m {
        Selector::Maxrel => rel,
        Selector::Minred => -red / n,
        Selector::Mrmr => rel - red / n,
        Selector::Miq => rel / (red / n).max(1e-12),
        Selector::Mrmtr => rel - 2.0 * red / n,
        Selector::Cife => rel - gaps.iter().sum::<f64>(),
        Selector::Cmim => gaps.iter().map(|g| rel - g).fold(f64::INFINITY, f64::min),
        Selector::Qpfs => unreachable!(),
    }
}

/// Best ordering under a greedy criterion by scoring all permutations step by step.
fn exhaustive_order(m: Selector, t: &MiTable) -> Vec<usize> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut chosen: Vec<usize> = Vec::new();
    for step in 0..3 {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for p in perms.iter().filter(|p| p[..step] == chosen[..]) {
            let v = step_criterion(m, t, &chosen, p[step]);
            if v > best.1 || (v == best.1 && p[step] < best.0) {
                best = (p[step], v);
            }
        }
        chosen.push(best.0);
    }
    chosen
}

fn selector_oracles() -> Outcome {
    let t = Instant::now();
    let (x, labels) = duplicated_construction(400, 9);
    let table = MiTable::compute(&x, &labels, None, true).unwrap();
    let mut mismatches = Vec::new();
    for m in Selector::ALL.into_iter().filter(|&m| m != Selector::Qpfs) {
        let got = rank_features(&table, m, 3).unwrap().order;
        if got != exhaustive_order(m, &table) {
            mismatches.push(m.to_string());
        }
    }
    let mrmr_pair = rank_features(&table, Selector::Mrmr, 2).unwrap().order;
    let alpha = qpfs_weights(&table).unwrap();
    let sum_err = (alpha.iter().sum::<f64>() - 1.0).abs();
    let feasible = alpha.iter().all(|&a| a >= -1e-8) && sum_err <= 1e-8;
    let el = t.elapsed();
    let pass = mismatches.is_empty() && mrmr_pair == [0, 2] && feasible && within(el, 5.0);
    outcome(
        pass,
        format!(
            "7 greedy selectors, mismatches {mismatches:?}, MRMR k=2 picks {mrmr_pair:?}, QPFS |Σα−1| = {sum_err:.1e}, {:.2} s",
            el.as_secs_f64()
        ),
    )
}

/// Generator settings shared by the ranking replicates.
fn ranking_spec(seed: u64) -> SynthSpec {
    SynthSpec {
        n_channels: 6,
        n_samples: 128,
        n_trials: 40,
        fs: 64.0,
        snr: 0.5,
        seed,
        ..SynthSpec::default()
    }
}

const RANKING_REPLICATES: u64 = 20;

/// Share of bootstrap means of `gaps` that are ≥ 0.
fn bootstrap_confidence(gaps: &[f64], draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = gaps.len();
    let hits = (0..draws)
        .filter(|_| (0..n).map(|_| gaps[rng.gen_range(0..n)]).sum::<f64>() >= 0.0)
        .count();
    hits as f64 / draws as f64
}

fn ordinal_ranking() -> Outcome {
    let t = Instant::now();
    let grid = make_shifted_grid(&default_shifted_lows(), &default_shifted_highs()).unwrap();
    let methods = [Method::Strca2, Method::Cvt, Method::Fbtrca(ClassifierKind::Svm)];
    let (mut strca2, mut cvt, mut fb) = (Vec::new(), Vec::new(), Vec::new());
    for seed in 0..RANKING_REPLICATES {
        let d = generate(&ranking_spec(seed)).unwrap();
        let cfg = CvConfig { seed, ..CvConfig::default() };
        let r = run_benchmark(&d.movement, &d.rest, &grid, &methods, &FbtrcaOptions::default(), &cfg, &AuditLog::new()).unwrap();
        strca2.push(r[0].mean);
        cvt.push(r[1].mean);
        fb.push(r[2].mean);
    }
    let el = t.elapsed();
    let (m_s, _) = mean_sd(&strca2);
    let (m_c, _) = mean_sd(&cvt);
    let (m_f, _) = mean_sd(&fb);
    let gap_fc: Vec<f64> = fb.iter().zip(&cvt).map(|(a, b)| a - b).collect();
    let gap_cs: Vec<f64> = cvt.iter().zip(&strca2).map(|(a, b)| a - b).collect();
    let conf_fc = bootstrap_confidence(&gap_fc, 10_000, 1);
    let conf_cs = bootstrap_confidence(&gap_cs, 10_000, 2);
    let pass = (0.75..=0.90).contains(&m_s)
        && m_f >= m_c
        && m_c >= m_s
        && conf_fc >= 0.90
        && conf_cs >= 0.90
        && within(el, 1200.0);
    outcome(
        pass,
        format!(
            "{RANKING_REPLICATES} replicates: FBTRCA-SVM (MRMR, Type2, K2=13) {m_f:.3}, CVT {m_c:.3}, STRCA2 {m_s:.3}; \
             P(FBTRCA-SVM ≥ CVT) = {conf_fc:.3}, P(CVT ≥ STRCA2) = {conf_cs:.3}; {:.0} s",
            el.as_secs_f64()
        ),
    )
}

fn frequency_settings() -> Outcome {
    let t = Instant::now();
    let d = generate(&SynthSpec {
        n_channels: 6,
        n_samples: 128,
        n_trials: 100,
        fs: 64.0,
        snr: 1.0,
        template_band: (0.05, 3.0),
        seed: 5,
        ..SynthSpec::default()
    })
    .unwrap();
    let rows = compare_settings(
        &d.movement,
        &d.rest,
        &[Setting::M1, Setting::M2, Setting::M3],
        10,
        &CvConfig { seed: 5, ..CvConfig::default() },
    )
    .unwrap();
    let high: Vec<f64> = rows
        .iter()
        .filter(|r| r.setting != Setting::M3 && r.low_hz > 5.0)
        .map(|r| r.mean)
        .collect();
    let m3: Vec<f64> = rows.iter().filter(|r| r.setting == Setting::M3).map(|r| r.mean).collect();
    let max_high = high.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_m3 = m3.iter().copied().fold(f64::INFINITY, f64::min);
    let el = t.elapsed();
    let pass = !high.is_empty() && max_high <= 0.60 && m3.len() == 10 && min_m3 >= 0.75 && within(el, 600.0);
    outcome(
        pass,
        format!(
            "{} M1/M2 bands above 5 Hz, max {max_high:.3}; M3 min {min_m3:.3}; {:.0} s",
            high.len(),
            el.as_secs_f64()
        ),
    )
}

fn leakage_audit() -> Outcome {
    let d = generate(&SynthSpec {
        n_channels: 6,
        n_samples: 128,
        n_trials: 30,
        fs: 64.0,
        snr: 0.5,
        seed: 6,
        ..SynthSpec::default()
    })
    .unwrap();
    let grid = make_shifted_grid(&default_shifted_lows(), &default_shifted_highs()).unwrap();
    let cfg = CvConfig { seed: 6, ..CvConfig::default() };
    let log = AuditLog::new();
    let methods = [
        Method::Strca1,
        Method::Strca2,
        Method::Cvt,
        Method::Fbtrca(ClassifierKind::Lda),
        Method::Fbtrca(ClassifierKind::Svm),
        Method::Fbtrca(ClassifierKind::Nn),
    ];
    run_benchmark(&d.movement, &d.rest, &grid, &methods, &FbtrcaOptions::default(), &cfg, &log).unwrap();
    let labels: Vec<u8> = (0..60).map(|i| u8::from(i < 30)).collect();
    let folds = Folds::new(&labels, &cfg).unwrap();
    let v = log.violations(&folds);
    outcome(
        v.is_empty() && !log.is_empty(),
        format!("{} fit-stage reads logged, {} touched held-out trials", log.len(), v.len()),
    )
}

fn nn_gradient_error() -> f64 {
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut net = Mlp::init(4, 10, seed);
        net.w2 = nalgebra::DVector::from_fn(10, |_, _| rng.gen_range(-1.0..1.0));
        net.b2 = rng.gen_range(-0.5..0.5);
        let x = DMatrix::from_fn(12, 4, |_, _| rng.gen_range(-2.0..2.0));
        let y: Vec<f64> = (0..12).map(|i| (i % 2) as f64).collect();
        let g = net.gradient(&x, &y);
        let analytic: Vec<f64> = g.w1.iter().chain(g.b1.iter()).chain(g.w2.iter()).copied().chain([g.b2]).collect();
        let h = 1e-6;
        let n_params = analytic.len();
        let bump = |k: usize, delta: f64| {
            let mut m = net.clone();
            let (n1, n2) = (m.w1.len(), m.b1.len());
            match k {
                k if k < n1 => m.w1[k] += delta,
                k if k < n1 + n2 => m.b1[k - n1] += delta,
                k if k < n_params - 1 => m.w2[k - n1 - n2] += delta,
                _ => m.b2 += delta,
            }
            m.loss(&x, &y)
        };
        let numeric: Vec<f64> = (0..n_params).map(|k| (bump(k, h) - bump(k, -h)) / (2.0 * h)).collect();
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(diff / scale);
    }
    worst
}

fn geneig_residual() -> f64 {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let n = 4 + seed as usize;
        let r = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let s = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let a = &r + r.transpose();
        let b = &s * s.transpose() + DMatrix::identity(n, n) * 0.1;
        let e = symmetric_definite_eigen(&a, &b).unwrap();
        for k in 0..n {
            let v = e.vectors.column(k);
            let res = &a * v - (&b * v) * e.values[k];
            let scale = (a.norm() + e.values[k].abs() * b.norm()) * v.norm();
            worst = worst.max(res.norm() / scale);
        }
    }
    worst
}

/// Range of every CCP coefficient over randomised trials: white, scaled,
/// template-like, near-constant and spiky inputs.
fn ccp_range(n_trials: usize) -> (f64, f64, usize) {
    let d = generate(&SynthSpec {
        n_channels: 6,
        n_samples: 64,
        n_trials: 20,
        fs: 64.0,
        snr: 1.0,
        seed: 7,
        ..SynthSpec::default()
    })
    .unwrap();
    let m: Vec<&DMatrix<f64>> = d.movement.trials().iter().collect();
    let r: Vec<&DMatrix<f64>> = d.rest.trials().iter().collect();
    let model = StrcaModel::fit(&m, &r, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut lo, mut hi, mut non_finite) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for i in 0..n_trials {
        let scale = 10f64.powf(rng.gen_range(-6.0..6.0));
        let noise = DMatrix::from_fn(6, 64, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = match i % 4 {
            0 => noise * scale,
            1 => (&model.templates()[i % 2] + noise * rng.gen_range(0.0..2.0)) * scale,
            2 => DMatrix::from_fn(6, 64, |c, _| c as f64) + noise * 1e-9,
            _ => {
                let mut x = noise * 1e-3;
                x[(rng.gen_range(0..6), rng.gen_range(0..64))] = scale;
                x
            }
        };
        for v in model.extract(&x).unwrap().rho {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            } else {
                non_finite += 1;
            }
        }
    }
    (lo, hi, non_finite)
}

/// 10-fold cross-validated SVM accuracy with labels permuted away from features that carry class information.
fn permutation_null(n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let x = DMatrix::from_fn(n, 6, |i, _| labels[i] as f64 + rng.sample::<f64, _>(StandardNormal));
    let mut permuted = labels.clone();
    permuted.shuffle(&mut rng);
    let folds = stratified_folds(&permuted, 10, true, &mut rng).unwrap();
    let cfg = ClassifierConfig::default();
    let mut hits = 0;
    for f in 0..10 {
        let train_idx: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
        let test_idx: Vec<usize> = (0..n).filter(|&i| folds[i] == f).collect();
        let xt = x.select_rows(&train_idx);
        let yt: Vec<u8> = train_idx.iter().map(|&i| permuted[i]).collect();
        let model = train(ClassifierKind::Svm, &xt, &yt, &cfg).unwrap();
        let pred = model.predict(&x.select_rows(&test_idx)).unwrap();
        hits += test_idx.iter().zip(&pred.labels).filter(|(&i, &p)| permuted[i] == p).count();
    }
    hits as f64 / n as f64
}

fn numerical_suites() -> Outcome {
    let grad = nn_gradient_error();
    let resid = geneig_residual();
    let (lo, hi, non_finite) = ccp_range(100_000);
    let null = permutation_null(2000);
    let pass = grad <= 1e-5 && resid <= 1e-8 && lo >= -1.0 && hi <= 1.0 && non_finite == 0 && (0.45..=0.55).contains(&null);
    outcome(
        pass,
        format!(
            "NN gradient rel. error {grad:.1e}; geneig residual {resid:.1e}; CCP range [{lo:.4}, {hi:.4}] \
             over 1e5 trials ({non_finite} non-finite); permutation-null accuracy {null:.3} at n = 2000"
        ),
    )
}

fn fbtrca(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fbtrca")).args(args).output().unwrap()
}

/// Drops wall-clock fields so that runs can be compared byte for byte.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| !k.ends_with("_seconds"));
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn normalised_json(path: &Path) -> String {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    strip_timing(&mut v);
    serde_json::to_string_pretty(&v).unwrap()
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let p = |s: &str| root.join(s).to_string_lossy().into_owned();
    let data = p("data");
    let traj = p("traj.csv");
    let rows: Vec<String> = [0.0, 1.0]
        .iter()
        .map(|&amp| {
            (0..512)
                .map(|i| format!("{}", amp / (1.0 + (-(i as f64 - 256.0) / 20.0).exp())))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    std::fs::write(&traj, rows.join("\n")).unwrap();

    let synth = |out: &str, jobs: &str| {
        fbtrca(&["--jobs", jobs, "synth", "--out", out, "--channels", "6", "--samples", "128", "--fs", "64", "--trials", "20", "--seed", "4"])
    };
    let cases: Vec<(&str, Vec<String>, &str)> = vec![
        ("onset", vec!["--input".into(), traj.clone(), "--kind".into(), "limb".into(), "--fs".into(), "128".into()], "onsets.json"),
        (
            "bench",
            ["--data", &data, "--outer-folds", "4", "--inner-folds", "3", "--k2", "6"].map(String::from).to_vec(),
            "results.json",
        ),
        (
            "sweep",
            ["--data", &data, "--grid", "m3", "--bands", "4", "--outer-folds", "4", "--inner-folds", "3", "--k1-max", "2", "--k2-max", "4"]
                .map(String::from)
                .to_vec(),
            "sweep.json",
        ),
        (
            "compare-settings",
            ["--data", &data, "--m", "4", "--outer-folds", "4", "--inner-folds", "3"].map(String::from).to_vec(),
            "settings.json",
        ),
        ("export-features", ["--data", &data, "--grid", "m2", "--bands", "3"].map(String::from).to_vec(), "features.json"),
    ];
    let mut failures = Vec::new();
    if !synth(&data, "1").status.success() || !synth(&p("data2"), "3").status.success() {
        return outcome(false, "synth failed".into());
    }
    for f in ["movement/epochs.bin", "rest/epochs.bin", "truth.json", "config.json"] {
        let (a, b) = (std::fs::read(root.join("data").join(f)), std::fs::read(root.join("data2").join(f)));
        if a.is_err() || a.ok() != b.ok() {
            failures.push(format!("synth {f}"));
        }
    }
    for (cmd, args, file) in &cases {
        let mut outs = Vec::new();
        for jobs in ["1", "3"] {
            let out = p(&format!("{cmd}-{jobs}"));
            let mut full = vec!["--jobs", jobs, cmd, "--out", &out, "--seed", "2"];
            full.extend(args.iter().map(String::as_str));
            let o = fbtrca(&full);
            if !o.status.success() {
                failures.push(format!("{cmd} exited with {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
                break;
            }
            outs.push(normalised_json(&Path::new(&out).join(file)));
        }
        if outs.len() == 2 && outs[0] != outs[1] {
            failures.push(format!("{cmd} output differs"));
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "synth + 5 commands identical across --jobs 1/3".into() } else { failures.join("; ") })
}

/// Mean FBTRCA-SVM (MRMR, Type2, K2 = 13) accuracy over every dataset under `root`.
fn real_dataset(root: &Path) -> Outcome {
    let grid = make_shifted_grid(&default_shifted_lows(), &default_shifted_highs()).unwrap();
    let mut dirs: Vec<_> = std::fs::read_dir(root).unwrap().filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    let mut accs = Vec::new();
    for dir in &dirs {
        let (m, r) = load_dataset(dir).unwrap();
        let res = run_benchmark(&m, &r, &grid, &[Method::Fbtrca(ClassifierKind::Svm)], &FbtrcaOptions::default(), &CvConfig::default(), &AuditLog::new()).unwrap();
        accs.extend(res[0].per_fold_accuracy.iter().copied());
    }
    let (mean, sd) = mean_sd(&accs);
    outcome((mean - 0.87).abs() <= 0.05, format!("{} datasets, {} folds: {mean:.4} ± {sd:.4}", dirs.len(), accs.len()))
}

fn main() {
    // libtest-style flags such as --nocapture are accepted and ignored
    let only: Option<Vec<u32>> = std::env::var("FBTRCA_ACCEPT")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "planted-component recovery", planted_recovery),
        (2, "filter correctness on the 100-band grid", filter_correctness),
        (3, "selector oracle equivalence", selector_oracles),
        (4, "ordinal method ranking", ordinal_ranking),
        (5, "frequency-setting reproduction", frequency_settings),
        (6, "leakage audit", leakage_audit),
        (7, "numerical suites", numerical_suites),
        (8, "CLI determinism across --jobs", cli_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {id}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if only.as_ref().map_or(true, |o| o.contains(&9)) {
        match std::env::var_os("FBTRCA_DATASET") {
            Some(root) => {
                let o = real_dataset(Path::new(&root));
                if !o.pass {
                    failed += 1;
                }
                println!("{} 9. real-dataset accuracy: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            }
            None => println!("SKIP 9. real-dataset accuracy: FBTRCA_DATASET not set"),
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

use super::*;
use crate::data::ClassLabel;
use crate::filterbank::make_shifted_grid;
use crate::synth::{generate, SynthSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(snr: f64, seed: u64) -> (EpochSet, EpochSet) {
    let d = generate(&SynthSpec {
        n_channels: 6,
        n_samples: 128,
        n_trials: 30,
        fs: 64.0,
        snr,
        seed,
        ..SynthSpec::default()
    })
    .unwrap();
    (d.movement, d.rest)
}

fn cv(seed: u64) -> CvConfig {
    CvConfig {
        outer_folds: 5,
        inner_folds: 3,
        seed,
        shuffle: true,
    }
}

fn grid4() -> Vec<BandSpec> {
    make_shifted_grid(&[0.05, 0.5], &[3.0, 10.0]).unwrap()
}

#[test]
fn method_names_round_trip() {
    for s in ["strca1", "STRCA2", "cvt", "fbtrca:svm", "FBTRCA-NN", "fbtrca:lda"] {
        let m: Method = s.parse().unwrap();
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
    }
    assert_eq!("fbtrca:svm".parse::<Method>().unwrap().name(), "FBTRCA-SVM");
    assert!("svm".parse::<Method>().is_err());
    let json = serde_json::to_string(&Method::Fbtrca(ClassifierKind::Nn)).unwrap();
    assert_eq!(json, "\"FBTRCA-NN\"");
}

#[test]
fn mean_sd_matches_direct_formula() {
    let x = [0.5, 0.75, 1.0, 0.25];
    let (m, s) = mean_sd(&x);
    assert_eq!(m, 0.625);
    // sum of squared deviations = 0.3125 over n − 1 = 3
    assert!((s - (0.3125f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(mean_sd(&[0.7]), (0.7, 0.0));
}

#[test]
fn separable_data_scores_high_and_reruns_identically() {
    let (m, r) = small(20.0, 1);
    let a = run_strca(&m, &r, strca2_band(), &cv(4)).unwrap();
    assert_eq!(a.method, Method::Strca2);
    assert!(a.mean >= 0.95, "{}", a.mean);
    assert!(a.per_fold_accuracy.iter().all(|v| (0.0..=1.0).contains(v)));
    let b = run_strca(&m, &r, strca2_band(), &cv(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shuffled_labels_fall_to_chance() {
    let (m, r) = small(20.0, 2);
    let mut all: Vec<DMatrix<f64>> = m.trials().iter().chain(r.trials()).cloned().collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    let rest_trials = all.split_off(m.n_trials());
    let m2 = EpochSet::new(all, m.fs(), m.channel_names().to_vec(), ClassLabel::Movement, m.window()).unwrap();
    let r2 = EpochSet::new(rest_trials, r.fs(), r.channel_names().to_vec(), ClassLabel::Rest, r.window()).unwrap();
    let mut means = Vec::new();
    for seed in 0..4 {
        means.push(run_strca(&m2, &r2, strca2_band(), &cv(seed)).unwrap().mean);
    }
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    assert!((0.35..=0.65).contains(&avg), "{means:?}");
}

#[test]
fn full_run_is_leak_free_with_expected_training_counts() {
    let (m, r) = small(1.0, 3);
    let grid = grid4();
    let methods = [Method::Strca2, Method::Cvt, Method::Fbtrca(ClassifierKind::Svm)];
    let opts = FbtrcaOptions {
        plan: ArrangementPlan::Type2 { k2: 5 },
        ..FbtrcaOptions::default()
    };
    let cfg = cv(0);
    let log = AuditLog::new();
    let res = run_benchmark(&m, &r, &grid, &methods, &opts, &cfg, &log).unwrap();
    assert_eq!(res.len(), 3);
    let labels: Vec<u8> = (0..60).map(|i| u8::from(i < 30)).collect();
    let folds = Folds::new(&labels, &cfg).unwrap();
    assert!(log.violations(&folds).is_empty());
    // strca2 band is grid entry 0: shared, so every band has one outer and 3 inner fits
    for f in 0..5 {
        assert_eq!(log.count(Stage::SpatialFilter, f), grid.len() * 4);
        assert_eq!(log.count(Stage::Selection, f), 1);
    }
    assert_eq!(res[1].strca_trainings_per_fold, 4 * 3 + 1);
    assert_eq!(res[1].bands.len(), 5);
    assert_eq!(res[2].strca_trainings_per_fold, 4);
    assert_eq!(res[2].n_features, 5);
    for x in &res {
        let (mean, sd) = mean_sd(&x.per_fold_accuracy);
        assert!((x.mean - mean).abs() <= 1e-12 && (x.sd - sd).abs() <= 1e-12);
    }
}

#[test]
fn standalone_runs_train_the_documented_number_of_models() {
    let (m, r) = small(1.0, 4);
    let grid = grid4();
    let cfg = cv(1);
    let labels: Vec<u8> = (0..60).map(|i| u8::from(i < 30)).collect();
    let folds = Folds::new(&labels, &cfg).unwrap();

    let log = AuditLog::new();
    run_benchmark(&m, &r, &grid, &[Method::Cvt], &FbtrcaOptions::default(), &cfg, &log).unwrap();
    for f in 0..5 {
        assert_eq!(log.count(Stage::SpatialFilter, f), grid.len() * 3 + 1);
    }
    assert!(log.violations(&folds).is_empty());

    let log = AuditLog::new();
    let opts = FbtrcaOptions {
        plan: ArrangementPlan::Type1 { k1: 2 },
        ..FbtrcaOptions::default()
    };
    run_benchmark(&m, &r, &grid, &[Method::Fbtrca(ClassifierKind::Lda)], &opts, &cfg, &log).unwrap();
    for f in 0..5 {
        assert_eq!(log.count(Stage::SpatialFilter, f), grid.len());
    }
    assert!(log.violations(&folds).is_empty());
}

#[test]
fn exhaustive_type1_equals_all_features() {
    let (m, r) = small(1.0, 5);
    let grid = grid4();
    let cfg = cv(2);
    let opts = FbtrcaOptions {
        plan: ArrangementPlan::Type1 { k1: grid.len() },
        ..FbtrcaOptions::default()
    };
    let got = run_fbtrca(&m, &r, &grid, ClassifierKind::Lda, &opts, &cfg).unwrap();
    assert_eq!(got.n_features, 6 * grid.len());

    // oracle: every band's outer features, all columns, in a fixed order
    let data = Pooled::new(&m, &r).unwrap();
    let folds = Folds::new(&data.labels, &cfg).unwrap();
    let log = AuditLog::new();
    let ctx = Context { data: &data, folds: &folds, log: &log };
    let outcomes = ctx
        .run_bands(&grid, &vec![BandWork { outer: true, inner: false }; grid.len()])
        .unwrap();
    let all: Vec<usize> = (0..6 * grid.len()).collect();
    let ccfg = fold_classifier_config(&opts, &cfg, 0);
    for f in 0..5 {
        let acc = classify_fold(&ctx, &outcomes, f, &all, ClassifierKind::Lda, &ccfg).unwrap();
        assert!((acc - got.per_fold_accuracy[f]).abs() <= 1e-12);
    }
}

#[test]
fn cvt_tie_goes_to_lower_index() {
    let o = |s: Vec<f64>| BandOutcome { outer: Vec::new(), inner_score: Some(s) };
    let outcomes = vec![o(vec![0.6, 0.7]), o(vec![0.8, 0.7]), o(vec![0.8, 0.5])];
    assert_eq!(best_band(&outcomes, 0), 1);
    assert_eq!(best_band(&outcomes, 1), 0);
}

#[test]
fn settings_table_shape_and_rerun() {
    let (m, r) = small(1.0, 6);
    let a = compare_settings(&m, &r, &[Setting::M1, Setting::M3], 3, &cv(3)).unwrap();
    assert_eq!(a.len(), 6);
    assert_eq!(a[0].setting, Setting::M1);
    assert_eq!(a[5].band_index, 2);
    assert_eq!(a, compare_settings(&m, &r, &[Setting::M1, Setting::M3], 3, &cv(3)).unwrap());
}

#[test]
fn sweep_prefix_rows_match_direct_runs() {
    let (m, r) = small(1.0, 7);
    let grid = grid4();
    let cfg = cv(0);
    let sc = SweepConfig {
        selectors: vec![Selector::Mrmr, Selector::Qpfs],
        classifiers: vec![ClassifierKind::Lda, ClassifierKind::Svm],
        k1_max: 2,
        k2_max: 4,
        ..SweepConfig::default()
    };
    let t = sweep(&m, &r, &grid, &sc, &cfg).unwrap();
    assert_eq!(t.rows.len(), 2 * (2 + 4) * 2);
    for (selector, plan, kind) in [
        (Selector::Mrmr, ArrangementPlan::Type2 { k2: 3 }, ClassifierKind::Svm),
        (Selector::Qpfs, ArrangementPlan::Type1 { k1: 1 }, ClassifierKind::Lda),
    ] {
        let opts = FbtrcaOptions { selector, plan, ..FbtrcaOptions::default() };
        let direct = run_fbtrca(&m, &r, &grid, kind, &opts, &cfg).unwrap();
        let row = t
            .rows
            .iter()
            .find(|x| x.selector == selector && x.plan == plan && x.classifier == kind)
            .unwrap();
        assert_eq!(row.per_fold_accuracy, direct.per_fold_accuracy);
    }
    let best = t.best(Selector::Mrmr, false, ClassifierKind::Lda).unwrap();
    let max = t
        .rows
        .iter()
        .filter(|x| x.selector == Selector::Mrmr && x.classifier == ClassifierKind::Lda && matches!(x.plan, ArrangementPlan::Type2 { .. }))
        .map(|x| x.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(best.mean, max);
}

#[test]
fn invalid_inputs_are_rejected() {
    let (m, r) = small(1.0, 8);
    let log = AuditLog::new();
    let opts = FbtrcaOptions {
        plan: ArrangementPlan::Type1 { k1: 9 },
        ..FbtrcaOptions::default()
    };
    let e = run_benchmark(&m, &r, &grid4(), &[Method::Fbtrca(ClassifierKind::Svm)], &opts, &cv(0), &log);
    assert!(matches!(e, Err(Error::InvalidParameter(_))));
    assert!(run_strca(&r, &m, strca2_band(), &cv(0)).is_err());
    assert!(run_benchmark(&m, &r, &grid4(), &[], &opts, &cv(0), &log).is_err());
}

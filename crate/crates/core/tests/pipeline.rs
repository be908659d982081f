mod common;

use common::*;
use varcos::eval::{
    build_metric, classification_report, fit_case, kfold_cv, loocv, run_case, run_case_with, split, Case2Scope,
    CaseId, CaseOptions, SplitSpec,
};
use varcos::knn::{self, KnnConfig, MetricMode};
use varcos::metrics::{class_prior_mle, Transform};
use varcos::{data::class_counts, Label, LabeledPoint};

fn labels(true_neg_pred_neg: usize, true_neg_pred_pos: usize, true_pos_pred_pos: usize, true_pos_pred_neg: usize) -> (Vec<Label>, Vec<Label>) {
    let mut pred = Vec::new();
    let mut truth = Vec::new();
    for (n, t, p) in [
        (true_neg_pred_neg, Label::Negative, Label::Negative),
        (true_neg_pred_pos, Label::Negative, Label::Positive),
        (true_pos_pred_pos, Label::Positive, Label::Positive),
        (true_pos_pred_neg, Label::Positive, Label::Negative),
    ] {
        truth.extend(std::iter::repeat_n(t, n));
        pred.extend(std::iter::repeat_n(p, n));
    }
    (pred, truth)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

#[test]
fn raw_cosine_table_from_confusion_counts() {
    // 70 of 71 benign and 37 of 43 malignant correct.
    let (pred, truth) = labels(70, 1, 37, 6);
    let r = classification_report(&pred, &truth).unwrap();
    let [b, m] = r.classes;
    assert_eq!([round3(b.precision), round3(b.recall), round3(b.f1)], [0.921, 0.986, 0.952]);
    assert_eq!([round3(m.precision), round3(m.recall), round3(m.f1)], [0.974, 0.860, 0.914]);
    assert_eq!((b.support, m.support), (71, 43));
    assert_eq!(round3(r.accuracy), 0.939);
    assert_eq!([round3(r.macro_avg.precision), round3(r.macro_avg.recall), round3(r.macro_avg.f1)], [0.947, 0.923, 0.933]);
    assert_eq!(
        [round3(r.weighted_avg.precision), round3(r.weighted_avg.recall), round3(r.weighted_avg.f1)],
        [0.941, 0.939, 0.938]
    );
    r.verify(1e-12).unwrap();
}

#[test]
fn expected_transform_table_from_confusion_counts() {
    // All 71 benign and 37 of 43 malignant correct.
    let (pred, truth) = labels(71, 0, 37, 6);
    let r = classification_report(&pred, &truth).unwrap();
    let [b, m] = r.classes;
    assert_eq!([round3(b.precision), round3(b.recall), round3(b.f1)], [0.922, 1.0, 0.959]);
    assert_eq!([round3(m.precision), round3(m.recall), round3(m.f1)], [1.0, 0.860, 0.925]);
    assert_eq!(round3(r.accuracy), 0.947);
    assert_eq!([round3(r.macro_avg.precision), round3(r.macro_avg.recall), round3(r.macro_avg.f1)], [0.961, 0.930, 0.942]);
    assert_eq!(
        [round3(r.weighted_avg.precision), round3(r.weighted_avg.recall), round3(r.weighted_avg.f1)],
        [0.951, 0.947, 0.946]
    );
}

#[test]
fn wdbc_split_sizes_and_stratification() {
    let ds = wdbc();
    let (train, val) = split(&ds.points, &SplitSpec::default()).unwrap();
    assert_eq!((train.len(), val.len()), (455, 114));
    let (pos, neg) = class_counts(&val);
    assert!((pos as i64 - 43).abs() <= 1 && (neg as i64 - 71).abs() <= 1, "{pos} M / {neg} B");
    let (tp, tn) = class_counts(&train);
    let prior = class_prior_mle(tp, tn).unwrap();
    assert_eq!(prior, tp as f64 / 455.0);
    assert!((prior - 212.0 / 569.0).abs() < 0.01);
}

#[test]
fn wdbc_reports_are_internally_consistent() {
    let ds = wdbc();
    for case in CaseId::ALL {
        for seed in [1, 42] {
            let r = run_case(&ds, case, &SplitSpec::with_seed(seed), 13).unwrap();
            r.verify(1e-12).unwrap();
            assert_eq!(r.support_total(), 114);
            assert_eq!(r.case, Some(case));
            assert_eq!(r.k, Some(13));
            assert_eq!(r.seed, Some(seed));
            assert_eq!(r, run_case(&ds, case, &SplitSpec::with_seed(seed), 13).unwrap());
        }
    }
}

#[test]
fn oracle_mode_is_perfect_on_wdbc() {
    let ds = wdbc();
    let r = run_case(&ds, CaseId::PerClassOracle, &SplitSpec::default(), 13).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert!(r.classes.iter().all(|c| c.precision == 1.0 && c.recall == 1.0 && c.f1 == 1.0));
}

#[test]
fn expected_transform_ignores_validation_points() {
    let ds = wdbc();
    let (train, val) = split(&ds.points, &SplitSpec::default()).unwrap();
    let mut tampered = train.clone();
    tampered.extend(val.iter().map(|p| LabeledPoint::new(p.id, p.features.iter().map(|v| v * 3.0 + 1.0).collect(), p.label)));
    let a = build_metric(CaseId::ExpectedSample, &train, &ds.points, &ds.label_names, false).unwrap();
    let b = build_metric(CaseId::ExpectedSample, &train, &tampered, &ds.label_names, false).unwrap();
    let (MetricMode::ExpectedWhitened(a), MetricMode::ExpectedWhitened(b)) = (a, b) else {
        panic!("case 3 must use the expected transform");
    };
    assert_eq!(a.matrix(), b.matrix());

    // Case 2 in single-split runs does read every point.
    let c = build_metric(CaseId::PerClassOracle, &train, &ds.points, &ds.label_names, false).unwrap();
    let d = build_metric(CaseId::PerClassOracle, &train, &tampered, &ds.label_names, false).unwrap();
    assert_ne!(format!("{c:?}"), format!("{d:?}"));
}

#[test]
fn case2_scope_changes_which_points_feed_covariances() {
    let ds = wdbc();
    let spec = SplitSpec::default();
    let all = run_case_with(&ds, CaseId::PerClassOracle, &spec, &CaseOptions::default()).unwrap();
    let opts = CaseOptions {
        case2_scope: Case2Scope::TrainingOnly,
        ..Default::default()
    };
    let train_only = run_case_with(&ds, CaseId::PerClassOracle, &spec, &opts).unwrap();
    assert_eq!(all.accuracy, 1.0);
    train_only.verify(1e-12).unwrap();
    // The other cases do not consult the scope.
    for case in [CaseId::RawCosine, CaseId::ExpectedSample] {
        assert_eq!(
            run_case_with(&ds, case, &spec, &CaseOptions::default()).unwrap(),
            run_case_with(&ds, case, &spec, &opts).unwrap()
        );
    }
}

#[test]
fn loocv_is_deterministic_and_equals_n_fold() {
    let ds = wdbc();
    let a = loocv(&ds, CaseId::RawCosine, 13).unwrap();
    let b = loocv(&ds, CaseId::RawCosine, 13).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.folds.len(), 569);
    let n_fold = kfold_cv(&ds, CaseId::RawCosine, 13, 569, 42).unwrap();
    assert_eq!(n_fold.mean_accuracy, a.mean_accuracy);
}

#[test]
fn kfold_folds_cover_the_dataset() {
    let ds = wdbc();
    let s = kfold_cv(&ds, CaseId::ExpectedSample, 13, 5, 3).unwrap();
    assert_eq!(s.folds.len(), 5);
    assert_eq!(s.folds.iter().map(|f| f.size).sum::<usize>(), 569);
    assert!(s.folds.iter().all(|f| f.size == 113 || f.size == 114));
    let mean = s.folds.iter().map(|f| f.accuracy).sum::<f64>() / 5.0;
    assert_eq!(mean, s.mean_accuracy);
}

#[test]
fn doubled_distance_changes_no_prediction() {
    let names = varcos::data::LabelNames {
        positive: "P".into(),
        negative: "N".into(),
    };
    for seed in 0..6 {
        let points = two_class_points(seed, 60, 4);
        let (train, test) = split(&points, &SplitSpec::with_seed(seed)).unwrap();
        for case in CaseId::ALL {
            let model = fit_case(case, &train, &points, &names, &CaseOptions::new(5)).unwrap();
            for q in &test {
                let hint = model.config().metric.needs_hint().then_some(q.label);
                let plain = model.neighbors(&q.features, hint).unwrap();
                let doubled = model.neighbors_by(&q.features, hint, |s| 2.0 - 2.0 * s.value()).unwrap();
                let ids = |ns: &[knn::Neighbor]| ns.iter().map(|n| n.id).collect::<Vec<_>>();
                assert_eq!(ids(&plain), ids(&doubled));
                assert_eq!(
                    knn::vote(&plain[..5], Default::default()),
                    knn::vote(&doubled[..5], Default::default())
                );
            }
        }
    }
}

#[test]
fn predictions_do_not_depend_on_training_order() {
    let ds = wdbc();
    let (train, val) = split(&ds.points, &SplitSpec::with_seed(5)).unwrap();
    let mut reversed = train.clone();
    reversed.reverse();
    let metric = build_metric(CaseId::ExpectedSample, &train, &ds.points, &ds.label_names, false).unwrap();
    let a = knn::fit(&train, KnnConfig::new(metric.clone())).unwrap();
    let b = knn::fit(&reversed, KnnConfig::new(metric)).unwrap();
    assert_eq!(a.predict_labeled(&val).unwrap(), b.predict_labeled(&val).unwrap());
}

#[test]
fn sweep_rates_match_exhaustive_evaluation() {
    let names = varcos::data::LabelNames {
        positive: "P".into(),
        negative: "N".into(),
    };
    for seed in 0..4 {
        let points = two_class_points(40 + seed, 30, 3);
        let (train, test) = split(&points, &SplitSpec::with_seed(seed)).unwrap();
        for case in CaseId::ALL {
            let metric = build_metric(case, &train, &points, &names, false).unwrap();
            let sweep = knn::sweep_k(&train, &test, &metric, 1..=train.len(), Default::default()).unwrap();
            assert_eq!(sweep.rows.len(), train.len());
            for row in &sweep.rows {
                let wrong = test
                    .iter()
                    .filter(|q| brute_force_predict(&train, q, &metric, row.k) != q.label)
                    .count();
                assert_eq!(row.misclassification_rate, wrong as f64 / test.len() as f64, "case {case} k {}", row.k);
            }
        }
    }
}

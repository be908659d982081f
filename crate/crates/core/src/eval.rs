//! Experiment harness: seeded splits, the three reproduction cases,
//! classification reports, leave-one-out and k-fold cross-validation.
//!
//! The cases differ only in how the KNN metric is built:
//!
//! | case | metric | covariance |
//! |------|--------|------------|
//! | 1 | raw cosine | none |
//! | 2 | per-class whitening, query whitened by its *true* class | population, per class, all data (or training only, by option) |
//! | 3 | expected transform `p·W₊⁻¹ + (1-p)·W₋⁻¹` for every point | sample, per class, training data only |
//!
//! Inside cross-validation every covariance is fitted on the fold's training
//! points, including case 2's.

use std::fmt;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{class_counts, Dataset, LabelNames};
use crate::error::{Error, Result};
use crate::knn::{self, FittedKnn, KnnConfig, Label, LabeledPoint, MetricMode, SweepResult, TieRule};
use crate::linalg::{CholeskyOptions, EstimationMode};
use crate::metrics::{class_prior_mle, expected_transform, WhiteningTransform};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 42,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        SplitSpec {
            seed,
            ..SplitSpec::default()
        }
    }
}

/// Number of validation points for `n` rows: `ceil((1 - f) · n)`.
pub fn validation_size(n: usize, train_fraction: f64) -> usize {
    // the epsilon keeps 0.2 * 10 = 2.0000000000000004 from rounding up to 3
    (((1.0 - train_fraction) * n as f64) - 1e-9).ceil().max(0.0) as usize
}

fn sorted_indices(points: &[LabeledPoint], filter: impl Fn(&LabeledPoint) -> bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).filter(|&i| filter(&points[i])).collect();
    idx.sort_by_key(|&i| (points[i].id, points[i].label));
    idx
}

/// Largest-remainder allocation of `total` across classes of the given sizes.
fn allocate(total: usize, sizes: [usize; 2]) -> [usize; 2] {
    let n: usize = sizes.iter().sum();
    let exact = sizes.map(|s| total as f64 * s as f64 / n as f64);
    let mut out = exact.map(|e| e.floor() as usize);
    let mut left = total - out.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    for &c in order.iter().cycle().take(2 * left.max(1)) {
        if left == 0 {
            break;
        }
        if out[c] < sizes[c] {
            out[c] += 1;
            left -= 1;
        }
    }
    out
}

/// Seeded train/validation partition. Both halves come back sorted by id.
pub fn split(points: &[LabeledPoint], spec: &SplitSpec) -> Result<(Vec<LabeledPoint>, Vec<LabeledPoint>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "train fraction {} is outside (0, 1)",
            spec.train_fraction
        )));
    }
    let (pos, neg) = class_counts(points);
    if pos < 2 || neg < 2 {
        return Err(Error::InvalidSplit(format!(
            "need at least 2 points per class, have {pos} positive and {neg} negative"
        )));
    }
    let n = points.len();
    let n_val = validation_size(n, spec.train_fraction).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut in_validation = vec![false; n];
    if spec.stratified {
        let groups = [Label::Negative, Label::Positive].map(|l| sorted_indices(points, |p| p.label == l));
        let quota = allocate(n_val, [groups[0].len(), groups[1].len()]);
        for (mut group, q) in groups.into_iter().zip(quota) {
            group.shuffle(&mut rng);
            for &i in &group[..q] {
                in_validation[i] = true;
            }
        }
    } else {
        let mut all = sorted_indices(points, |_| true);
        all.shuffle(&mut rng);
        for &i in &all[..n_val] {
            in_validation[i] = true;
        }
    }

    let pick = |want: bool| -> Vec<LabeledPoint> {
        sorted_indices(points, |_| true)
            .into_iter()
            .filter(|&i| in_validation[i] == want)
            .map(|i| points[i].clone())
            .collect()
    };
    Ok((pick(false), pick(true)))
}

/// Stratified, seeded assignment of point indices to `folds` folds. Fold
/// sizes differ by at most one and every index appears in exactly one fold.
pub fn fold_assignment(points: &[LabeledPoint], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 || folds > points.len() {
        return Err(Error::InvalidSplit(format!(
            "cannot make {folds} folds from {} points",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(points.len());
    for label in [Label::Negative, Label::Positive] {
        let mut group = sorted_indices(points, |p| p.label == label);
        group.shuffle(&mut rng);
        order.extend(group);
    }
    let mut out = vec![Vec::new(); folds];
    for (pos, i) in order.into_iter().enumerate() {
        out[pos % folds].push(i);
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// Cosine on raw features.
    RawCosine,
    /// Per-class population-covariance whitening; queries use their true class.
    PerClassOracle,
    /// Expected inverse factor from training-sample covariances.
    ExpectedSample,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::RawCosine, CaseId::PerClassOracle, CaseId::ExpectedSample];

    pub fn number(self) -> u8 {
        match self {
            CaseId::RawCosine => 1,
            CaseId::PerClassOracle => 2,
            CaseId::ExpectedSample => 3,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CaseId::RawCosine => "raw cosine",
            CaseId::PerClassOracle => "per-class population-covariance whitening with oracle labels",
            CaseId::ExpectedSample => "expected inverse Cholesky factor of training sample covariances",
        }
    }
}

impl TryFrom<u8> for CaseId {
    type Error = u8;

    fn try_from(n: u8) -> std::result::Result<Self, u8> {
        match n {
            1 => Ok(CaseId::RawCosine),
            2 => Ok(CaseId::PerClassOracle),
            3 => Ok(CaseId::ExpectedSample),
            other => Err(other),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {} ({})", self.number(), self.description())
    }
}

/// Which points feed case 2's class covariances in a single-split run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case2Scope {
    /// Every point of the class, validation points included.
    #[default]
    AllData,
    TrainingOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseOptions {
    pub k: usize,
    pub case2_scope: Case2Scope,
    pub jitter: bool,
    pub tie_rule: TieRule,
}

impl CaseOptions {
    pub fn new(k: usize) -> Self {
        CaseOptions {
            k,
            case2_scope: Case2Scope::default(),
            jitter: false,
            tie_rule: TieRule::default(),
        }
    }
}

impl Default for CaseOptions {
    fn default() -> Self {
        CaseOptions::new(KnnConfig::DEFAULT_K)
    }
}

fn class_transform(
    points: &[LabeledPoint],
    label: Label,
    mode: EstimationMode,
    names: &LabelNames,
    jitter: bool,
) -> Result<WhiteningTransform> {
    let members: Vec<&[f64]> = points
        .iter()
        .filter(|p| p.label == label)
        .map(|p| p.features.as_slice())
        .collect();
    WhiteningTransform::fit(&members, mode, Some(label), CholeskyOptions { jitter }).map_err(|e| match e {
        Error::Empty(_) => Error::MissingClass(label),
        other => Error::ClassCovariance {
            class: names.name(label).to_string(),
            source: Box::new(other),
        },
    })
}

/// Builds the case's metric. `train` feeds case 3's covariances and prior;
/// `covariance_points` feeds case 2's.
pub fn build_metric(
    case: CaseId,
    train: &[LabeledPoint],
    covariance_points: &[LabeledPoint],
    names: &LabelNames,
    jitter: bool,
) -> Result<MetricMode> {
    match case {
        CaseId::RawCosine => Ok(MetricMode::RawCosine),
        CaseId::PerClassOracle => {
            let mode = EstimationMode::Population;
            Ok(MetricMode::PerClassWhitened {
                positive: class_transform(covariance_points, Label::Positive, mode, names, jitter)?,
                negative: class_transform(covariance_points, Label::Negative, mode, names, jitter)?,
            })
        }
        CaseId::ExpectedSample => {
            let mode = EstimationMode::Sample;
            let pos = class_transform(train, Label::Positive, mode, names, jitter)?;
            let neg = class_transform(train, Label::Negative, mode, names, jitter)?;
            let (n_pos, n_neg) = class_counts(train);
            let prior = class_prior_mle(n_pos, n_neg)?;
            Ok(MetricMode::ExpectedWhitened(expected_transform(&pos, &neg, prior)?))
        }
    }
}

pub fn fit_case(
    case: CaseId,
    train: &[LabeledPoint],
    covariance_points: &[LabeledPoint],
    names: &LabelNames,
    opts: &CaseOptions,
) -> Result<FittedKnn> {
    let metric = build_metric(case, train, covariance_points, names, opts.jitter)?;
    knn::fit(
        train,
        KnnConfig {
            k: opts.k,
            metric,
            tie_rule: opts.tie_rule,
        },
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// 2×2 counts indexed `[true class][predicted class]`, negative = 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_labels(predictions: &[Label], truths: &[Label]) -> Self {
        let mut counts = [[0; 2]; 2];
        for (p, t) in predictions.iter().zip(truths) {
            counts[t.index()][p.index()] += 1;
        }
        ConfusionMatrix { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub case: Option<CaseId>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub label_names: Option<LabelNames>,
    /// Indexed by class: 0 = negative, 1 = positive.
    pub classes: [ClassMetrics; 2],
    pub accuracy: f64,
    pub macro_avg: ClassMetrics,
    pub weighted_avg: ClassMetrics,
    pub confusion: ConfusionMatrix,
    /// Some precision, recall or F1 had a zero denominator and was set to 0.
    pub zero_division: bool,
}

fn ratio(num: usize, den: usize, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvaluationReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        let total = confusion.total();
        if total == 0 {
            return Err(Error::Empty("predictions"));
        }
        let c = &confusion.counts;
        let mut zero_division = false;
        let mut classes = [ClassMetrics::default(); 2];
        for (i, m) in classes.iter_mut().enumerate() {
            let tp = c[i][i];
            let predicted = c[0][i] + c[1][i];
            let support = c[i][0] + c[i][1];
            let precision = ratio(tp, predicted, &mut zero_division);
            let recall = ratio(tp, support, &mut zero_division);
            let f1 = if precision + recall == 0.0 {
                zero_division = true;
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            *m = ClassMetrics {
                precision,
                recall,
                f1,
                support,
            };
        }
        let avg = |w: [f64; 2]| {
            let sum: f64 = w.iter().sum();
            let mix = |f: fn(&ClassMetrics) -> f64| (w[0] * f(&classes[0]) + w[1] * f(&classes[1])) / sum;
            ClassMetrics {
                precision: mix(|m| m.precision),
                recall: mix(|m| m.recall),
                f1: mix(|m| m.f1),
                support: total,
            }
        };
        Ok(EvaluationReport {
            case: None,
            k: None,
            seed: None,
            label_names: None,
            classes,
            accuracy: confusion.correct() as f64 / total as f64,
            macro_avg: avg([1.0, 1.0]),
            weighted_avg: avg([classes[0].support as f64, classes[1].support as f64]),
            confusion,
            zero_division,
        })
    }

    pub fn support_total(&self) -> usize {
        self.classes.iter().map(|c| c.support).sum()
    }

    /// Re-derives every cell from the confusion matrix and reports the first
    /// one that disagrees by more than `tol`.
    pub fn verify(&self, tol: f64) -> std::result::Result<(), String> {
        let c = self.confusion.counts;
        let total = (c[0][0] + c[0][1] + c[1][0] + c[1][1]) as f64;
        let close = |name: &str, got: f64, want: f64| {
            if (got - want).abs() <= tol {
                Ok(())
            } else {
                Err(format!("{name}: reported {got}, recomputed {want}"))
            }
        };
        close("accuracy", self.accuracy, (c[0][0] + c[1][1]) as f64 / total)?;
        let mut per = [[0.0; 3]; 2];
        for i in 0..2 {
            let j = 1 - i;
            let tp = c[i][i] as f64;
            let p = if tp + c[j][i] as f64 > 0.0 { tp / (tp + c[j][i] as f64) } else { 0.0 };
            let r = if tp + c[i][j] as f64 > 0.0 { tp / (tp + c[i][j] as f64) } else { 0.0 };
            let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            per[i] = [p, r, f];
            let m = &self.classes[i];
            if m.support != c[i][0] + c[i][1] {
                return Err(format!("class {i} support {} != {}", m.support, c[i][0] + c[i][1]));
            }
            close(&format!("class {i} precision"), m.precision, p)?;
            close(&format!("class {i} recall"), m.recall, r)?;
            close(&format!("class {i} f1"), m.f1, f)?;
        }
        let s = [(c[0][0] + c[0][1]) as f64, (c[1][0] + c[1][1]) as f64];
        for (k, name) in ["precision", "recall", "f1"].iter().enumerate() {
            let got = [self.macro_avg, self.weighted_avg].map(|m| [m.precision, m.recall, m.f1][k]);
            close(&format!("macro {name}"), got[0], (per[0][k] + per[1][k]) / 2.0)?;
            close(
                &format!("weighted {name}"),
                got[1],
                (s[0] * per[0][k] + s[1] * per[1][k]) / total,
            )?;
        }
        if self.support_total() != total as usize {
            return Err("supports do not sum to the total".into());
        }
        Ok(())
    }

    /// Fixed-width table: precision / recall / f1-score / support, rows
    /// `0`, `1`, accuracy, macro avg, weighted avg, three decimals; followed
    /// by the confusion matrix.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>12} {:>9} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1-score", "support");
        s.push('\n');
        for (i, m) in self.classes.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:>12} {:>9.3} {:>9.3} {:>9.3} {:>9}",
                i, m.precision, m.recall, m.f1, m.support
            );
        }
        s.push('\n');
        let total = self.support_total();
        let _ = writeln!(s, "{:>12} {:>9} {:>9} {:>9.3} {:>9}", "accuracy", "", "", self.accuracy, total);
        for (name, m) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            let _ = writeln!(
                s,
                "{:>12} {:>9.3} {:>9.3} {:>9.3} {:>9}",
                name, m.precision, m.recall, m.f1, m.support
            );
        }
        s.push('\n');
        let _ = writeln!(s, "confusion matrix (rows: true class, columns: predicted)");
        let _ = writeln!(s, "{:>12} {:>9} {:>9}", "", 0, 1);
        for (i, row) in self.confusion.counts.iter().enumerate() {
            let _ = writeln!(s, "{:>12} {:>9} {:>9}", i, row[0], row[1]);
        }
        if let Some(names) = &self.label_names {
            let _ = writeln!(s, "\nclass 0 = {}, class 1 = {}", names.negative, names.positive);
        }
        if self.zero_division {
            let _ = writeln!(s, "note: some cells had a zero denominator and are reported as 0");
        }
        s
    }

    /// CSV with header `row,precision,recall,f1-score,support`, full precision.
    pub fn render_csv(&self) -> String {
        let mut s = String::from("row,precision,recall,f1-score,support\n");
        for (i, m) in self.classes.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{},{},{}", m.precision, m.recall, m.f1, m.support);
        }
        let _ = writeln!(s, "accuracy,,,{},{}", self.accuracy, self.support_total());
        for (name, m) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            let _ = writeln!(s, "{name},{},{},{},{}", m.precision, m.recall, m.f1, m.support);
        }
        s
    }
}

pub fn classification_report(predictions: &[Label], truths: &[Label]) -> Result<EvaluationReport> {
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            found: predictions.len(),
        });
    }
    EvaluationReport::from_confusion(ConfusionMatrix::from_labels(predictions, truths))
}

pub fn run_case(data: &Dataset, case: CaseId, spec: &SplitSpec, k: usize) -> Result<EvaluationReport> {
    run_case_with(data, case, spec, &CaseOptions::new(k))
}

pub fn run_case_with(data: &Dataset, case: CaseId, spec: &SplitSpec, opts: &CaseOptions) -> Result<EvaluationReport> {
    let (train, validation) = split(&data.points, spec)?;
    let covariance_points = match opts.case2_scope {
        Case2Scope::AllData => &data.points[..],
        Case2Scope::TrainingOnly => &train[..],
    };
    let model = fit_case(case, &train, covariance_points, &data.label_names, opts)?;
    let predictions = model.predict_labeled(&validation)?;
    let truths: Vec<Label> = validation.iter().map(|p| p.label).collect();
    let mut report = classification_report(&predictions, &truths)?;
    report.case = Some(case);
    report.k = Some(opts.k);
    report.seed = Some(spec.seed);
    report.label_names = Some(data.label_names.clone());
    Ok(report)
}

/// Misclassification curve over `k_range` on one split.
pub fn sweep_case(
    data: &Dataset,
    case: CaseId,
    spec: &SplitSpec,
    k_range: RangeInclusive<usize>,
    opts: &CaseOptions,
) -> Result<SweepResult> {
    let (train, validation) = split(&data.points, spec)?;
    let covariance_points = match opts.case2_scope {
        Case2Scope::AllData => &data.points[..],
        Case2Scope::TrainingOnly => &train[..],
    };
    let metric = build_metric(case, &train, covariance_points, &data.label_names, opts.jitter)?;
    knn::sweep_k(&train, &validation, &metric, k_range, opts.tie_rule)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvMethod {
    Loocv,
    Kfold,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub size: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub method: CvMethod,
    pub case: CaseId,
    pub k: usize,
    pub seed: Option<u64>,
    pub folds: Vec<FoldResult>,
    /// Unweighted mean of the per-fold accuracies.
    pub mean_accuracy: f64,
}

fn cross_validate(
    data: &Dataset,
    case: CaseId,
    opts: &CaseOptions,
    assignment: &[Vec<usize>],
) -> Result<Vec<FoldResult>> {
    let n = data.points.len();
    assignment
        .par_iter()
        .enumerate()
        .map(|(fold, held_out)| {
            let mut is_held = vec![false; n];
            held_out.iter().for_each(|&i| is_held[i] = true);
            let train: Vec<LabeledPoint> = (0..n).filter(|&i| !is_held[i]).map(|i| data.points[i].clone()).collect();
            let test: Vec<LabeledPoint> = held_out.iter().map(|&i| data.points[i].clone()).collect();
            let run = || -> Result<FoldResult> {
                let model = fit_case(case, &train, &train, &data.label_names, opts)?;
                let predictions = model.predict_labeled(&test)?;
                let correct = predictions.iter().zip(&test).filter(|(p, t)| **p == t.label).count();
                Ok(FoldResult {
                    fold,
                    size: test.len(),
                    correct,
                    accuracy: correct as f64 / test.len() as f64,
                })
            };
            run().map_err(|e| e.in_fold(fold))
        })
        .collect()
}

fn mean_of(folds: &[FoldResult]) -> f64 {
    folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64
}

/// Leave-one-out: one fold per point, in dataset order.
pub fn loocv(data: &Dataset, case: CaseId, k: usize) -> Result<CvSummary> {
    loocv_with(data, case, &CaseOptions::new(k))
}

pub fn loocv_with(data: &Dataset, case: CaseId, opts: &CaseOptions) -> Result<CvSummary> {
    if data.points.len() < 2 {
        return Err(Error::InvalidSplit("leave-one-out needs at least 2 points".into()));
    }
    let assignment: Vec<Vec<usize>> = (0..data.points.len()).map(|i| vec![i]).collect();
    let folds = cross_validate(data, case, opts, &assignment)?;
    Ok(CvSummary {
        method: CvMethod::Loocv,
        case,
        k: opts.k,
        seed: None,
        mean_accuracy: mean_of(&folds),
        folds,
    })
}

pub fn kfold_cv(data: &Dataset, case: CaseId, k: usize, folds: usize, seed: u64) -> Result<CvSummary> {
    kfold_cv_with(data, case, &CaseOptions::new(k), folds, seed)
}

pub fn kfold_cv_with(data: &Dataset, case: CaseId, opts: &CaseOptions, folds: usize, seed: u64) -> Result<CvSummary> {
    let assignment = fold_assignment(&data.points, folds, seed)?;
    let results = cross_validate(data, case, opts, &assignment)?;
    Ok(CvSummary {
        method: CvMethod::Kfold,
        case,
        k: opts.k,
        seed: Some(seed),
        mean_accuracy: mean_of(&results),
        folds: results,
    })
}

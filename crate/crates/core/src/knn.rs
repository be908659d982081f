//! Brute-force k-nearest-neighbors over cosine distance, with the query and
//! training vectors optionally whitened first.
//!
//! Neighbors are ranked by `(distance, record id)`, so results do not depend
//! on the order the training set was supplied in. Exactly `k` neighbors are
//! taken even when distances tie at the k-th rank.
//!
//! [`MetricMode::PerClassWhitened`] whitens every point with the inverse
//! factor of its *own* class. For training points the class is known; for a
//! query the caller must pass the true label as a hint. That is a label
//! leak, and it is the reason this mode reaches perfect accuracy on WDBC.
//! The hint is mandatory for that mode and rejected for the others.

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    cosine_similarity, whiten, ExpectedTransform, SimilarityScore, Transform, WhiteningTransform, ZERO_NORM,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// Row index in reports: negative is class 0, positive is class 1.
    pub fn index(self) -> usize {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Negative => "negative",
            Label::Positive => "positive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub id: u64,
    pub features: Vec<f64>,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(id: u64, features: Vec<f64>, label: Label) -> Self {
        LabeledPoint { id, features, label }
    }
}

impl AsRef<[f64]> for LabeledPoint {
    fn as_ref(&self) -> &[f64] {
        &self.features
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricMode {
    RawCosine,
    PerClassWhitened {
        positive: WhiteningTransform,
        negative: WhiteningTransform,
    },
    ExpectedWhitened(ExpectedTransform),
}

impl MetricMode {
    fn dim(&self) -> Option<usize> {
        match self {
            MetricMode::RawCosine => None,
            MetricMode::PerClassWhitened { positive, .. } => Some(positive.dim()),
            MetricMode::ExpectedWhitened(e) => Some(e.dim()),
        }
    }

    pub fn needs_hint(&self) -> bool {
        matches!(self, MetricMode::PerClassWhitened { .. })
    }

    /// Maps `x` into the space where neighbors are compared.
    pub fn transform(&self, x: &[f64], label: Option<Label>) -> Result<Vec<f64>> {
        match (self, label) {
            (MetricMode::RawCosine, None) => Ok(x.to_vec()),
            (MetricMode::ExpectedWhitened(e), None) => whiten(e, x),
            (MetricMode::PerClassWhitened { positive, .. }, Some(Label::Positive)) => whiten(positive, x),
            (MetricMode::PerClassWhitened { negative, .. }, Some(Label::Negative)) => whiten(negative, x),
            (MetricMode::PerClassWhitened { .. }, None) => Err(Error::HintRequired),
            (_, Some(_)) => Err(Error::HintForbidden),
        }
    }
}

/// How to break a vote tie between the two classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieRule {
    /// Label of the nearest neighbor (smallest record id among equidistant ones).
    #[default]
    NearestNeighbor,
    Prefer(Label),
}

#[derive(Clone, Debug)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: MetricMode,
    pub tie_rule: TieRule,
}

impl KnnConfig {
    pub const DEFAULT_K: usize = 13;

    pub fn new(metric: MetricMode) -> Self {
        KnnConfig {
            k: Self::DEFAULT_K,
            metric,
            tie_rule: TieRule::default(),
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: u64,
    pub label: Label,
    pub distance: f64,
}

fn neighbor_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then(a.id.cmp(&b.id))
        .then(a.label.cmp(&b.label))
}

/// Unweighted majority vote over `neighbors` (already ranked).
pub fn vote(neighbors: &[Neighbor], tie_rule: TieRule) -> Label {
    let positives = neighbors.iter().filter(|n| n.label == Label::Positive).count();
    let negatives = neighbors.len() - positives;
    match positives.cmp(&negatives) {
        Ordering::Greater => Label::Positive,
        Ordering::Less => Label::Negative,
        Ordering::Equal => match tie_rule {
            TieRule::NearestNeighbor => neighbors.first().map_or(Label::Negative, |n| n.label),
            TieRule::Prefer(label) => label,
        },
    }
}

#[derive(Clone, Debug)]
struct Stored {
    id: u64,
    label: Label,
    vector: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FittedKnn {
    config: KnnConfig,
    dim: usize,
    train: Vec<Stored>,
}

pub fn fit(train: &[LabeledPoint], config: KnnConfig) -> Result<FittedKnn> {
    let first = train.first().ok_or(Error::Empty("training set"))?;
    if config.k == 0 || config.k > train.len() {
        return Err(Error::InvalidK {
            k: config.k,
            n: train.len(),
        });
    }
    let dim = first.features.len();
    if let Some(p) = config.metric.dim() {
        if p != dim {
            return Err(Error::DimensionMismatch { expected: p, found: dim });
        }
    }
    if config.metric.needs_hint() {
        for label in [Label::Positive, Label::Negative] {
            if !train.iter().any(|p| p.label == label) {
                return Err(Error::MissingClass(label));
            }
        }
    }
    let mut stored = train
        .iter()
        .map(|p| {
            if p.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.features.len(),
                });
            }
            let hint = config.metric.needs_hint().then_some(p.label);
            let vector = config.metric.transform(&p.features, hint)?;
            if vector.iter().map(|v| v * v).sum::<f64>().sqrt() < ZERO_NORM {
                return Err(Error::ZeroVector);
            }
            Ok(Stored {
                id: p.id,
                label: p.label,
                vector,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    stored.sort_by(|a, b| a.id.cmp(&b.id).then(a.label.cmp(&b.label)));
    Ok(FittedKnn {
        config,
        dim,
        train: stored,
    })
}

impl FittedKnn {
    pub fn config(&self) -> &KnnConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    /// All training points ranked by `distance_of(similarity)`, nearest first.
    pub fn neighbors_by<F>(&self, x: &[f64], hint: Option<Label>, distance_of: F) -> Result<Vec<Neighbor>>
    where
        F: Fn(SimilarityScore) -> f64,
    {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let q = self.config.metric.transform(x, hint)?;
        let mut ranked = self
            .train
            .iter()
            .map(|s| {
                Ok(Neighbor {
                    id: s.id,
                    label: s.label,
                    distance: distance_of(cosine_similarity(&q, &s.vector)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ranked.sort_by(neighbor_order);
        Ok(ranked)
    }

    /// All training points ranked by `1 - cos`, nearest first.
    pub fn neighbors(&self, x: &[f64], hint: Option<Label>) -> Result<Vec<Neighbor>> {
        self.neighbors_by(x, hint, SimilarityScore::distance)
    }

    pub fn predict(&self, x: &[f64], hint: Option<Label>) -> Result<Label> {
        let ranked = self.neighbors(x, hint)?;
        Ok(vote(&ranked[..self.config.k], self.config.tie_rule))
    }

    /// Predicts every point, passing its true label as the hint only when the
    /// metric requires one (the per-class oracle mode).
    pub fn predict_labeled(&self, points: &[LabeledPoint]) -> Result<Vec<Label>> {
        let oracle = self.config.metric.needs_hint();
        points
            .par_iter()
            .map(|p| self.predict(&p.features, oracle.then_some(p.label)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub misclassification_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Smallest k attaining the minimum rate.
    pub best_k: usize,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "k,misclassification_rate";

    /// `k,misclassification_rate` rows at full precision.
    pub fn render_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.k, r.misclassification_rate));
        }
        out
    }
}

/// Misclassification rate on `validation` for every k in `k_range`.
pub fn sweep_k(
    train: &[LabeledPoint],
    validation: &[LabeledPoint],
    metric: &MetricMode,
    k_range: RangeInclusive<usize>,
    tie_rule: TieRule,
) -> Result<SweepResult> {
    if k_range.is_empty() {
        return Err(Error::EmptyRange);
    }
    if validation.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    let (k_min, k_max) = (*k_range.start(), *k_range.end());
    if k_min == 0 {
        return Err(Error::InvalidK { k: 0, n: train.len() });
    }
    let model = fit(
        train,
        KnnConfig {
            k: k_max,
            metric: metric.clone(),
            tie_rule,
        },
    )?;
    let oracle = metric.needs_hint();
    let errors_per_point: Vec<Vec<bool>> = validation
        .par_iter()
        .map(|p| {
            let ranked = model.neighbors(&p.features, oracle.then_some(p.label))?;
            Ok(k_range
                .clone()
                .map(|k| vote(&ranked[..k], tie_rule) != p.label)
                .collect())
        })
        .collect::<Result<_>>()?;

    let n = validation.len() as f64;
    let rows: Vec<SweepRow> = k_range
        .clone()
        .enumerate()
        .map(|(i, k)| SweepRow {
            k,
            misclassification_rate: errors_per_point.iter().filter(|e| e[i]).count() as f64 / n,
        })
        .collect();
    let best = rows
        .iter()
        .fold(rows[0], |best, r| if r.misclassification_rate < best.misclassification_rate { *r } else { best });
    Ok(SweepResult { rows, best_k: best.k })
}

//! Independent oracles shared by the integration and acceptance tests. None
//! of these call into the library's numeric routines.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varcos::data::{load_wdbc, Dataset};
use varcos::knn::{Label, LabeledPoint, MetricMode, TieRule};
use varcos::metrics::Transform;

pub fn wdbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wdbc.data")
}

pub fn wdbc() -> Dataset {
    load_wdbc(&wdbc_path()).expect("bundled WDBC file")
}

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `B Bᵀ + p·I` with `B` uniform in [-1, 1].
pub fn random_pd(rng: &mut ChaCha8Rng, p: usize) -> Dense {
    let b: Dense = (0..p).map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let s: f64 = (0..p).map(|k| b[i][k] * b[j][k]).sum();
                    s + if i == j { p as f64 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(m: &Dense) -> Dense {
    let n = m.len();
    let mut a: Dense = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let src = a[col].clone();
                    a[r].iter_mut().zip(src).for_each(|(v, s)| *v -= f * s);
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn quad_form(x: &[f64], m: &Dense) -> f64 {
    (0..x.len())
        .map(|i| (0..x.len()).map(|j| x[i] * m[i][j] * x[j]).sum::<f64>())
        .sum()
}

/// Covariance through the pairwise identity
/// `Σ = 1/(2n²) Σᵢ Σⱼ (xᵢ - xⱼ)(xᵢ - xⱼ)ᵀ` (population divisor).
pub fn pairwise_covariance(xs: &[Vec<f64>], sample: bool) -> Dense {
    let n = xs.len();
    let p = xs[0].len();
    let mut out = vec![vec![0.0; p]; p];
    for a in xs {
        for b in xs {
            for i in 0..p {
                for j in 0..p {
                    out[i][j] += (a[i] - b[i]) * (a[j] - b[j]);
                }
            }
        }
    }
    let div = 2.0 * (n * n) as f64;
    let scale = if sample { n as f64 / (n - 1) as f64 } else { 1.0 };
    out.iter_mut()
        .flatten()
        .for_each(|v| *v = *v / div * scale);
    out
}

fn mat_vec(m: &Dense, x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// The transform matrix the metric applies to a point of class `label`.
fn matrix_for(metric: &MetricMode, label: Label) -> Option<Dense> {
    match metric {
        MetricMode::RawCosine => None,
        MetricMode::PerClassWhitened { positive, negative } => Some(match label {
            Label::Positive => positive.matrix().to_rows(),
            Label::Negative => negative.matrix().to_rows(),
        }),
        MetricMode::ExpectedWhitened(e) => Some(e.matrix().to_rows()),
    }
}

/// Exhaustive KNN: build the full query-to-train distance table, sort it
/// by (distance, id), vote over the first k, break ties by nearest.
pub fn brute_force_predict(train: &[LabeledPoint], query: &LabeledPoint, metric: &MetricMode, k: usize) -> Label {
    let map = |p: &LabeledPoint| match matrix_for(metric, p.label) {
        Some(m) => mat_vec(&m, &p.features),
        None => p.features.clone(),
    };
    let q = map(query);
    let mut table: Vec<(f64, u64, Label)> = train
        .iter()
        .map(|t| (1.0 - cos(&q, &map(t)), t.id, t.label))
        .collect();
    table.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let top = &table[..k];
    let pos = top.iter().filter(|t| t.2 == Label::Positive).count();
    let neg = k - pos;
    if pos > neg {
        Label::Positive
    } else if neg > pos {
        Label::Negative
    } else {
        top[0].2
    }
}

pub fn default_tie() -> TieRule {
    TieRule::NearestNeighbor
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Two Gaussian-ish classes in `p` dimensions, shifted apart, all features
/// positive so no vector is near zero.
pub fn two_class_points(seed: u64, n: usize, p: usize) -> Vec<LabeledPoint> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
            let shift = if label == Label::Positive { 3.0 } else { 1.0 };
            let features = (0..p)
                .map(|j| 5.0 + shift * ((j % 2) as f64) + r.gen_range(-1.0..1.0) * (1.0 + 0.3 * j as f64))
                .collect();
            LabeledPoint::new(1000 + (n - i) as u64, features, label)
        })
        .collect()
}

//! Dataset ingestion and the synthetic correlated-Gaussian generator.
//!
//! # Random numbers
//!
//! All sampling goes through [`NormalStream`], which is pinned so fixtures
//! can be reproduced by other implementations:
//!
//! * PRNG: ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`).
//! * Uniform: `u = (next_u64() >> 11) · 2⁻⁵³`, giving `u ∈ [0, 1)`.
//! * Normal: basic Box–Muller on consecutive uniforms `u1, u2`:
//!   `r = sqrt(-2 ln(1 - u1))`, emitting `r cos(2π u2)` then `r sin(2π u2)`.
//!
//! A multivariate draw is `L z + mean` where `L` is the lower Cholesky factor
//! of the covariance and `z` holds `p` consecutive normals.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::{Label, LabeledPoint};
use crate::linalg::{apply, cholesky_lower, CholeskyOptions, CovarianceMatrix, EstimationMode, Matrix};
use crate::metrics::{cosine_similarity, mahalanobis_sq, whiten, WhiteningTransform};

pub const WDBC_FEATURE_NAMES: [&str; 30] = [
    "radius_mean",
    "texture_mean",
    "perimeter_mean",
    "area_mean",
    "smoothness_mean",
    "compactness_mean",
    "concavity_mean",
    "concave_points_mean",
    "symmetry_mean",
    "fractal_dimension_mean",
    "radius_se",
    "texture_se",
    "perimeter_se",
    "area_se",
    "smoothness_se",
    "compactness_se",
    "concavity_se",
    "concave_points_se",
    "symmetry_se",
    "fractal_dimension_se",
    "radius_worst",
    "texture_worst",
    "perimeter_worst",
    "area_worst",
    "smoothness_worst",
    "compactness_worst",
    "concavity_worst",
    "concave_points_worst",
    "symmetry_worst",
    "fractal_dimension_worst",
];

const WDBC_FIELDS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelNames {
    pub positive: String,
    pub negative: String,
}

impl LabelNames {
    pub fn name(&self, label: Label) -> &str {
        match label {
            Label::Positive => &self.positive,
            Label::Negative => &self.negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    File(PathBuf),
    Generated { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<LabeledPoint>,
    pub feature_names: Vec<String>,
    pub label_names: LabelNames,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    /// `(positive, negative)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        class_counts(&self.points)
    }

    /// Writes an RFC-4180 CSV with header `id,label,<features...>` that
    /// [`load_generic_csv`] reads back bit-identically.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let mut header = vec!["id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for p in &self.points {
            let mut rec = vec![p.id.to_string(), self.label_names.name(p.label).to_string()];
            // `{}` on f64 prints the shortest string that parses back exactly.
            rec.extend(p.features.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn class_counts(points: &[LabeledPoint]) -> (usize, usize) {
    let pos = points.iter().filter(|p| p.label == Label::Positive).count();
    (pos, points.len() - pos)
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "?" | "NA" | "N/A" | "na" | "NaN" | "nan" | "null")
}

fn warn_duplicate_ids(path: &Path, points: &[LabeledPoint]) {
    let mut seen = HashSet::new();
    for p in points {
        if !seen.insert(p.id) {
            log::warn!("{}: duplicate record id {}", path.display(), p.id);
        }
    }
}

/// Loads the WDBC `wdbc.data` layout: `id,diagnosis,<30 features>`, no
/// quoting, optional header. `M` is the positive class, `B` the negative.
pub fn load_wdbc(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };

    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let is_header = i == 0
            && fields.len() > 2
            && !matches!(fields[1], "M" | "B")
            && fields[2].parse::<f64>().is_err();
        if is_header {
            continue;
        }
        if fields.len() != WDBC_FIELDS {
            return Err(parse_err(
                row,
                format!("expected {WDBC_FIELDS} fields, found {}", fields.len()),
            ));
        }
        let id = fields[0]
            .parse::<u64>()
            .map_err(|_| parse_err(row, format!("invalid id {:?}", fields[0])))?;
        let label = match fields[1] {
            "M" => Label::Positive,
            "B" => Label::Negative,
            other => return Err(parse_err(row, format!("unknown diagnosis code {other:?}"))),
        };
        let features = fields[2..]
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                if is_missing(cell) {
                    return Err(Error::MissingValue {
                        path: path.to_path_buf(),
                        row,
                        column: WDBC_FEATURE_NAMES[j].to_string(),
                    });
                }
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        parse_err(row, format!("non-numeric {} value {cell:?}", WDBC_FEATURE_NAMES[j]))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(LabeledPoint { id, features, label });
    }
    if points.is_empty() {
        return Err(Error::Empty("WDBC file has no data rows"));
    }
    warn_duplicate_ids(path, &points);
    Ok(Dataset {
        points,
        feature_names: WDBC_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        label_names: LabelNames {
            positive: "M".into(),
            negative: "B".into(),
        },
        provenance: Provenance::File(path.to_path_buf()),
    })
}

/// Loads a headed CSV with a two-valued label column. A column named `id`
/// (any case) supplies record ids; otherwise ids are 1-based data row
/// numbers. Every other column must be numeric and becomes a feature.
pub fn load_generic_csv(path: &Path, label_column: &str, positive_name: &str) -> Result<Dataset> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::UnknownColumn {
            path: path.to_path_buf(),
            name: label_column.to_string(),
        })?;
    let id_idx = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("id"))
        .filter(|&i| i != label_idx);
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| i != label_idx && Some(i) != id_idx)
        .collect();

    let mut raw: Vec<(u64, String, Vec<f64>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i + 2; // header is line 1
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        let id = match id_idx {
            Some(j) => record[j]
                .parse::<u64>()
                .map_err(|_| parse_err(format!("invalid id {:?}", &record[j])))?,
            None => (i + 1) as u64,
        };
        let label = record[label_idx].to_string();
        if is_missing(&label) {
            return Err(Error::MissingValue {
                path: path.to_path_buf(),
                row,
                column: label_column.to_string(),
            });
        }
        let features = feature_idx
            .iter()
            .map(|&j| {
                let cell = &record[j];
                if is_missing(cell) {
                    return Err(Error::MissingValue {
                        path: path.to_path_buf(),
                        row,
                        column: headers[j].clone(),
                    });
                }
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("non-numeric value {cell:?} in column {}", headers[j])))
            })
            .collect::<Result<Vec<f64>>>()?;
        raw.push((id, label, features));
    }
    if raw.is_empty() {
        return Err(Error::Empty("CSV file has no data rows"));
    }

    let distinct: BTreeSet<&str> = raw.iter().map(|(_, l, _)| l.as_str()).collect();
    if distinct.len() != 2 {
        return Err(Error::LabelCount {
            path: path.to_path_buf(),
            found: distinct.into_iter().map(String::from).collect(),
        });
    }
    if !distinct.contains(positive_name) {
        return Err(Error::UnknownLabel {
            path: path.to_path_buf(),
            name: positive_name.to_string(),
        });
    }
    let negative_name = distinct.iter().find(|l| **l != positive_name).unwrap().to_string();

    let points: Vec<LabeledPoint> = raw
        .into_iter()
        .map(|(id, label, features)| LabeledPoint {
            id,
            features,
            label: if label == positive_name {
                Label::Positive
            } else {
                Label::Negative
            },
        })
        .collect();
    warn_duplicate_ids(path, &points);
    Ok(Dataset {
        points,
        feature_names: feature_idx.iter().map(|&j| headers[j].clone()).collect(),
        label_names: LabelNames {
            positive: positive_name.to_string(),
            negative: negative_name,
        },
        provenance: Provenance::File(path.to_path_buf()),
    })
}

/// Seeded standard-normal stream; see the module docs for the exact recipe.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub covariance: CovarianceMatrix,
    pub n: usize,
    pub seed: u64,
}

pub fn generate_gaussian(spec: &GaussianSpec) -> Result<Vec<Vec<f64>>> {
    let p = spec.covariance.dim();
    if spec.mean.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: spec.mean.len(),
        });
    }
    if spec.n == 0 {
        return Err(Error::Empty("sample count"));
    }
    let l = cholesky_lower(&spec.covariance)?;
    let mut normals = NormalStream::new(spec.seed);
    (0..spec.n)
        .map(|_| {
            let z: Vec<f64> = (0..p).map(|_| normals.next_normal()).collect();
            let x = apply(l.as_matrix(), &z)?;
            Ok(x.iter().zip(&spec.mean).map(|(a, m)| a + m).collect())
        })
        .collect()
}

/// Cosines of the pairs (A, B) and (B, C).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCosines {
    pub a_b: f64,
    pub b_c: f64,
}

impl PairCosines {
    /// True when B is angularly closer to A than to C.
    pub fn prefers_a(&self) -> bool {
        self.a_b > self.b_c
    }
}

/// Three points where whitening reverses which neighbor of B looks closest.
///
/// B and C are typical draws from a zero-mean correlated Gaussian; A lies
/// outside the distribution's 3σ ellipse. Plain cosine puts B nearer to A,
/// the adjusted cosine puts B nearer to C.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub covariance: CovarianceMatrix,
    pub seed: u64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub plain: PairCosines,
    pub adjusted: PairCosines,
    pub attempts: usize,
}

pub const FIG1_CORRELATION: f64 = 0.9;
pub const FIG1_MAX_ATTEMPTS: usize = 10_000;
/// Both rankings must be decided by at least this much cosine.
pub const FIG1_MARGIN: f64 = 0.01;
const INLIER_MAHALANOBIS_SQ: f64 = 2.0;
const OUTLIER_MAHALANOBIS_SQ: f64 = 9.0;

/// Unit variances with correlation 0.9.
pub fn fig1_covariance() -> CovarianceMatrix {
    let m = Matrix::from_rows(&[[1.0, FIG1_CORRELATION], [FIG1_CORRELATION, 1.0]]).unwrap();
    CovarianceMatrix::new(m, EstimationMode::Population, 2).unwrap()
}

pub fn fig1_counterexample(seed: u64) -> Result<Counterexample> {
    fig1_counterexample_with(&fig1_covariance(), seed)
}

fn is_isotropic(c: &CovarianceMatrix) -> bool {
    let m = c.matrix();
    let d0 = m[(0, 0)];
    let tol = 1e-12 * m.max_abs();
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            let want = if i == j { d0 } else { 0.0 };
            (m[(i, j)] - want).abs() <= tol
        })
    })
}

/// Seeded rejection search for a ranking flip under `covariance` (mean 0).
pub fn fig1_counterexample_with(covariance: &CovarianceMatrix, seed: u64) -> Result<Counterexample> {
    if is_isotropic(covariance) {
        return Err(Error::CounterexampleInapplicable);
    }
    let p = covariance.dim();
    let t = WhiteningTransform::from_covariance(covariance, None, CholeskyOptions::default())?;
    let l = t.factor().as_matrix().clone();
    let origin = vec![0.0; p];
    let sd: Vec<f64> = (0..p).map(|i| covariance.matrix()[(i, i)].sqrt()).collect();
    let mut rng = NormalStream::new(seed);

    let inlier = |rng: &mut NormalStream| -> Result<Vec<f64>> {
        let z: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
        apply(&l, &z)
    };

    for attempt in 1..=FIG1_MAX_ATTEMPTS {
        let b = inlier(&mut rng)?;
        let c = inlier(&mut rng)?;
        let a: Vec<f64> = sd.iter().map(|s| (rng.uniform() * 8.0 - 4.0) * s).collect();
        if mahalanobis_sq(&b, &origin, &t)? > INLIER_MAHALANOBIS_SQ
            || mahalanobis_sq(&c, &origin, &t)? > INLIER_MAHALANOBIS_SQ
            || mahalanobis_sq(&a, &origin, &t)? < OUTLIER_MAHALANOBIS_SQ
        {
            continue;
        }
        let (Ok(plain), Ok(adjusted)) = (pair_cosines(&a, &b, &c, None), pair_cosines(&a, &b, &c, Some(&t)))
        else {
            continue;
        };
        if plain.a_b - plain.b_c > FIG1_MARGIN && adjusted.b_c - adjusted.a_b > FIG1_MARGIN {
            return Ok(Counterexample {
                covariance: covariance.clone(),
                seed,
                a,
                b,
                c,
                plain,
                adjusted,
                attempts: attempt,
            });
        }
    }
    Err(Error::CounterexampleNotFound {
        attempts: FIG1_MAX_ATTEMPTS,
    })
}

/// Cosines of (A, B) and (B, C), optionally after whitening all three.
pub fn pair_cosines(a: &[f64], b: &[f64], c: &[f64], t: Option<&WhiteningTransform>) -> Result<PairCosines> {
    let (a, b, c) = match t {
        Some(t) => (whiten(t, a)?, whiten(t, b)?, whiten(t, c)?),
        None => (a.to_vec(), b.to_vec(), c.to_vec()),
    };
    Ok(PairCosines {
        a_b: cosine_similarity(&a, &b)?.value(),
        b_c: cosine_similarity(&b, &c)?.value(),
    })
}

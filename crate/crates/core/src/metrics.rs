//! Cosine similarity, Mahalanobis distance, and the variance-adjusted cosine.
//!
//! The adjusted cosine compares two vectors after both have been mapped
//! through the same whitening matrix: either the inverse Cholesky factor of a
//! single class covariance ([`WhiteningTransform`]) or the prior-weighted mix
//! of the two class inverses ([`ExpectedTransform`]). Whitening is applied to
//! the raw vector with no mean subtraction unless a transform was explicitly
//! built with [`WhiteningTransform::with_centering`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::Label;
use crate::linalg::{
    apply, cholesky_lower_with, covariance, invert_lower_triangular, CholeskyOptions,
    CovarianceMatrix, EstimationMode, LowerTriangular, Matrix,
};

/// Norms below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-300;

/// A cosine-family score clamped into `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(raw: f64) -> Self {
        SimilarityScore(raw.clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - cos`, in `[0, 2]`.
    pub fn distance(self) -> f64 {
        1.0 - self.0
    }
}

fn same_dim(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<SimilarityScore> {
    same_dim(a, b)?;
    let (na, nb) = (norm(a), norm(b));
    if na < ZERO_NORM || nb < ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(SimilarityScore::new(dot / (na * nb)))
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    cosine_similarity(a, b).map(SimilarityScore::distance)
}

/// A linear map used to whiten feature vectors before comparing them.
pub trait Transform {
    fn matrix(&self) -> &Matrix;

    fn center(&self) -> Option<&[f64]> {
        None
    }

    fn dim(&self) -> usize {
        self.matrix().cols()
    }
}

/// Inverse Cholesky factor of one covariance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhiteningTransform {
    class_label: Option<Label>,
    factor: LowerTriangular,
    inverse_factor: LowerTriangular,
    source_mode: EstimationMode,
    center: Option<Vec<f64>>,
}

impl WhiteningTransform {
    pub fn from_covariance(
        cov: &CovarianceMatrix,
        class_label: Option<Label>,
        opts: CholeskyOptions,
    ) -> Result<Self> {
        let factor = cholesky_lower_with(cov, opts)?;
        let inverse_factor = invert_lower_triangular(&factor)?;
        Ok(WhiteningTransform {
            class_label,
            factor,
            inverse_factor,
            source_mode: cov.mode(),
            center: None,
        })
    }

    /// Estimates the covariance of `samples` and factorizes it.
    pub fn fit<S: AsRef<[f64]>>(
        samples: &[S],
        mode: EstimationMode,
        class_label: Option<Label>,
        opts: CholeskyOptions,
    ) -> Result<Self> {
        let cov = covariance(samples, mode)?;
        WhiteningTransform::from_covariance(&cov, class_label, opts)
    }

    pub fn identity(p: usize) -> Self {
        WhiteningTransform {
            class_label: None,
            factor: LowerTriangular::identity(p),
            inverse_factor: LowerTriangular::identity(p),
            source_mode: EstimationMode::Population,
            center: None,
        }
    }

    /// Subtract `mean` before applying the inverse factor. Experimental; none
    /// of the reproduction pipelines center.
    pub fn with_centering(mut self, mean: Vec<f64>) -> Result<Self> {
        if mean.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: mean.len(),
            });
        }
        self.center = Some(mean);
        Ok(self)
    }

    pub fn class_label(&self) -> Option<Label> {
        self.class_label
    }

    pub fn factor(&self) -> &LowerTriangular {
        &self.factor
    }

    pub fn inverse_factor(&self) -> &LowerTriangular {
        &self.inverse_factor
    }

    pub fn source_mode(&self) -> EstimationMode {
        self.source_mode
    }
}

impl Transform for WhiteningTransform {
    fn matrix(&self) -> &Matrix {
        self.inverse_factor.as_matrix()
    }

    fn center(&self) -> Option<&[f64]> {
        self.center.as_deref()
    }
}

/// `prior · L₊⁻¹ + (1 - prior) · L₋⁻¹`, used when the query's class is unknown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedTransform {
    mix: Matrix,
    prior: f64,
    positive: WhiteningTransform,
    negative: WhiteningTransform,
}

impl ExpectedTransform {
    pub fn mix(&self) -> &Matrix {
        &self.mix
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    pub fn components(&self) -> (&WhiteningTransform, &WhiteningTransform) {
        (&self.positive, &self.negative)
    }

    /// Recomputes the mixture from the stored components.
    pub fn recompute_mix(&self) -> Matrix {
        mix_inverses(&self.positive, &self.negative, self.prior)
            .expect("components were validated at construction")
    }
}

impl Transform for ExpectedTransform {
    fn matrix(&self) -> &Matrix {
        &self.mix
    }
}

fn mix_inverses(pos: &WhiteningTransform, neg: &WhiteningTransform, prior: f64) -> Result<Matrix> {
    pos.inverse_factor
        .as_matrix()
        .linear_combination(prior, neg.inverse_factor.as_matrix(), 1.0 - prior)
}

pub fn expected_transform(
    t_pos: &WhiteningTransform,
    t_neg: &WhiteningTransform,
    prior: f64,
) -> Result<ExpectedTransform> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidPrior(prior));
    }
    if t_pos.dim() != t_neg.dim() {
        return Err(Error::DimensionMismatch {
            expected: t_pos.dim(),
            found: t_neg.dim(),
        });
    }
    let mix = if prior == 1.0 {
        t_pos.inverse_factor.as_matrix().clone()
    } else if prior == 0.0 {
        t_neg.inverse_factor.as_matrix().clone()
    } else {
        mix_inverses(t_pos, t_neg, prior)?
    };
    Ok(ExpectedTransform {
        mix,
        prior,
        positive: t_pos.clone(),
        negative: t_neg.clone(),
    })
}

/// Maximum-likelihood estimate of P(positive) from class counts.
pub fn class_prior_mle(n_pos: usize, n_neg: usize) -> Result<f64> {
    let total = n_pos + n_neg;
    if total == 0 {
        return Err(Error::NoClassCounts);
    }
    Ok(n_pos as f64 / total as f64)
}

pub fn whiten<T: Transform + ?Sized>(t: &T, x: &[f64]) -> Result<Vec<f64>> {
    match t.center() {
        Some(mu) => {
            same_dim(mu, x)?;
            let shifted: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
            apply(t.matrix(), &shifted)
        }
        None => apply(t.matrix(), x),
    }
}

/// Cosine similarity after whitening both vectors with the same transform.
pub fn adjusted_cosine<T: Transform + ?Sized>(a: &[f64], b: &[f64], t: &T) -> Result<SimilarityScore> {
    same_dim(a, b)?;
    cosine_similarity(&whiten(t, a)?, &whiten(t, b)?)
}

/// Squared Mahalanobis distance computed as `‖L⁻¹(x − μ)‖²`.
pub fn mahalanobis_sq(x: &[f64], mu: &[f64], t: &WhiteningTransform) -> Result<f64> {
    same_dim(x, mu)?;
    let diff: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
    let z = apply(t.inverse_factor.as_matrix(), &diff)?;
    Ok(z.iter().map(|v| v * v).sum())
}

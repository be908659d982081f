//! Variance-adjusted cosine similarity.
//!
//! Plain cosine similarity treats every feature axis as orthogonal and
//! equally scaled. When features are correlated or have very different
//! variances that assumption fails, and nearest-neighbor rankings follow the
//! covariance structure instead of actual similarity. This crate whitens
//! vectors with the inverse Cholesky factor of a class covariance
//! (`Σ = L Lᵀ`, `z = L⁻¹ x`) before taking the cosine, and provides:
//!
//! * [`linalg`]: covariance estimation, Cholesky, triangular inversion.
//! * [`metrics`]: cosine, Mahalanobis, whitening transforms, the adjusted
//!   cosine and the prior-weighted expected transform.
//! * [`knn`]: brute-force KNN over any of the three metric modes.
//! * [`eval`]: splits, the three reproduction cases, reports, LOOCV, k-fold.
//! * [`data`]: WDBC / generic CSV loading and a seeded Gaussian generator.

pub mod data;
pub mod error;
pub mod eval;
pub mod knn;
pub mod linalg;
pub mod metrics;

pub use error::{Error, Result};
pub use knn::{Label, LabeledPoint};

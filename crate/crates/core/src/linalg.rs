//! Dense small-matrix numerics: covariance estimation, Cholesky
//! factorization, lower-triangular inversion and matrix-vector products.
//!
//! Everything here is plain `f64` over row-major storage. Matrices in this
//! crate are at most a few hundred wide (WDBC is 30x30), so the routines are
//! straightforward loops with no blocking.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry tolerance accepted by [`CovarianceMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// A pivot `d_j` is rejected when `d_j <= PIVOT_TOLERANCE * a_jj`.
///
/// The threshold is taken relative to the pivot's own diagonal entry so that
/// features on wildly different scales (WDBC spans ~11 orders of magnitude in
/// variance) are judged on their conditional variance, not on the largest
/// feature's variance.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Relative diagonal jitter used when [`CholeskyOptions::jitter`] is set.
pub const JITTER_EPSILON: f64 = 1e-10;

/// Dense row-major matrix of finite `f64` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Matrix::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &Matrix, beta: f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Matrix::new(self.rows, self.cols, data)
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Infinity norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Matrix-vector product `m · x`.
pub fn apply(m: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if m.cols != x.len() {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            found: x.len(),
        });
    }
    Ok((0..m.rows)
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMode {
    /// Divisor `n` (the paper's Σ).
    Population,
    /// Divisor `n - 1` (the paper's S).
    Sample,
}

impl EstimationMode {
    fn min_samples(self) -> usize {
        match self {
            EstimationMode::Population => 1,
            EstimationMode::Sample => 2,
        }
    }
}

impl fmt::Display for EstimationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimationMode::Population => "population",
            EstimationMode::Sample => "sample",
        })
    }
}

/// Symmetric p×p covariance estimate tagged with how it was estimated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    matrix: Matrix,
    mode: EstimationMode,
    sample_count: usize,
}

impl CovarianceMatrix {
    /// Wraps an externally supplied matrix (e.g. a known population Σ).
    pub fn new(matrix: Matrix, mode: EstimationMode, sample_count: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows,
                cols: matrix.cols,
            });
        }
        if matrix.rows == 0 {
            return Err(Error::Empty("covariance matrix"));
        }
        let asym = matrix.max_asymmetry();
        if asym > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        if sample_count < mode.min_samples() {
            return Err(Error::TooFewSamples {
                mode,
                required: mode.min_samples(),
                found: sample_count,
            });
        }
        Ok(CovarianceMatrix {
            matrix,
            mode,
            sample_count,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn mode(&self) -> EstimationMode {
        self.mode
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }
}

/// Square lower-triangular matrix with a strictly positive diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct LowerTriangular(Matrix);

impl LowerTriangular {
    pub fn identity(n: usize) -> Self {
        LowerTriangular(Matrix::identity(n))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }
}

impl TryFrom<Matrix> for LowerTriangular {
    type Error = Error;

    fn try_from(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        for i in 0..m.rows {
            for j in (i + 1)..m.cols {
                if m[(i, j)] != 0.0 {
                    return Err(Error::NotLowerTriangular { row: i, col: j });
                }
            }
            if m[(i, i)] <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index: i });
            }
        }
        Ok(LowerTriangular(m))
    }
}

impl From<LowerTriangular> for Matrix {
    fn from(l: LowerTriangular) -> Matrix {
        l.0
    }
}

fn check_dims<S: AsRef<[f64]>>(samples: &[S]) -> Result<usize> {
    let first = samples.first().ok_or(Error::Empty("samples"))?;
    let p = first.as_ref().len();
    if p == 0 {
        return Err(Error::Empty("feature vector"));
    }
    for s in samples {
        if s.as_ref().len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: s.as_ref().len(),
            });
        }
    }
    Ok(p)
}

/// Componentwise arithmetic mean.
pub fn mean_vector<S: AsRef<[f64]>>(samples: &[S]) -> Result<Vec<f64>> {
    let p = check_dims(samples)?;
    let mut mean = vec![0.0; p];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s.as_ref()) {
            *m += v;
        }
    }
    let n = samples.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

/// Two-pass covariance estimate; the result is mirrored so it is exactly
/// symmetric.
pub fn covariance<S: AsRef<[f64]>>(samples: &[S], mode: EstimationMode) -> Result<CovarianceMatrix> {
    let p = check_dims(samples)?;
    let n = samples.len();
    if n < mode.min_samples() {
        return Err(Error::TooFewSamples {
            mode,
            required: mode.min_samples(),
            found: n,
        });
    }
    let mean = mean_vector(samples)?;
    let mut acc = vec![0.0; p * p];
    let mut centered = vec![0.0; p];
    for s in samples {
        for ((c, v), m) in centered.iter_mut().zip(s.as_ref()).zip(&mean) {
            *c = v - m;
        }
        for i in 0..p {
            let ci = centered[i];
            for j in 0..=i {
                acc[i * p + j] += ci * centered[j];
            }
        }
    }
    let divisor = match mode {
        EstimationMode::Population => n as f64,
        EstimationMode::Sample => (n - 1) as f64,
    };
    for i in 0..p {
        for j in 0..=i {
            let v = acc[i * p + j] / divisor;
            acc[i * p + j] = v;
            acc[j * p + i] = v;
        }
    }
    let matrix = Matrix::new(p, p, acc)?;
    Ok(CovarianceMatrix {
        matrix,
        mode,
        sample_count: n,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CholeskyOptions {
    /// Add `JITTER_EPSILON * trace / p` to the diagonal before factorizing.
    pub jitter: bool,
}

/// Cholesky factor `L` with `L Lᵀ = c`.
pub fn cholesky_lower(c: &CovarianceMatrix) -> Result<LowerTriangular> {
    cholesky_lower_with(c, CholeskyOptions::default())
}

pub fn cholesky_lower_with(c: &CovarianceMatrix, opts: CholeskyOptions) -> Result<LowerTriangular> {
    cholesky_matrix(&c.matrix, opts)
}

/// Left-looking, unpivoted Cholesky of a symmetric matrix.
pub fn cholesky_matrix(a: &Matrix, opts: CholeskyOptions) -> Result<LowerTriangular> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n == 0 {
        return Err(Error::Empty("matrix"));
    }
    let asym = a.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    let shift = if opts.jitter {
        JITTER_EPSILON * a.trace() / n as f64
    } else {
        0.0
    };

    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let ajj = a[(j, j)] + shift;
        let lj = &l[j * n..j * n + j];
        let pivot = ajj - lj.iter().map(|v| v * v).sum::<f64>();
        if pivot.is_nan() || pivot <= PIVOT_TOLERANCE * ajj || ajj <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let dot: f64 = l[i * n..i * n + j]
                .iter()
                .zip(&l[j * n..j * n + j])
                .map(|(x, y)| x * y)
                .sum();
            l[i * n + j] = (a[(i, j)] - dot) / d;
        }
    }
    LowerTriangular::try_from(Matrix::new(n, n, l)?)
}

/// Inverse of a lower-triangular matrix by column-wise forward substitution.
pub fn invert_lower_triangular(l: &LowerTriangular) -> Result<LowerTriangular> {
    let m = &l.0;
    let n = m.rows;
    for i in 0..n {
        if m[(i, i)].is_nan() || m[(i, i)] <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index: i });
        }
    }
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        inv[j * n + j] = 1.0 / m[(j, j)];
        for i in (j + 1)..n {
            let s: f64 = (j..i).map(|k| m[(i, k)] * inv[k * n + j]).sum();
            inv[i * n + j] = -s / m[(i, i)];
        }
    }
    LowerTriangular::try_from(Matrix::new(n, n, inv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cov_of(rows: &[[f64; 2]], mode: EstimationMode) -> Matrix {
        covariance(rows, mode).unwrap().matrix().clone()
    }

    #[test]
    fn mean_of_pairs_and_singleton() {
        assert_eq!(mean_vector(&[[1.0, 2.0], [3.0, 4.0]]).unwrap(), vec![2.0, 3.0]);
        assert_eq!(mean_vector(&[[5.0, 5.0]]).unwrap(), vec![5.0, 5.0]);
    }

    #[test]
    fn mean_rejects_empty_and_ragged() {
        let empty: [Vec<f64>; 0] = [];
        assert!(matches!(mean_vector(&empty), Err(Error::Empty(_))));
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(matches!(
            mean_vector(&ragged),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn mean_matches_independent_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..4).map(|_| rng.gen_range(-50.0..50.0)).collect())
            .collect();
        let mean = mean_vector(&xs).unwrap();
        for (j, m) in mean.iter().enumerate() {
            // column-wise sum of x/n, a different accumulation order
            let oracle: f64 = xs.iter().rev().map(|x| x[j] / 100.0).sum();
            assert!((m - oracle).abs() <= 1e-12, "{m} vs {oracle}");
        }
    }

    #[test]
    fn covariance_divisors() {
        let pts = [[1.0, 0.0], [-1.0, 0.0]];
        assert_eq!(
            cov_of(&pts, EstimationMode::Population),
            Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap()
        );
        assert_eq!(
            cov_of(&pts, EstimationMode::Sample),
            Matrix::from_rows(&[[2.0, 0.0], [0.0, 0.0]]).unwrap()
        );
    }

    #[test]
    fn covariance_sample_count_requirements() {
        let one = [[1.0, 2.0]];
        assert!(covariance(&one, EstimationMode::Population).is_ok());
        assert!(matches!(
            covariance(&one, EstimationMode::Sample),
            Err(Error::TooFewSamples { required: 2, found: 1, .. })
        ));
    }

    #[test]
    fn covariance_is_exactly_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<Vec<f64>> = (0..37)
            .map(|_| (0..6).map(|_| rng.gen_range(-1e3..1e3)).collect())
            .collect();
        let c = covariance(&xs, EstimationMode::Sample).unwrap();
        let m = c.matrix();
        assert_eq!(m, &m.transpose());
        assert_eq!(c.sample_count(), 37);
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let id = CovarianceMatrix::new(Matrix::identity(3), EstimationMode::Population, 3).unwrap();
        assert_eq!(cholesky_lower(&id).unwrap().as_matrix(), &Matrix::identity(3));

        let d = CovarianceMatrix::new(
            Matrix::from_rows(&[[4.0, 0.0], [0.0, 9.0]]).unwrap(),
            EstimationMode::Population,
            2,
        )
        .unwrap();
        let l = cholesky_lower(&d).unwrap();
        assert_eq!(l.as_matrix(), &Matrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]).unwrap());
    }

    #[test]
    fn cholesky_reconstructs_small_matrix() {
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let l = cholesky_matrix(&a, CholeskyOptions::default()).unwrap();
        let back = l.as_matrix().matmul(&l.as_matrix().transpose()).unwrap();
        assert!(back.max_abs_diff(&a) <= 1e-12);
        // L = [[2, 0], [1, sqrt(2)]]
        assert_eq!(l.as_matrix()[(1, 0)], 1.0);
        assert!((l.as_matrix()[(1, 1)] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_names_failing_pivot() {
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        match cholesky_matrix(&a, CholeskyOptions::default()) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
        let neg = Matrix::from_rows(&[[-1.0]]).unwrap();
        assert!(matches!(
            cholesky_matrix(&neg, CholeskyOptions::default()),
            Err(Error::NotPositiveDefinite { index: 0, .. })
        ));
    }

    #[test]
    fn jitter_rescues_rank_deficient_covariance() {
        let c = covariance(&[[1.0, 0.0], [-1.0, 0.0]], EstimationMode::Population).unwrap();
        assert!(cholesky_lower(&c).is_err());
        // second diagonal is exactly zero, so jitter alone cannot clear the relative
        // tolerance; a rank-deficient but nonzero-variance pair can.
        let c = covariance(&[[1.0, 1.0], [-1.0, -1.0]], EstimationMode::Population).unwrap();
        assert!(cholesky_lower(&c).is_err());
        let l = cholesky_lower_with(&c, CholeskyOptions { jitter: true }).unwrap();
        assert!(l.as_matrix()[(1, 1)] > 0.0);
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(
            cholesky_matrix(&a, CholeskyOptions::default()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn invert_identity_and_diagonal() {
        let id = LowerTriangular::identity(4);
        assert_eq!(invert_lower_triangular(&id).unwrap(), id);
        let d = LowerTriangular::try_from(Matrix::diagonal(&[2.0, 4.0]).unwrap()).unwrap();
        let inv = invert_lower_triangular(&d).unwrap();
        assert_eq!(inv.as_matrix(), &Matrix::diagonal(&[0.5, 0.25]).unwrap());
    }

    #[test]
    fn invert_multiplies_back_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = rng.gen_range(-1.0..1.0);
            }
            data[i * n + i] = rng.gen_range(1.0..3.0);
        }
        let l = LowerTriangular::try_from(Matrix::new(n, n, data).unwrap()).unwrap();
        let inv = invert_lower_triangular(&l).unwrap();
        let prod = inv.as_matrix().matmul(l.as_matrix()).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(n)) <= 1e-10);
    }

    #[test]
    fn lower_triangular_validation() {
        let upper = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            LowerTriangular::try_from(upper),
            Err(Error::NotLowerTriangular { row: 0, col: 1 })
        ));
        let zero_diag = Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(
            LowerTriangular::try_from(zero_diag),
            Err(Error::NonPositiveDiagonal { index: 1 })
        ));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&Matrix::identity(2), &[3.0, 7.0]).unwrap(), vec![3.0, 7.0]);
        let m = Matrix::diagonal(&[2.0, 3.0]).unwrap();
        assert_eq!(apply(&m, &[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
        assert!(matches!(
            apply(&m, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn apply_matches_naive_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data: Vec<f64> = (0..16).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = Matrix::new(4, 4, data.clone()).unwrap();
        let got = apply(&m, &x).unwrap();
        let mut oracle = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                oracle[i] += data[i * 4 + j] * x[j];
            }
        }
        for (g, o) in got.iter().zip(oracle) {
            assert!((g - o).abs() <= 1e-12);
        }
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(matches!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }
}

//! Centering, normalization, distance-to-kernel conversion, Mercer checks and
//! Cholesky factorization of Gram matrices.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::eigen::{self, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::kernel::{max_abs, max_asymmetry, DataMatrix, GramMatrix};
use crate::par::Exec;

/// Relative PSD tolerance: `min_eig >= -tol * max(1, max_eig)`.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

/// Relative tolerance (against `max|D|`) for distance-matrix symmetry and diagonal checks.
pub const DISTANCE_TOL: f64 = 1e-10;

/// `H = I - (1/n) 1 1^T`.
pub fn centering_matrix(n: usize) -> Array2<f64> {
    let inv = 1.0 / n as f64;
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0 - inv } else { -inv })
}

/// Row means and grand mean of an uncentered training Gram matrix.
///
/// These are all that is needed to center the training kernel and any
/// out-of-sample kernel columns against the training feature-space mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringStats {
    pub row_means: Vec<f64>,
    pub grand_mean: f64,
}

impl CenteringStats {
    pub fn from_gram(k: &GramMatrix) -> Self {
        let n = k.n();
        let row_means: Vec<f64> = k
            .values()
            .rows()
            .into_iter()
            .map(|r| r.iter().sum::<f64>() / n as f64)
            .collect();
        let grand_mean = row_means.iter().sum::<f64>() / n as f64;
        CenteringStats { row_means, grand_mean }
    }

    pub fn n(&self) -> usize {
        self.row_means.len()
    }

    /// Centers one training-vs-query kernel vector `k(X, x_t)`.
    pub fn center_vector(&self, kt: &[f64]) -> Result<Vec<f64>> {
        if kt.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: kt.len(),
            });
        }
        let col_mean = kt.iter().sum::<f64>() / kt.len() as f64;
        Ok(kt
            .iter()
            .zip(&self.row_means)
            .map(|(&v, &r)| v - (r + col_mean) + self.grand_mean)
            .collect())
    }
}

/// `HKH`, computed from row, column and grand means without forming `H`.
pub fn double_center(k: &GramMatrix) -> GramMatrix {
    let stats = CenteringStats::from_gram(k);
    let r = &stats.row_means;
    let g = stats.grand_mean;
    GramMatrix::from_upper_fn(k.n(), Exec::Sequential, |i, j| k.get(i, j) - (r[i] + r[j]) + g).with_centered(true)
}

/// Centers the `n x n_t` training-vs-test kernel `Kt` with the training mean.
///
/// `k` must be the uncentered training Gram matrix.
pub fn center_out_of_sample(k: &GramMatrix, kt: ArrayView2<f64>) -> Result<Array2<f64>> {
    if kt.nrows() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: kt.nrows(),
        });
    }
    let stats = CenteringStats::from_gram(k);
    let mut out = Array2::zeros(kt.dim());
    for (j, col) in kt.columns().into_iter().enumerate() {
        let centered = stats.center_vector(&col.to_vec())?;
        for (i, v) in centered.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// Symmetric, nonnegative, zero-diagonal matrix of (typically squared) distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
}

impl DistanceMatrix {
    pub fn new(d: Array2<f64>) -> Result<Self> {
        let (rows, cols) = d.dim();
        if rows != cols {
            return Err(Error::InvalidDistanceMatrix(format!(
                "matrix is {rows}x{cols}, expected square"
            )));
        }
        if let Some(((i, j), v)) = d.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistanceMatrix(format!(
                "entry ({i}, {j}) = {v} is negative or non-finite"
            )));
        }
        let tol = DISTANCE_TOL * max_abs(d.view());
        if let Some(i) = (0..rows).find(|&i| d[[i, i]] > tol) {
            return Err(Error::InvalidDistanceMatrix(format!(
                "diagonal entry {i} = {:e} is not zero",
                d[[i, i]]
            )));
        }
        let asym = max_asymmetry(d.view());
        if asym > tol {
            return Err(Error::InvalidDistanceMatrix(format!(
                "asymmetry {asym:e} exceeds {tol:e}"
            )));
        }
        let mut values = d;
        for i in 0..rows {
            values[[i, i]] = 0.0;
            for j in (i + 1)..rows {
                let avg = 0.5 * (values[[i, j]] + values[[j, i]]);
                values[[i, j]] = avg;
                values[[j, i]] = avg;
            }
        }
        Ok(DistanceMatrix { values })
    }

    /// Pairwise squared Euclidean distances between samples.
    pub fn squared_euclidean(x: &DataMatrix) -> Self {
        let n = x.n();
        let g = GramMatrix::from_upper_fn(n, Exec::default(), |i, j| {
            if i == j {
                0.0
            } else {
                x.sample(i)
                    .iter()
                    .zip(x.sample(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum()
            }
        });
        DistanceMatrix { values: g.into_inner() }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// O(n^3) check that `sqrt(D)` satisfies the triangle inequality.
    ///
    /// Returns the first violating triple `(i, j, k)` with
    /// `d(i, k) > d(i, j) + d(j, k) + tol`.
    pub fn triangle_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let n = self.n();
        let m = self.values.mapv(f64::sqrt);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if m[[i, k]] > m[[i, j]] + m[[j, k]] + tol {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// `K = -1/2 H D H` for a matrix `D` of squared distances.
pub fn kernel_from_distance(d: &DistanceMatrix) -> GramMatrix {
    let as_gram = GramMatrix::from_upper_fn(d.n(), Exec::Sequential, |i, j| d.values[[i, j]]);
    let centered = double_center(&as_gram);
    GramMatrix::from_upper_fn(d.n(), Exec::Sequential, |i, j| -0.5 * centered.get(i, j)).with_centered(true)
}

fn positive_diagonal(k: &GramMatrix) -> Result<Vec<f64>> {
    let diag = k.diag();
    if let Some(index) = diag.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonpositiveDiagonal {
            index,
            value: diag[index],
        });
    }
    Ok(diag)
}

fn normalize_with<F>(k: &GramMatrix, mean: F) -> Result<GramMatrix>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let diag = positive_diagonal(k)?;
    Ok(GramMatrix::from_upper_fn(k.n(), Exec::Sequential, |i, j| {
        if i == j {
            1.0
        } else {
            k.get(i, j) / mean(diag[i], diag[j])
        }
    }))
}

/// `K(i,j) / sqrt(K(i,i) K(j,j))`; the diagonal becomes exactly 1.
pub fn cosine_normalize(k: &GramMatrix) -> Result<GramMatrix> {
    normalize_with(k, |a, b| (a * b).sqrt())
}

/// Divides `K(i,j)` by the generalized mean of order `t` of `K(i,i)` and `K(j,j)`.
///
/// `t = 0` is the geometric-mean limit and matches [`cosine_normalize`] exactly.
pub fn generalized_normalize(k: &GramMatrix, t: f64) -> Result<GramMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "normalization exponent must be finite, got {t}"
        )));
    }
    if t == 0.0 {
        return cosine_normalize(k);
    }
    normalize_with(k, move |a, b| (0.5 * (a.powf(t) + b.powf(t))).powf(1.0 / t))
}

/// Symmetry and positive semi-definiteness findings for a square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MercerReport {
    pub symmetric: bool,
    pub max_asymmetry: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub psd: bool,
    pub tolerance_used: f64,
}

/// Checks the two Mercer conditions on `k`.
///
/// The spectrum is that of the symmetric part `(K + K^T)/2`, so an asymmetric
/// input still gets eigenvalue findings. Errors only for non-square or
/// non-finite input, or if the eigensolver fails.
pub fn validate_mercer(k: ArrayView2<f64>, tol: f64) -> Result<MercerReport> {
    let (rows, cols) = k.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let max_asym = max_asymmetry(k);
    let sym = Array2::from_shape_fn((rows, rows), |(i, j)| 0.5 * (k[[i, j]] + k[[j, i]]));
    let eig = eigen::eigh(sym.view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let min_eigenvalue = eig.min_eigenvalue();
    let max_eigenvalue = eig.max_eigenvalue();
    Ok(MercerReport {
        symmetric: max_asym <= tol,
        max_asymmetry: max_asym,
        min_eigenvalue,
        max_eigenvalue,
        psd: min_eigenvalue >= -tol * max_eigenvalue.max(1.0),
        tolerance_used: tol,
    })
}

/// Lower-triangular `L` with `L L^T = K + jitter I`.
///
/// No automatic jitter escalation: a nonpositive pivot is reported as
/// [`Error::NotPositiveDefinite`].
pub fn cholesky(k: &GramMatrix, jitter: f64) -> Result<Array2<f64>> {
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "jitter must be nonnegative, got {jitter}"
        )));
    }
    let n = k.n();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut pivot = k.get(j, j) + jitter;
        for p in 0..j {
            pivot -= l[[j, p]] * l[[j, p]];
        }
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let ljj = pivot.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut v = k.get(i, j);
            for p in 0..j {
                v -= l[[i, p]] * l[[j, p]];
            }
            l[[i, j]] = v / ljj;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gram, KernelSpec};
    use ndarray::array;

    fn gm(a: Array2<f64>) -> GramMatrix {
        GramMatrix::from_array(a, 0.0).unwrap()
    }

    fn close(a: &Array2<f64>, b: &Array2<f64>, tol: f64) -> bool {
        a.dim() == b.dim() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn centering_matrix_properties() {
        assert_eq!(centering_matrix(1), array![[0.0]]);
        let h = centering_matrix(5);
        assert!(h.dot(&ndarray::Array1::<f64>::ones(5)).iter().all(|v| v.abs() < 1e-15));
        let h4 = centering_matrix(4);
        assert!(close(&h4.dot(&h4), &h4, 1e-12));
    }

    #[test]
    fn all_ones_centers_to_zero() {
        let k = gm(Array2::ones((4, 4)));
        let c = double_center(&k);
        assert!(c.is_centered());
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn double_center_agrees_with_explicit_h() {
        let k = gm(array![[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]]);
        let h = centering_matrix(3);
        let explicit = h.dot(k.values()).dot(&h);
        assert!(close(double_center(&k).values(), &explicit, 1e-10));
    }

    #[test]
    fn out_of_sample_with_training_columns() {
        let x = DataMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.5], vec![-1.0, 1.5], vec![0.3, -0.7]]).unwrap();
        let spec = KernelSpec::rbf(0.4);
        let k = gram(&spec, &x).unwrap();
        let kt = k.values().select(ndarray::Axis(1), &[1, 3]);
        let c = center_out_of_sample(&k, kt.view()).unwrap();
        let full = double_center(&k);
        for (col, &src) in [1usize, 3].iter().enumerate() {
            for i in 0..4 {
                assert_eq!(c[[i, col]], full.get(i, src));
            }
        }
        assert!(matches!(
            center_out_of_sample(&k, Array2::zeros((3, 1)).view()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(DistanceMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).is_ok());
        assert!(DistanceMatrix::new(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        let k = kernel_from_distance(&DistanceMatrix::new(Array2::zeros((3, 3))).unwrap());
        assert!(k.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn triangle_check() {
        // 0 -- 1 -- 2 on a line, squared distances
        let ok = DistanceMatrix::new(array![[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]).unwrap();
        assert_eq!(ok.triangle_violation(1e-12), None);
        let bad = DistanceMatrix::new(array![[0.0, 1.0, 9.0], [1.0, 0.0, 1.0], [9.0, 1.0, 0.0]]).unwrap();
        assert!(bad.triangle_violation(1e-12).is_some());
    }

    #[test]
    fn cosine_normalization_by_hand() {
        let k = gm(array![[4.0, 2.0], [2.0, 9.0]]);
        let c = cosine_normalize(&k).unwrap();
        // sqrt(4 * 9) = 6
        assert_eq!(c.values(), &array![[1.0, 2.0 / 6.0], [2.0 / 6.0, 1.0]]);
        let g1 = generalized_normalize(&k, 1.0).unwrap();
        // (4 + 9) / 2 = 6.5
        assert!((g1.get(0, 1) - 2.0 / 6.5).abs() < 1e-15);
        assert_eq!(generalized_normalize(&k, 0.0).unwrap(), c);
    }

    #[test]
    fn constant_diagonal_normalization() {
        let k = gm(array![[3.0, 1.5, -0.3], [1.5, 3.0, 0.9], [-0.3, 0.9, 3.0]]);
        for t in [-1.0, 0.5, 1.0, 2.0] {
            let n = generalized_normalize(&k, t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expected = if i == j { 1.0 } else { k.get(i, j) / 3.0 };
                    assert!((n.get(i, j) - expected).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn nonpositive_diagonal_is_reported() {
        let k = gm(array![[1.0, 0.0], [0.0, 0.0]]);
        assert!(matches!(
            cosine_normalize(&k),
            Err(Error::NonpositiveDiagonal { index: 1, .. })
        ));
        assert!(matches!(
            generalized_normalize(&k, 2.0),
            Err(Error::NonpositiveDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn mercer_findings() {
        let r = validate_mercer(Array2::<f64>::eye(3).view(), DEFAULT_PSD_TOL).unwrap();
        assert!(r.symmetric && r.psd);
        assert_eq!(r.min_eigenvalue, 1.0);
        // eigenvalues of [[1,2],[2,1]] are 1 +- 2
        let r = validate_mercer(array![[1.0, 2.0], [2.0, 1.0]].view(), DEFAULT_PSD_TOL).unwrap();
        assert!(r.symmetric && !r.psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-14);
        assert!((r.max_eigenvalue - 3.0).abs() < 1e-14);
        let r = validate_mercer(array![[1.0, 0.5], [0.0, 1.0]].view(), DEFAULT_PSD_TOL).unwrap();
        assert!(!r.symmetric);
        assert_eq!(r.max_asymmetry, 0.5);
    }

    #[test]
    fn cholesky_cases() {
        let l = cholesky(&GramMatrix::identity(3), 0.0).unwrap();
        assert_eq!(l, Array2::<f64>::eye(3));
        let l = cholesky(&gm(array![[4.0, 2.0], [2.0, 5.0]]), 0.0).unwrap();
        assert_eq!(l, array![[2.0, 0.0], [1.0, 2.0]]);
        assert_eq!(l.dot(&l.t()), array![[4.0, 2.0], [2.0, 5.0]]);

        let ones = gm(Array2::ones((4, 4)));
        assert!(matches!(
            cholesky(&ones, 0.0),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
        let l = cholesky(&ones, 1e-8).unwrap();
        let err = (&l.dot(&l.t()) - ones.values()).mapv(|v| v * v).sum().sqrt();
        assert!(err <= 4.0 * 1e-8 + 1e-12, "err = {err}");
        assert!(cholesky(&ones, -1.0).is_err());
    }
}

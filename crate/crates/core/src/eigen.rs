//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Eigenvalues come back in non-increasing order. Each eigenvector is signed
//! so that its largest-magnitude entry is positive (lowest index wins ties).
//! Within a cluster of (numerically) equal eigenvalues the individual vectors
//! are not canonical; compare the spanned subspace instead.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::kernel::{max_abs, max_asymmetry, GramMatrix};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 50;

/// Relative asymmetry accepted on input, measured against `max|S|`.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors.
    eigenvectors: Array2<f64>,
    sweeps: usize,
    residual: f64,
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `n x n`, column `k` pairs with `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> ArrayView2<'_, f64> {
        self.eigenvectors.view()
    }

    pub fn eigenvector(&self, k: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(k)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of Jacobi sweeps performed.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Off-diagonal Frobenius norm of the final rotated matrix.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `V diag(eigenvalues) V^T`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.eigenvectors * &Array1::from(self.eigenvalues.clone());
        scaled.dot(&self.eigenvectors.t())
    }

    /// `sqrt(max(delta_k, 0))`: the singular values of the implicit feature matrix.
    pub fn sqrt_spectrum(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&d| d.max(0.0).sqrt()).collect()
    }

    /// `V Sigma`, an `n x n` factor `F` with `F F^T = V Delta_+ V^T`.
    pub fn factor(&self) -> Array2<f64> {
        &self.eigenvectors * &Array1::from(self.sqrt_spectrum())
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Sweeps continue until the off-diagonal Frobenius norm drops to
/// `tol * ||S||_F`; failing that within `max_sweeps`, returns
/// [`Error::NoConvergence`] with the last residual.
pub fn eigh(s: ArrayView2<f64>, tol: f64, max_sweeps: usize) -> Result<EigenSystem> {
    let (rows, cols) = s.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    if let Some(((i, j), v)) = s.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidData(format!("non-finite value {v} at ({i}, {j})")));
    }
    let n = rows;
    let scale = max_abs(s);
    let asym = max_asymmetry(s);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
            tolerance: SYMMETRY_TOL * scale,
        });
    }

    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (s[[i, j]] + s[[j, i]]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = tol * frobenius;
    let off_norm = |a: &[f64]| -> f64 {
        let mut acc = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                acc += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * acc).sqrt()
    };

    let mut sweeps = 0;
    let mut residual = off_norm(&a);
    while residual > target {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                residual,
                target,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q, sweeps);
            }
        }
        residual = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the lower index first among exact ties
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (k, &src) in order.iter().enumerate() {
        let mut lead = 0;
        for r in 1..n {
            if v[r * n + src].abs() > v[lead * n + src].abs() {
                lead = r;
            }
        }
        let sign = if v[lead * n + src] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            eigenvectors[[r, k]] = sign * v[r * n + src];
        }
    }

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        sweeps,
        residual,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, sweep: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let g = 100.0 * apq.abs();
    if sweep > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        return;
    }
    let h = aqq - app;
    let t = if h.abs() + g == h.abs() {
        apq / h
    } else {
        let theta = 0.5 * h / apq;
        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

/// Eigenvalue decomposition of a kernel matrix, `K = V Delta V^T`.
///
/// The eigenvalues are the squared singular values of the (implicit) pulled
/// data; see [`EigenSystem::sqrt_spectrum`] and [`EigenSystem::factor`].
pub fn evd_factorize(k: &GramMatrix) -> Result<EigenSystem> {
    eigh(k.view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eigh(Array2::<f64>::eye(4).view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(e.eigenvectors(), Array2::<f64>::eye(4).view());
        assert_eq!(e.sweeps(), 0);
    }

    #[test]
    fn two_by_two_closed_form() {
        let e = eigh(array![[2.0, 1.0], [1.0, 2.0]].view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((e.eigenvalues()[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvector(0);
        assert!((v0[0] - r).abs() < 1e-14 && (v0[1] - r).abs() < 1e-14);
        // [1,-1]/sqrt2 and [-1,1]/sqrt2 tie in magnitude; the lower index is made positive
        let v1 = e.eigenvector(1);
        assert!((v1[0] - r).abs() < 1e-14 && (v1[1] + r).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_is_permuted_basis() {
        let s = array![[5.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 7.0]];
        let e = eigh(s.view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(e.eigenvalues(), &[7.0, 5.0, -2.0]);
        let expected = array![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        assert_eq!(e.eigenvectors(), expected.view());
    }

    #[test]
    fn rejects_asymmetric_and_reports_no_convergence() {
        let s = array![[1.0, 2.0], [2.1, 1.0]];
        assert!(matches!(
            eigh(s.view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS),
            Err(Error::NotSymmetric { .. })
        ));
        let s = array![[1.0, 0.5, 0.2], [0.5, 2.0, 0.3], [0.2, 0.3, 3.0]];
        match eigh(s.view(), 1e-14, 0) {
            Err(Error::NoConvergence { sweeps, residual, .. }) => {
                assert_eq!(sweeps, 0);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rank_one_kernel() {
        let x = array![1.0, -2.0, 0.5, 3.0];
        let k = GramMatrix::from_upper_fn(4, Default::default(), |i, j| x[i] * x[j]);
        let e = evd_factorize(&k).unwrap();
        let norm2 = x.dot(&x);
        assert!((e.eigenvalues()[0] - norm2).abs() < 1e-12 * norm2);
        for &d in &e.eigenvalues()[1..] {
            assert!(d.abs() < 1e-12 * norm2);
        }
        let f = e.factor();
        let recon = f.dot(&f.t());
        for (a, b) in recon.iter().zip(k.values().iter()) {
            assert!((a - b).abs() < 1e-12 * norm2);
        }
    }

    #[test]
    fn empty_matrix() {
        let e = eigh(Array2::<f64>::zeros((0, 0)).view(), DEFAULT_TOL, 1).unwrap();
        assert_eq!(e.n(), 0);
    }
}

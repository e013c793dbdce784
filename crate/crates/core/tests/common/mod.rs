//! Data generators and independent reference computations shared by the
//! integration tests. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use kernelkit::DataMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

/// `n` samples of dimension `d`, standard normal.
pub fn normal_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DataMatrix {
    DataMatrix::from_samples(normal_matrix(rng, n, d)).unwrap()
}

/// Random symmetric matrix with entries in [-1, 1].
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

/// Random PSD matrix `F Fᵀ` with `F` of shape `n x r`.
pub fn random_low_rank_psd(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Array2<f64> {
    let f = normal_matrix(rng, n, r);
    matmul(&f, &f.t().to_owned())
}

/// Plain triple-loop product.
pub fn matmul(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut c = Array2::zeros((a.nrows(), b.ncols()));
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for k in 0..a.ncols() {
                s += a[[i, k]] * b[[k, j]];
            }
            c[[i, j]] = s;
        }
    }
    c
}

pub fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// `I - 11ᵀ/n` built entry by entry.
pub fn centering(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64)
}

/// Roots of `λ² - (a+c)λ + (ac - b²)` for `[[a, b], [b, c]]`, descending.
pub fn eig2_closed(a: f64, b: f64, c: f64) -> [f64; 2] {
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    [mean + rad, mean - rad]
}

/// Eigenvalues of a symmetric 3x3 matrix from its characteristic cubic,
/// solved trigonometrically and then polished with Newton steps. Descending.
pub fn eig3_closed(m: &Array2<f64>) -> [f64; 3] {
    let (a, b, c) = (m[[0, 0]], m[[1, 1]], m[[2, 2]]);
    let (d, e, f) = (m[[0, 1]], m[[1, 2]], m[[0, 2]]);
    // det(λI - M) = λ³ - c2 λ² + c1 λ - c0
    let c2 = a + b + c;
    let c1 = a * b + b * c + a * c - d * d - e * e - f * f;
    let c0 = a * b * c + 2.0 * d * e * f - a * e * e - b * f * f - c * d * d;
    let q = c2 / 3.0;
    let p1 = d * d + e * e + f * f;
    let mut roots = if p1 == 0.0 {
        [a, b, c]
    } else {
        let p2 = (a - q).powi(2) + (b - q).powi(2) + (c - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let (ba, bb, bc) = ((a - q) / p, (b - q) / p, (c - q) / p);
        let (bd, be, bf) = (d / p, e / p, f / p);
        let det_b = ba * bb * bc + 2.0 * bd * be * bf - ba * be * be - bb * bf * bf - bc * bd * bd;
        let r = (det_b / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let l1 = q + 2.0 * p * phi.cos();
        let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [l1, 3.0 * q - l1 - l3, l3]
    };
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let x = *root;
            let val = ((x - c2) * x + c1) * x - c0;
            let der = (3.0 * x - 2.0 * c2) * x + c1;
            if der.abs() < 1e-12 {
                break;
            }
            let step = val / der;
            *root = x - step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    roots
}

/// `tr(Kx H Ky H) / (n-1)²` by the expanded four-index sum.
pub fn hsic_quartic(kx: &Array2<f64>, ky: &Array2<f64>) -> f64 {
    let n = kx.nrows();
    let h = centering(n);
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += kx[[i, j]] * h[[j, k]] * ky[[k, l]] * h[[l, i]];
                }
            }
        }
    }
    s / ((n - 1) as f64).powi(2)
}

/// The `d x d` scatter matrix `Xᵀ X` of a samples-as-rows `X`.
pub fn scatter(x: &Array2<f64>) -> Array2<f64> {
    matmul(&x.t().to_owned(), x)
}

/// Mean-centers the columns of a samples-as-rows matrix.
pub fn center_columns(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for mut col in out.columns_mut() {
        let mean = col.iter().sum::<f64>() / n;
        col.mapv_inplace(|v| v - mean);
    }
    out
}

//! Nyström low-rank completion of kernel matrices from landmark rows.
//!
//! With the landmarks permuted to the front, the kernel splits as
//!
//! ```text
//! K = | A   B |      A: m x m landmark block
//!     | B^T C |      B: m x (n - m) landmark-vs-rest block
//! ```
//!
//! and `C` is approximated by `B^T A^+ B`. Only the `m` landmark rows of `K`
//! are ever evaluated. Landmarks may be any index set; the model keeps the
//! permutation and [`NystromModel::complete`] returns the matrix in the
//! original index order.

use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eigen::{eigh, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::kernel::{eval_kernel, DataMatrix, GramMatrix, KernelSpec};
use crate::par::{self, Exec};

pub const DEFAULT_PINV_THRESHOLD: f64 = 1e-10;

/// Source of kernel entries. Implementations must be symmetric.
pub trait KernelProvider: Sync {
    fn order(&self) -> usize;

    fn entry(&self, i: usize, j: usize) -> Result<f64>;

    /// Writes row `i` of the kernel into `out` (length `order()`).
    fn row(&self, i: usize, out: &mut [f64]) -> Result<()> {
        for (j, v) in out.iter_mut().enumerate() {
            *v = self.entry(i, j)?;
        }
        Ok(())
    }
}

/// Evaluates kernel entries on demand from data.
#[derive(Debug, Clone)]
pub struct DataKernel<'a> {
    spec: KernelSpec,
    data: &'a DataMatrix,
}

impl<'a> DataKernel<'a> {
    pub fn new(spec: &KernelSpec, data: &'a DataMatrix) -> Result<Self> {
        spec.validate()?;
        Ok(DataKernel {
            spec: spec.resolve(data.d()),
            data,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }
}

impl KernelProvider for DataKernel<'_> {
    fn order(&self) -> usize {
        self.data.n()
    }

    fn entry(&self, i: usize, j: usize) -> Result<f64> {
        eval_kernel(&self.spec, self.data.sample(i), self.data.sample(j)).map_err(|e| Error::KernelEntry {
            i,
            j,
            source: Box::new(e),
        })
    }
}

impl KernelProvider for GramMatrix {
    fn order(&self) -> usize {
        self.n()
    }

    fn entry(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.get(i, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkStrategy {
    /// `m` distinct indices drawn without replacement from a seeded ChaCha8 stream.
    Uniform,
    /// Diagonal-residual pivoted partial Cholesky.
    GreedyPivot,
}

impl LandmarkStrategy {
    pub fn name(self) -> &'static str {
        match self {
            LandmarkStrategy::Uniform => "uniform",
            LandmarkStrategy::GreedyPivot => "greedy_pivot",
        }
    }
}

impl FromStr for LandmarkStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(LandmarkStrategy::Uniform),
            "greedy_pivot" | "greedy" => Ok(LandmarkStrategy::GreedyPivot),
            other => Err(Error::InvalidParameter(format!("unknown landmark strategy '{other}'"))),
        }
    }
}

/// Picks `m` landmark indices.
///
/// Uniform selection is returned sorted. Greedy selection is returned in
/// pick order and evaluates exactly `m` kernel rows.
pub fn select_landmarks<P: KernelProvider + ?Sized>(
    provider: &P,
    m: usize,
    strategy: LandmarkStrategy,
    seed: u64,
) -> Result<Vec<usize>> {
    let n = provider.order();
    if m > n {
        return Err(Error::TooManyLandmarks { m, n });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("at least one landmark is required".into()));
    }
    match strategy {
        LandmarkStrategy::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            Ok(idx)
        }
        LandmarkStrategy::GreedyPivot => greedy_pivot(provider, m),
    }
}

fn greedy_pivot<P: KernelProvider + ?Sized>(provider: &P, m: usize) -> Result<Vec<usize>> {
    let n = provider.order();
    let mut residual: Vec<f64> = (0..n).map(|i| provider.entry(i, i)).collect::<Result<_>>()?;
    let scale = residual.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let negligible = f64::EPSILON * n as f64 * scale;
    let mut picked = vec![false; n];
    let mut order = Vec::with_capacity(m);
    let mut factors: Vec<Vec<f64>> = Vec::new();
    let mut row = vec![0.0; n];
    for _ in 0..m {
        let mut pivot = usize::MAX;
        for i in (0..n).filter(|&i| !picked[i]) {
            if pivot == usize::MAX || residual[i] > residual[pivot] {
                pivot = i;
            }
        }
        picked[pivot] = true;
        order.push(pivot);
        let r = residual[pivot];
        if !(r > negligible) {
            // rank exhausted: remaining picks just walk the largest residuals
            continue;
        }
        provider.row(pivot, &mut row)?;
        let inv = 1.0 / r.sqrt();
        let col: Vec<f64> = (0..n)
            .map(|i| {
                let prior: f64 = factors.iter().map(|f| f[i] * f[pivot]).sum();
                (row[i] - prior) * inv
            })
            .collect();
        for (res, l) in residual.iter_mut().zip(&col) {
            *res -= l * l;
        }
        residual[pivot] = 0.0;
        factors.push(col);
    }
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Landmark(usize),
    Rest(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NystromModel {
    n: usize,
    landmarks: Vec<usize>,
    rest: Vec<usize>,
    a: Array2<f64>,
    b: Array2<f64>,
    a_pinv: Array2<f64>,
    /// `(n - m) x r`; row `j` is `Σ^{-1/2} U^T b_j` for rest point `j`, so `C ≈ W W^T`.
    rest_factor: Array2<f64>,
    rank: usize,
    pinv_threshold: f64,
}

impl NystromModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.landmarks.len()
    }

    /// Sorted landmark indices.
    pub fn landmark_indices(&self) -> &[usize] {
        &self.landmarks
    }

    /// Non-landmark indices in increasing order; columns of `B` follow this order.
    pub fn rest_indices(&self) -> &[usize] {
        &self.rest
    }

    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }

    pub fn b(&self) -> ArrayView2<'_, f64> {
        self.b.view()
    }

    pub fn a_pinv(&self) -> ArrayView2<'_, f64> {
        self.a_pinv.view()
    }

    /// Numerical rank of `A` retained by the pseudo-inverse.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pinv_threshold(&self) -> f64 {
        self.pinv_threshold
    }

    fn slots(&self) -> Vec<Slot> {
        let mut slots = vec![Slot::Rest(0); self.n];
        for (a, &i) in self.landmarks.iter().enumerate() {
            slots[i] = Slot::Landmark(a);
        }
        for (j, &i) in self.rest.iter().enumerate() {
            slots[i] = Slot::Rest(j);
        }
        slots
    }

    /// Full `n x n` approximation in the original index order.
    pub fn complete(&self) -> GramMatrix {
        self.complete_with(Exec::default())
    }

    pub fn complete_with(&self, exec: Exec) -> GramMatrix {
        let slots = self.slots();
        let w = &self.rest_factor;
        GramMatrix::from_upper_fn(self.n, exec, |i, j| match (slots[i], slots[j]) {
            (Slot::Landmark(a), Slot::Landmark(b)) => self.a[[a, b]],
            (Slot::Landmark(a), Slot::Rest(r)) | (Slot::Rest(r), Slot::Landmark(a)) => self.b[[a, r]],
            (Slot::Rest(r), Slot::Rest(s)) => w.row(r).dot(&w.row(s)),
        })
    }
}

/// Builds the landmark blocks and the thresholded pseudo-inverse of `A`.
///
/// Evaluates `m` kernel rows (`m * n` entries); landmark rows are fetched in
/// parallel under [`Exec::Parallel`].
pub fn build<P: KernelProvider + ?Sized>(
    provider: &P,
    landmarks: &[usize],
    pinv_threshold: f64,
) -> Result<NystromModel> {
    build_with(provider, landmarks, pinv_threshold, Exec::default())
}

pub fn build_with<P: KernelProvider + ?Sized>(
    provider: &P,
    landmarks: &[usize],
    pinv_threshold: f64,
    exec: Exec,
) -> Result<NystromModel> {
    let n = provider.order();
    if !(pinv_threshold >= 0.0 && pinv_threshold.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "pseudo-inverse threshold must be nonnegative, got {pinv_threshold}"
        )));
    }
    let mut sorted = landmarks.to_vec();
    sorted.sort_unstable();
    if sorted.is_empty() {
        return Err(Error::InvalidLandmarks("landmark set is empty".into()));
    }
    if sorted.len() > n {
        return Err(Error::TooManyLandmarks { m: sorted.len(), n });
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidLandmarks(format!(
            "index {} appears more than once",
            w[0]
        )));
    }
    if let Some(&bad) = sorted.last().filter(|&&i| i >= n) {
        return Err(Error::InvalidLandmarks(format!(
            "index {bad} out of range for {n} samples"
        )));
    }
    let m = sorted.len();
    let mut is_landmark = vec![false; n];
    for &i in &sorted {
        is_landmark[i] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !is_landmark[i]).collect();

    let mut rows = vec![0.0; m * n];
    par::try_for_each_row(exec, &mut rows, n, |a, row| provider.row(sorted[a], row))?;
    let rows = Array2::from_shape_vec((m, n), rows).expect("m*n buffer");

    let a = Array2::from_shape_fn((m, m), |(i, j)| {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        rows[[lo, sorted[hi]]]
    });
    let b = Array2::from_shape_fn((m, rest.len()), |(i, j)| rows[[i, rest[j]]]);

    let eig = eigh(a.view(), DEFAULT_TOL, DEFAULT_MAX_SWEEPS)?;
    let lead = eig.max_eigenvalue();
    let cutoff = pinv_threshold * lead;
    let rank = if lead > 0.0 {
        eig.eigenvalues().iter().take_while(|&&d| d > cutoff).count()
    } else {
        0
    };
    let u = eig.eigenvectors();
    let mut a_pinv = Array2::zeros((m, m));
    for k in 0..rank {
        let inv = 1.0 / eig.eigenvalues()[k];
        for i in 0..m {
            for j in 0..m {
                a_pinv[[i, j]] += u[[i, k]] * u[[j, k]] * inv;
            }
        }
    }
    // W = B^T U_r Σ_r^{-1/2}
    let mut rest_factor = b.t().dot(&u.slice(ndarray::s![.., ..rank]));
    for (k, mut col) in rest_factor.columns_mut().into_iter().enumerate() {
        col /= eig.eigenvalues()[k].sqrt();
    }

    Ok(NystromModel {
        n,
        landmarks: sorted,
        rest,
        a,
        b,
        a_pinv,
        rest_factor,
        rank,
        pinv_threshold,
    })
}

/// `||K - K̃||_F / ||K||_F`; 0 for identical inputs.
pub fn reconstruction_error(k: &GramMatrix, k_tilde: &GramMatrix) -> Result<f64> {
    if k.n() != k_tilde.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: k_tilde.n(),
        });
    }
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (a, b) in k.values().iter().zip(k_tilde.values().iter()) {
        diff += (a - b) * (a - b);
        norm += a * a;
    }
    if diff == 0.0 {
        return Ok(0.0);
    }
    if norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((diff / norm).sqrt())
}

/// Nyström estimate `f_k(x) ≈ 1/(n λ_k) Σ_i k(x_i, x) f_k(x_i)`.
pub fn nystrom_eigenfunction(lambda_k: f64, f_at_samples: &[f64], k_vec: &[f64]) -> Result<f64> {
    if !(lambda_k > 0.0) {
        return Err(Error::NonpositiveEigenvalue(lambda_k));
    }
    if f_at_samples.len() != k_vec.len() {
        return Err(Error::DimensionMismatch {
            expected: f_at_samples.len(),
            found: k_vec.len(),
        });
    }
    let n = k_vec.len() as f64;
    let sum: f64 = k_vec.iter().zip(f_at_samples).map(|(k, f)| k * f).sum();
    Ok(sum / (n * lambda_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gram;
    use ndarray::array;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Counting<'a> {
        inner: &'a GramMatrix,
        calls: AtomicUsize,
    }

    impl KernelProvider for Counting<'_> {
        fn order(&self) -> usize {
            self.inner.n()
        }
        fn entry(&self, i: usize, j: usize) -> Result<f64> {
            self.calls.fetch_add(1, Ordering::Relaxed);
            Ok(self.inner.get(i, j))
        }
    }

    fn sample_gram(n: usize) -> GramMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()])
            .collect();
        gram(&KernelSpec::rbf(0.8), &DataMatrix::from_rows(&rows).unwrap()).unwrap()
    }

    #[test]
    fn all_landmarks_reproduce_kernel() {
        let k = sample_gram(7);
        for strategy in [LandmarkStrategy::Uniform, LandmarkStrategy::GreedyPivot] {
            let mut idx = select_landmarks(&k, 7, strategy, 3).unwrap();
            idx.sort_unstable();
            assert_eq!(idx, (0..7).collect::<Vec<_>>());
            let model = build(&k, &idx, DEFAULT_PINV_THRESHOLD).unwrap();
            assert_eq!(model.a(), k.view());
            assert_eq!(model.b().ncols(), 0);
            assert_eq!(model.complete(), k);
        }
    }

    #[test]
    fn uniform_is_reproducible() {
        let k = sample_gram(30);
        let a = select_landmarks(&k, 8, LandmarkStrategy::Uniform, 42).unwrap();
        let b = select_landmarks(&k, 8, LandmarkStrategy::Uniform, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        let c = select_landmarks(&k, 8, LandmarkStrategy::Uniform, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn greedy_picks_dominant_diagonal_first() {
        let k = GramMatrix::from_array(
            array![
                [1.0, 0.1, 0.0, 0.2],
                [0.1, 2.0, 0.3, 0.0],
                [0.0, 0.3, 9.0, 0.5],
                [0.2, 0.0, 0.5, 1.5]
            ],
            0.0,
        )
        .unwrap();
        // exhaustive oracle: the first pivot maximizes the initial residual, i.e. the diagonal
        let oracle = (0..4).max_by(|&a, &b| k.get(a, a).total_cmp(&k.get(b, b))).unwrap();
        let picks = select_landmarks(&k, 2, LandmarkStrategy::GreedyPivot, 0).unwrap();
        assert_eq!(picks[0], oracle);
        assert_eq!(picks[0], 2);
    }

    #[test]
    fn build_only_touches_landmark_rows() {
        let k = sample_gram(25);
        let counting = Counting {
            inner: &k,
            calls: AtomicUsize::new(0),
        };
        build(&counting, &[3, 11, 17, 20], DEFAULT_PINV_THRESHOLD).unwrap();
        assert_eq!(counting.calls.load(Ordering::Relaxed), 4 * 25);
    }

    #[test]
    fn landmark_blocks_are_exact() {
        let k = sample_gram(12);
        let model = build(&k, &[9, 2, 5], DEFAULT_PINV_THRESHOLD).unwrap();
        assert_eq!(model.landmark_indices(), &[2, 5, 9]);
        let kt = model.complete();
        for &i in model.landmark_indices() {
            for j in 0..12 {
                assert_eq!(kt.get(i, j), k.get(i, j));
                assert_eq!(kt.get(j, i), k.get(j, i));
            }
        }
    }

    #[test]
    fn identity_block_inverts_to_identity() {
        let model = build(&GramMatrix::identity(3), &[0, 1, 2], DEFAULT_PINV_THRESHOLD).unwrap();
        assert_eq!(model.a_pinv(), Array2::<f64>::eye(3).view());
    }

    #[test]
    fn singular_block_uses_pseudo_inverse() {
        // samples 0 and 1 coincide, so A is singular
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![0.5, 0.5]]).unwrap();
        let k = gram(&KernelSpec::rbf(0.5), &x).unwrap();
        let model = build(&k, &[0, 1, 2], DEFAULT_PINV_THRESHOLD).unwrap();
        assert_eq!(model.rank(), 2);
        let a = model.a().to_owned();
        let p = model.a_pinv().to_owned();
        let apa = a.dot(&p).dot(&a);
        assert!(apa.iter().zip(a.iter()).all(|(x, y)| (x - y).abs() < 1e-7));
        let pap = p.dot(&a).dot(&p);
        assert!(pap
            .iter()
            .zip(p.iter())
            .all(|(x, y)| (x - y).abs() < 1e-7 * (1.0 + y.abs())));
    }

    #[test]
    fn invalid_landmarks() {
        let k = sample_gram(5);
        assert!(matches!(build(&k, &[1, 1], 1e-10), Err(Error::InvalidLandmarks(_))));
        assert!(matches!(build(&k, &[5], 1e-10), Err(Error::InvalidLandmarks(_))));
        assert!(matches!(build(&k, &[], 1e-10), Err(Error::InvalidLandmarks(_))));
        assert!(matches!(
            select_landmarks(&k, 6, LandmarkStrategy::Uniform, 0),
            Err(Error::TooManyLandmarks { m: 6, n: 5 })
        ));
    }

    #[test]
    fn reconstruction_error_edges() {
        let k = sample_gram(4);
        assert_eq!(reconstruction_error(&k, &k).unwrap(), 0.0);
        let zero = GramMatrix::from_array(Array2::zeros((4, 4)), 0.0).unwrap();
        assert!((reconstruction_error(&k, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(reconstruction_error(&k, &sample_gram(3)).is_err());
    }

    #[test]
    fn eigenfunction_estimate_basics() {
        assert_eq!(nystrom_eigenfunction(2.0, &[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);
        let base = nystrom_eigenfunction(0.5, &[1.0, -2.0, 0.5], &[0.3, 0.1, 0.9]).unwrap();
        let scaled = nystrom_eigenfunction(2.0, &[1.0, -2.0, 0.5], &[0.3, 0.1, 0.9]).unwrap();
        assert!((scaled - base / 4.0).abs() < 1e-15);
        assert!(matches!(
            nystrom_eigenfunction(0.0, &[1.0], &[1.0]),
            Err(Error::NonpositiveEigenvalue(_))
        ));
    }
}

//! Kernel functions and Gram-matrix construction.
//!
//! Data follow the sample-major layout: a [`DataMatrix`] holds `n` samples of
//! dimension `d`, each sample stored contiguously. This is the same memory
//! layout as a `d x n` column-major matrix whose columns are samples.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Linear,
    Rbf,
    Laplacian,
    Sigmoid,
    Polynomial,
    Cosine,
    ChiSquared,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 7] = [
        KernelFamily::Linear,
        KernelFamily::Rbf,
        KernelFamily::Laplacian,
        KernelFamily::Sigmoid,
        KernelFamily::Polynomial,
        KernelFamily::Cosine,
        KernelFamily::ChiSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Linear => "linear",
            KernelFamily::Rbf => "rbf",
            KernelFamily::Laplacian => "laplacian",
            KernelFamily::Sigmoid => "sigmoid",
            KernelFamily::Polynomial => "polynomial",
            KernelFamily::Cosine => "cosine",
            KernelFamily::ChiSquared => "chi_squared",
        }
    }

    pub fn uses_gamma(self) -> bool {
        !matches!(self, KernelFamily::Linear | KernelFamily::Cosine)
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "linear" => Ok(KernelFamily::Linear),
            "rbf" | "gaussian" => Ok(KernelFamily::Rbf),
            "laplacian" | "laplace" => Ok(KernelFamily::Laplacian),
            "sigmoid" => Ok(KernelFamily::Sigmoid),
            "polynomial" | "poly" => Ok(KernelFamily::Polynomial),
            "cosine" => Ok(KernelFamily::Cosine),
            "chi_squared" | "chi2" => Ok(KernelFamily::ChiSquared),
            other => Err(Error::InvalidParameter(format!("unknown kernel family '{other}'"))),
        }
    }
}

/// Kernel bandwidth/slope. `Auto` resolves to `1/d` for `d`-dimensional data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Auto,
    Value(f64),
}

impl Gamma {
    pub fn resolve(self, d: usize) -> f64 {
        match self {
            Gamma::Auto => 1.0 / d as f64,
            Gamma::Value(g) => g,
        }
    }
}

impl std::str::FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Gamma::Auto);
        }
        s.parse::<f64>()
            .map(Gamma::Value)
            .map_err(|_| Error::InvalidParameter(format!("gamma must be 'auto' or a number, got '{s}'")))
    }
}

/// A kernel family together with its parameters.
///
/// `intercept` is used by sigmoid and polynomial, `degree` only by polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub gamma: Gamma,
    pub intercept: f64,
    pub degree: u32,
}

impl KernelSpec {
    pub fn new(family: KernelFamily) -> Self {
        let intercept = match family {
            KernelFamily::Sigmoid | KernelFamily::Polynomial => 1.0,
            _ => 0.0,
        };
        let gamma = match family {
            KernelFamily::ChiSquared => Gamma::Value(1.0),
            _ => Gamma::Auto,
        };
        KernelSpec {
            family,
            gamma,
            intercept,
            degree: 2,
        }
    }

    pub fn linear() -> Self {
        Self::new(KernelFamily::Linear)
    }

    pub fn rbf(gamma: f64) -> Self {
        Self::new(KernelFamily::Rbf).with_gamma(Gamma::Value(gamma))
    }

    pub fn laplacian(gamma: f64) -> Self {
        Self::new(KernelFamily::Laplacian).with_gamma(Gamma::Value(gamma))
    }

    pub fn sigmoid(gamma: f64, intercept: f64) -> Self {
        Self {
            intercept,
            ..Self::new(KernelFamily::Sigmoid).with_gamma(Gamma::Value(gamma))
        }
    }

    pub fn polynomial(gamma: f64, intercept: f64, degree: u32) -> Self {
        Self {
            intercept,
            degree,
            ..Self::new(KernelFamily::Polynomial).with_gamma(Gamma::Value(gamma))
        }
    }

    pub fn cosine() -> Self {
        Self::new(KernelFamily::Cosine)
    }

    pub fn chi_squared(gamma: f64) -> Self {
        Self::new(KernelFamily::ChiSquared).with_gamma(Gamma::Value(gamma))
    }

    pub fn with_gamma(mut self, gamma: Gamma) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma must be positive and finite, got {g}"
                )));
            }
        }
        if !self.intercept.is_finite() {
            return Err(Error::InvalidParameter("intercept must be finite".into()));
        }
        if self.family == KernelFamily::Polynomial && self.degree < 1 {
            return Err(Error::InvalidParameter("polynomial degree must be at least 1".into()));
        }
        Ok(())
    }

    /// Returns a copy with `Gamma::Auto` replaced by `1/d`.
    pub fn resolve(&self, d: usize) -> KernelSpec {
        KernelSpec {
            gamma: Gamma::Value(self.gamma.resolve(d)),
            ..*self
        }
    }

    fn gamma_value(&self, d: usize) -> f64 {
        self.gamma.resolve(d)
    }
}

/// Neumaier-compensated sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
fn squared_euclidean(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for (a, b) in x.iter().zip(y) {
        let diff = a - b;
        acc.add(diff * diff);
    }
    acc.value()
}

#[inline]
fn manhattan(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for (a, b) in x.iter().zip(y) {
        acc.add((a - b).abs());
    }
    acc.value()
}

fn check_nonnegative(v: &[f64]) -> Result<()> {
    match v.iter().position(|&a| a < 0.0) {
        Some(j) => Err(Error::DomainViolation(format!(
            "chi_squared kernel requires nonnegative coordinates, found {} at coordinate {j}",
            v[j]
        ))),
        None => Ok(()),
    }
}

/// Evaluates `k(x, y)`.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let d = x.len();
    let gamma = spec.gamma_value(d);
    let value = match spec.family {
        KernelFamily::Linear => dot(x, y),
        KernelFamily::Rbf => (-gamma * squared_euclidean(x, y)).exp(),
        KernelFamily::Laplacian => (-gamma * manhattan(x, y)).exp(),
        KernelFamily::Sigmoid => (gamma * dot(x, y) + spec.intercept).tanh(),
        KernelFamily::Polynomial => (gamma * dot(x, y) + spec.intercept).powi(spec.degree as i32),
        KernelFamily::Cosine => {
            let nx = dot(x, x).sqrt();
            let ny = dot(y, y).sqrt();
            if nx == 0.0 || ny == 0.0 {
                return Err(Error::DomainViolation(
                    "cosine kernel is undefined for the zero vector".into(),
                ));
            }
            dot(x, y) / (nx * ny)
        }
        KernelFamily::ChiSquared => {
            check_nonnegative(x)?;
            check_nonnegative(y)?;
            let mut acc = CompensatedSum::default();
            for (a, b) in x.iter().zip(y) {
                let denom = a + b;
                // both coordinates zero: the term's limit is 0
                if denom > 0.0 {
                    let diff = a - b;
                    acc.add(diff * diff / denom);
                }
            }
            (-gamma * acc.value()).exp()
        }
    };
    Ok(value)
}

/// `n` samples of dimension `d`, stored one sample per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    samples: Array2<f64>,
}

impl DataMatrix {
    /// Builds from an `n x d` array whose rows are samples.
    pub fn from_samples(samples: Array2<f64>) -> Result<Self> {
        let (n, d) = samples.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidData(format!(
                "data matrix must be non-empty, got {n} samples of dimension {d}"
            )));
        }
        if let Some(((i, j), v)) = samples.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value {v} at sample {i}, coordinate {j}"
            )));
        }
        Ok(DataMatrix {
            samples: samples.as_standard_layout().into_owned(),
        })
    }

    /// Builds from a `d x n` array whose columns are samples.
    pub fn from_columns(columns: ArrayView2<f64>) -> Result<Self> {
        Self::from_samples(columns.t().to_owned())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rows[i].len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let samples = Array2::from_shape_vec((rows.len(), d), flat).map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::from_samples(samples)
    }

    pub fn n(&self) -> usize {
        self.samples.nrows()
    }

    pub fn d(&self) -> usize {
        self.samples.ncols()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.samples.as_slice().expect("standard layout")[i * d..(i + 1) * d]
    }

    /// `n x d` view, rows are samples.
    pub fn samples(&self) -> ArrayView2<'_, f64> {
        self.samples.view()
    }

    /// `d x n` copy, columns are samples.
    pub fn to_columns(&self) -> Array2<f64> {
        self.samples.t().to_owned()
    }

    /// Subtracts the per-coordinate mean from every sample.
    pub fn centered(&self) -> DataMatrix {
        let mean = self.samples.mean_axis(Axis(0)).expect("n >= 1");
        DataMatrix {
            samples: &self.samples - &mean,
        }
    }

    pub fn select(&self, indices: &[usize]) -> DataMatrix {
        DataMatrix {
            samples: self.samples.select(Axis(0), indices),
        }
    }
}

/// Dense symmetric matrix with a centering flag.
///
/// Symmetry is exact: every constructor mirrors or averages the two triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: Array2<f64>,
    centered: bool,
}

impl GramMatrix {
    /// Accepts a square array whose asymmetry is at most `tol * max(1, max|a|)`
    /// and stores its symmetric part.
    pub fn from_array(a: Array2<f64>, tol: f64) -> Result<Self> {
        let (rows, cols) = a.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if let Some(((i, j), v)) = a.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite value {v} at ({i}, {j})")));
        }
        let asym = max_asymmetry(a.view());
        let scale = max_abs(a.view()).max(1.0);
        if asym > tol * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
                tolerance: tol * scale,
            });
        }
        let mut values = a.as_standard_layout().into_owned();
        for i in 0..rows {
            for j in (i + 1)..rows {
                let avg = 0.5 * (values[[i, j]] + values[[j, i]]);
                values[[i, j]] = avg;
                values[[j, i]] = avg;
            }
        }
        Ok(GramMatrix {
            values,
            centered: false,
        })
    }

    /// Fills the upper triangle with `f(i, j)` (`i <= j`) and mirrors it.
    pub fn from_upper_fn<F>(n: usize, exec: Exec, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        Self::try_from_upper_fn(n, exec, |i, j| Ok::<_, Error>(f(i, j))).expect("infallible")
    }

    pub fn try_from_upper_fn<F, E>(n: usize, exec: Exec, f: F) -> std::result::Result<Self, E>
    where
        F: Fn(usize, usize) -> std::result::Result<f64, E> + Sync + Send,
        E: Send,
    {
        let mut buf = vec![0.0; n * n];
        par::try_for_each_row(exec, &mut buf, n, |i, row| {
            for j in i..n {
                row[j] = f(i, j)?;
            }
            Ok(())
        })?;
        for i in 0..n {
            for j in 0..i {
                buf[i * n + j] = buf[j * n + i];
            }
        }
        Ok(GramMatrix {
            values: Array2::from_shape_vec((n, n), buf).expect("n*n buffer"),
            centered: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        GramMatrix {
            values: Array2::eye(n),
            centered: false,
        }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Writes `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[[i, j]] = v;
        self.values[[j, i]] = v;
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub(crate) fn with_centered(mut self, centered: bool) -> Self {
        self.centered = centered;
        self
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    pub fn diag(&self) -> Vec<f64> {
        self.values.diag().to_vec()
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> GramMatrix {
        GramMatrix {
            values: &self.values * c,
            centered: self.centered,
        }
    }
}

pub(crate) fn max_abs(a: ArrayView2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub(crate) fn max_asymmetry(a: ArrayView2<f64>) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst
}

/// Gram matrix `K(i, j) = k(x_i, x_j)`.
pub fn gram(spec: &KernelSpec, x: &DataMatrix) -> Result<GramMatrix> {
    gram_with(spec, x, Exec::default())
}

pub fn gram_with(spec: &KernelSpec, x: &DataMatrix, exec: Exec) -> Result<GramMatrix> {
    spec.validate()?;
    let spec = spec.resolve(x.d());
    GramMatrix::try_from_upper_fn(x.n(), exec, |i, j| {
        eval_kernel(&spec, x.sample(i), x.sample(j)).map_err(|e| Error::KernelEntry {
            i,
            j,
            source: Box::new(e),
        })
    })
}

/// Cross-kernel matrix of shape `n1 x n2` with entry `(i, j) = k(x1_i, x2_j)`.
///
/// `Gamma::Auto` resolves against the shared dimension.
pub fn gram_between(spec: &KernelSpec, x1: &DataMatrix, x2: &DataMatrix) -> Result<Array2<f64>> {
    gram_between_with(spec, x1, x2, Exec::default())
}

pub fn gram_between_with(spec: &KernelSpec, x1: &DataMatrix, x2: &DataMatrix, exec: Exec) -> Result<Array2<f64>> {
    spec.validate()?;
    if x1.d() != x2.d() {
        return Err(Error::DimensionMismatch {
            expected: x1.d(),
            found: x2.d(),
        });
    }
    let spec = spec.resolve(x1.d());
    let (n1, n2) = (x1.n(), x2.n());
    let mut buf = vec![0.0; n1 * n2];
    par::try_for_each_row(exec, &mut buf, n2, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            *out = eval_kernel(&spec, x1.sample(i), x2.sample(j)).map_err(|e| Error::KernelEntry {
                i,
                j,
                source: Box::new(e),
            })?;
        }
        Ok(())
    })?;
    Ok(Array2::from_shape_vec((n1, n2), buf).expect("n1*n2 buffer"))
}

/// Kernel vector `k(X, x_t)` of length `n`.
pub fn kernel_vector(spec: &KernelSpec, x: &DataMatrix, query: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    if query.len() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: query.len(),
        });
    }
    let spec = spec.resolve(x.d());
    (0..x.n())
        .map(|i| {
            eval_kernel(&spec, x.sample(i), query).map_err(|e| Error::KernelEntry {
                i,
                j: 0,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rbf_at_identical_points_is_one() {
        let x = [0.3, -1.2, 4.0];
        assert_eq!(eval_kernel(&KernelSpec::rbf(0.7), &x, &x).unwrap(), 1.0);
    }

    #[test]
    fn linear_with_zero_vector() {
        assert_eq!(
            eval_kernel(&KernelSpec::linear(), &[1.0, 2.0], &[0.0, 0.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn cosine_is_scale_invariant() {
        let x = [1.5, -2.0, 0.25];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let k = eval_kernel(&KernelSpec::cosine(), &x, &y).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degree_one_polynomial_is_linear() {
        let x = [0.5, 1.5, -2.0];
        let y = [3.0, -1.0, 0.75];
        let p = eval_kernel(&KernelSpec::polynomial(1.0, 0.0, 1), &x, &y).unwrap();
        let l = eval_kernel(&KernelSpec::linear(), &x, &y).unwrap();
        assert_eq!(p, l);
    }

    #[test]
    fn laplacian_unit_distance() {
        // exp(-|0 - 1|) evaluated with scalar math
        let expected = (-1.0_f64).exp();
        let k = eval_kernel(&KernelSpec::laplacian(1.0), &[0.0], &[1.0]).unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn sigmoid_and_chi_squared_values() {
        let k = eval_kernel(&KernelSpec::sigmoid(0.5, 1.0), &[1.0, 2.0], &[3.0, -1.0]).unwrap();
        assert!((k - (0.5_f64 * 1.0 + 1.0).tanh()).abs() < 1e-15);
        // (1-3)^2/4 + 0 (zero denominator) = 1
        let k = eval_kernel(&KernelSpec::chi_squared(2.0), &[1.0, 0.0], &[3.0, 0.0]).unwrap();
        assert!((k - (-2.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval_kernel(&KernelSpec::cosine(), &[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            eval_kernel(&KernelSpec::chi_squared(1.0), &[-1.0], &[1.0]),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            eval_kernel(&KernelSpec::linear(), &[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn auto_gamma_is_inverse_dimension() {
        let spec = KernelSpec::new(KernelFamily::Rbf);
        assert_eq!(spec.resolve(4).gamma, Gamma::Value(0.25));
        let x = [0.0, 0.0, 0.0, 0.0];
        let y = [1.0, 1.0, 1.0, 1.0];
        assert!((eval_kernel(&spec, &x, &y).unwrap() - (-1.0_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(KernelSpec::rbf(0.0).validate().is_err());
        assert!(KernelSpec::rbf(-1.0).validate().is_err());
        assert!(KernelSpec::polynomial(1.0, 0.0, 0).validate().is_err());
    }

    #[test]
    fn single_sample_gram() {
        let x = DataMatrix::from_rows(&[vec![2.0, 3.0]]).unwrap();
        let k = gram(&KernelSpec::linear(), &x).unwrap();
        assert_eq!(k.values(), &array![[13.0]]);
        assert!(!k.is_centered());
    }

    #[test]
    fn gram_reports_offending_pair() {
        let x = DataMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match gram(&KernelSpec::cosine(), &x) {
            Err(Error::KernelEntry { i, j, .. }) => assert_eq!((i, j), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gram_between_single_column_is_kernel_vector() {
        let x = DataMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]]).unwrap();
        let t = DataMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let spec = KernelSpec::rbf(0.3);
        let kt = gram_between(&spec, &x, &t).unwrap();
        let kv = kernel_vector(&spec, &x, t.sample(0)).unwrap();
        assert_eq!(kt.column(0).to_vec(), kv);
    }

    #[test]
    fn gram_matrix_from_array_checks_symmetry() {
        assert!(matches!(
            GramMatrix::from_array(array![[1.0, 2.0], [2.5, 1.0]], 1e-10),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            GramMatrix::from_array(array![[1.0, 2.0, 3.0], [2.0, 1.0, 3.0]], 1e-10),
            Err(Error::NotSquare { .. })
        ));
        let mut g = GramMatrix::from_array(array![[1.0, 2.0], [2.0, 1.0]], 0.0).unwrap();
        g.set(0, 1, 7.0);
        assert_eq!(g.get(1, 0), 7.0);
    }

    #[test]
    fn data_matrix_layouts_agree() {
        let cols = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let x = DataMatrix::from_columns(cols.view()).unwrap();
        assert_eq!((x.d(), x.n()), (2, 3));
        assert_eq!(x.sample(1), &[2.0, 5.0]);
        assert_eq!(x.to_columns(), cols);
        assert!(DataMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }
}

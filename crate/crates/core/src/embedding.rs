//! Spectral embedding from the eigenvectors of a double-centered kernel, and
//! out-of-sample extension through the kernel-operator eigenfunctions.
//!
//! With `K̆ v_k = δ_k v_k` (unit `v_k`, descending `δ_k`):
//!
//! * training embedding: `y_k(x_i) = sqrt(δ_k) v_ki`
//! * eigenfunction: `f_k(x) = sqrt(n)/δ_k Σ_i v_ki k̆(x_i, x)`, which equals `sqrt(n) v_ki` at `x = x_i`
//! * out-of-sample embedding: `y_k(x) = sqrt(δ_k) f_k(x) / sqrt(n) = 1/sqrt(δ_k) Σ_i v_ki k̆(x_i, x)`
//! * operator eigenvalue: `λ_k = δ_k / n`
//!
//! `k̆(x_i, x)` is centered with the training feature-space mean, so the model
//! keeps the training row means and grand mean of the uncentered Gram matrix.
//!
//! Eigenvalues inside a degenerate cluster come out in solver order, and any
//! eigenvector may flip sign between datasets. Compare pairwise embedded
//! distances or subspace projectors, not signed coordinates.

use std::io::{Read, Write};

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, DEFAULT_MAX_SWEEPS};
use crate::error::{Error, Result};
use crate::gram_ops::{double_center, CenteringStats};
use crate::kernel::{gram, kernel_vector, DataMatrix, GramMatrix, KernelSpec};
use crate::par::{self, Exec};

/// Eigenvalues at or below `EIG_FLOOR_REL * δ_1` are not treated as positive.
pub const EIG_FLOOR_REL: f64 = 1e-10;

/// Jacobi tolerance used when fitting. Out-of-sample coordinates divide by
/// `sqrt(δ_k)`, so with components kept down to `EIG_FLOOR_REL * δ_1` the
/// solver residual has to sit well below that floor. Jacobi converges
/// quadratically, so this costs one or two sweeps over the general default.
pub const FIT_EIGEN_TOL: f64 = 1e-14;

pub const MODEL_FORMAT: &str = "kernelkit-embedding-model";
pub const MODEL_VERSION: u32 = 1;

/// Training samples and the (gamma-resolved) kernel they were embedded with.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub spec: KernelSpec,
    pub data: DataMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    requested_p: usize,
    eigenvalues: Vec<f64>,
    /// `n x p`, column `k` is `v_k`.
    eigenvectors: Array2<f64>,
    gram: GramMatrix,
    stats: CenteringStats,
    training: Option<TrainingSet>,
}

impl EmbeddingModel {
    /// Fits on an uncentered Gram matrix, keeping at most `p` components.
    ///
    /// Fewer than `p` components are kept when the centered kernel has fewer
    /// eigenvalues above the floor; see [`EmbeddingModel::truncated`].
    pub fn fit(k: &GramMatrix, p: usize) -> Result<Self> {
        let n = k.n();
        if p > n {
            return Err(Error::InvalidParameter(format!(
                "embedding dimension {p} exceeds the number of samples {n}"
            )));
        }
        let centered = double_center(k);
        let eig = eigh(centered.view(), FIT_EIGEN_TOL, DEFAULT_MAX_SWEEPS)?;
        let lead = eig.max_eigenvalue();
        if p > 0 && !(lead > 0.0) {
            return Err(Error::NoPositiveSpectrum);
        }
        let floor = EIG_FLOOR_REL * lead;
        let kept = eig.eigenvalues().iter().take(p).take_while(|&&d| d > floor).count();
        let eigenvalues = eig.eigenvalues()[..kept].to_vec();
        let eigenvectors = eig.eigenvectors().slice(ndarray::s![.., ..kept]).to_owned();
        Ok(EmbeddingModel {
            requested_p: p,
            eigenvalues,
            eigenvectors,
            stats: CenteringStats::from_gram(k),
            gram: k.clone(),
            training: None,
        })
    }

    /// Builds the Gram matrix of `x` under `spec` and fits on it, retaining the
    /// training data so that new points can be embedded.
    pub fn fit_data(spec: &KernelSpec, x: &DataMatrix, p: usize) -> Result<Self> {
        let spec = spec.resolve(x.d());
        let k = gram(&spec, x)?;
        let mut model = Self::fit(&k, p)?;
        model.training = Some(TrainingSet { spec, data: x.clone() });
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    /// Number of retained components.
    pub fn p(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn requested_p(&self) -> usize {
        self.requested_p
    }

    /// True when fewer components than requested had positive eigenvalues.
    pub fn truncated(&self) -> bool {
        self.p() < self.requested_p
    }

    /// `δ_1 .. δ_p`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `n x p`, columns are the kernel eigenvectors.
    pub fn eigenvectors(&self) -> ArrayView2<'_, f64> {
        self.eigenvectors.view()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector_column(&self, k: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(k)
    }

    /// The uncentered training Gram matrix.
    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// The double-centered training kernel the model was fitted on.
    pub fn centered_kernel(&self) -> GramMatrix {
        double_center(&self.gram)
    }

    pub fn centering(&self) -> &CenteringStats {
        &self.stats
    }

    pub fn training(&self) -> Option<&TrainingSet> {
        self.training.as_ref()
    }

    fn check_component(&self, k: usize) -> Result<()> {
        if k >= self.p() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.p(),
            });
        }
        Ok(())
    }

    /// `p x n` matrix with `Y(k, i) = sqrt(δ_k) v_ki`.
    pub fn embed_training(&self) -> Array2<f64> {
        let mut y = self.eigenvectors.t().to_owned();
        for (mut row, &d) in y.rows_mut().into_iter().zip(&self.eigenvalues) {
            row *= d.sqrt();
        }
        y
    }

    /// Embeds a point given its centered kernel vector `k̆(X, x)`.
    pub fn embed_centered_vector(&self, centered: &[f64]) -> Result<Vec<f64>> {
        if centered.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: centered.len(),
            });
        }
        let kc = ArrayView1::from(centered);
        Ok(self
            .eigenvalues
            .iter()
            .zip(self.eigenvectors.columns())
            .map(|(&d, v)| v.dot(&kc) / d.sqrt())
            .collect())
    }

    /// Embeds a point given its uncentered kernel vector `k(X, x)`.
    pub fn embed_kernel_vector(&self, kt: &[f64]) -> Result<Vec<f64>> {
        self.embed_centered_vector(&self.stats.center_vector(kt)?)
    }

    fn centered_vector_for(&self, x: &[f64]) -> Result<Vec<f64>> {
        let training = self.training.as_ref().ok_or(Error::MissingTrainingData)?;
        let kt = kernel_vector(&training.spec, &training.data, x)?;
        self.stats.center_vector(&kt)
    }

    /// Embeds a new point `x` (length `d`) into the `p` retained dimensions.
    pub fn embed_out_of_sample(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.p() == 0 {
            if let Some(t) = &self.training {
                if x.len() != t.data.d() {
                    return Err(Error::DimensionMismatch {
                        expected: t.data.d(),
                        found: x.len(),
                    });
                }
            }
            return Ok(Vec::new());
        }
        self.embed_centered_vector(&self.centered_vector_for(x)?)
    }

    /// Embeds every sample of `xt`; returns `n_t x p`, one row per sample.
    pub fn embed_out_of_sample_batch(&self, xt: &DataMatrix, exec: Exec) -> Result<Array2<f64>> {
        let p = self.p();
        let mut buf = vec![0.0; xt.n() * p];
        if p == 0 {
            for i in 0..xt.n() {
                self.embed_out_of_sample(xt.sample(i))?;
            }
        }
        par::try_for_each_row(exec, &mut buf, p, |i, row| {
            row.copy_from_slice(&self.embed_out_of_sample(xt.sample(i))?);
            Ok::<_, Error>(())
        })?;
        Ok(Array2::from_shape_vec((xt.n(), p), buf).expect("n_t*p buffer"))
    }

    /// `f_k(x) = sqrt(n)/δ_k Σ_i v_ki k̆(x_i, x)`, with `k` zero-based.
    pub fn eigenfunction_value(&self, x: &[f64], k: usize) -> Result<f64> {
        self.check_component(k)?;
        let kc = self.centered_vector_for(x)?;
        self.eigenfunction_from_centered(&kc, k)
    }

    /// Eigenfunction `k` evaluated from a centered kernel vector.
    pub fn eigenfunction_from_centered(&self, centered: &[f64], k: usize) -> Result<f64> {
        self.check_component(k)?;
        if centered.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: centered.len(),
            });
        }
        let n = self.n() as f64;
        let proj = self.eigenvectors.column(k).dot(&ArrayView1::from(centered));
        Ok(n.sqrt() / self.eigenvalues[k] * proj)
    }

    /// `λ_k = δ_k / n`, the eigenvalue of the empirical kernel operator (and of
    /// the feature-space covariance).
    pub fn operator_eigenvalue(&self, k: usize) -> Result<f64> {
        self.check_component(k)?;
        Ok(self.eigenvalues[k] / self.n() as f64)
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            n: self.n(),
            p: self.p(),
            d: self.training.as_ref().map(|t| t.data.d()),
            requested_p: self.requested_p,
            spec: self.training.as_ref().map(|t| t.spec),
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.columns().into_iter().map(|c| c.to_vec()).collect(),
            training_data: self
                .training
                .as_ref()
                .map(|t| (0..t.data.n()).map(|i| t.data.sample(i).to_vec()).collect()),
            row_means: self.stats.row_means.clone(),
            grand_mean: self.stats.grand_mean,
            gram: match self.training {
                Some(_) => None,
                None => Some(self.gram.values().rows().into_iter().map(|r| r.to_vec()).collect()),
            },
        };
        serde_json::to_writer(writer, &file).map_err(|e| Error::Io {
            path: "<model>".into(),
            source: e.into(),
        })
    }

    pub fn load<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| Error::Io {
            path: "<model>".into(),
            source: e,
        })?;
        let header: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::CorruptModel(format!("unreadable model file: {e}")))?;
        if header.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
            return Err(Error::CorruptModel("missing or unknown format tag".into()));
        }
        let version = header
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::CorruptModel("missing version".into()))?;
        if version != MODEL_VERSION as u64 {
            return Err(Error::VersionMismatch {
                expected: MODEL_VERSION,
                found: version as u32,
            });
        }
        let file: ModelFile = serde_json::from_value(header).map_err(|e| Error::CorruptModel(e.to_string()))?;
        file.into_model()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    n: usize,
    p: usize,
    d: Option<usize>,
    requested_p: usize,
    spec: Option<KernelSpec>,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    training_data: Option<Vec<Vec<f64>>>,
    row_means: Vec<f64>,
    grand_mean: f64,
    gram: Option<Vec<Vec<f64>>>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

impl ModelFile {
    fn into_model(self) -> Result<EmbeddingModel> {
        let (n, p) = (self.n, self.p);
        if self.eigenvalues.len() != p || self.eigenvectors.len() != p || p > self.requested_p {
            return Err(corrupt("component count does not match p"));
        }
        if self.eigenvectors.iter().any(|v| v.len() != n) || self.row_means.len() != n {
            return Err(corrupt("vector lengths do not match n"));
        }
        if self.eigenvalues.iter().any(|&d| !(d > 0.0)) {
            return Err(corrupt("retained eigenvalues must be positive"));
        }
        let mut eigenvectors = Array2::zeros((n, p));
        for (k, v) in self.eigenvectors.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                eigenvectors[[i, k]] = x;
            }
        }
        let stats = CenteringStats {
            row_means: self.row_means,
            grand_mean: self.grand_mean,
        };
        let (gram, training) = match (self.training_data, self.spec, self.gram) {
            (Some(rows), Some(spec), None) => {
                let data = DataMatrix::from_rows(&rows).map_err(|e| corrupt(format!("training data: {e}")))?;
                if data.n() != n || Some(data.d()) != self.d {
                    return Err(corrupt("training data shape does not match n and d"));
                }
                let gram = gram(&spec, &data).map_err(|e| corrupt(format!("training kernel: {e}")))?;
                if CenteringStats::from_gram(&gram) != stats {
                    return Err(corrupt("stored centering means do not match the training data"));
                }
                (gram, Some(TrainingSet { spec, data }))
            }
            (None, None, Some(rows)) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(corrupt("gram matrix shape does not match n"));
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                let a = Array2::from_shape_vec((n, n), flat).map_err(|e| corrupt(e.to_string()))?;
                let gram = GramMatrix::from_array(a, 0.0).map_err(|e| corrupt(format!("gram matrix: {e}")))?;
                (gram, None)
            }
            _ => {
                return Err(corrupt(
                    "expected either training data with a kernel spec, or a gram matrix",
                ))
            }
        };
        Ok(EmbeddingModel {
            requested_p: self.requested_p,
            eigenvalues: self.eigenvalues,
            eigenvectors,
            gram,
            stats,
            training,
        })
    }
}

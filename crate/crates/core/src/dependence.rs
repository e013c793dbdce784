//! Kernel dependence (HSIC) and two-sample discrepancy (MMD) statistics.

use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::gram_ops::double_center;
use crate::kernel::GramMatrix;

/// Gram matrices over paired samples `(x_i, y_i)`.
#[derive(Debug, Clone)]
pub struct PairedKernels {
    kx: GramMatrix,
    ky: GramMatrix,
}

impl PairedKernels {
    pub fn new(kx: GramMatrix, ky: GramMatrix) -> Result<Self> {
        if kx.n() != ky.n() {
            return Err(Error::OrderMismatch { x: kx.n(), y: ky.n() });
        }
        Ok(PairedKernels { kx, ky })
    }

    pub fn n(&self) -> usize {
        self.kx.n()
    }

    pub fn kx(&self) -> &GramMatrix {
        &self.kx
    }

    pub fn ky(&self) -> &GramMatrix {
        &self.ky
    }
}

/// `tr(Kx H Ky H) / (n - 1)^2`.
///
/// Evaluated as the Frobenius inner product of the two double-centered
/// kernels, which equals the trace form because `H` is idempotent and makes
/// the statistic exactly symmetric in its arguments.
pub fn hsic(pk: &PairedKernels) -> Result<f64> {
    let n = pk.n();
    if n < 2 {
        return Err(Error::TooFewSamples { required: 2, found: n });
    }
    let cx = double_center(&pk.kx);
    let cy = double_center(&pk.ky);
    let inner: f64 = cx.values().iter().zip(cy.values().iter()).map(|(a, b)| a * b).sum();
    let denom = (n - 1) as f64;
    Ok(inner / (denom * denom))
}

/// Squared maximum mean discrepancy, biased (V-statistic) form:
/// `mean(Kxx) + mean(Kyy) - 2 mean(Kxy)`, diagonal terms included.
///
/// Unequal sample sizes use per-block means.
pub fn mmd2(kxx: ArrayView2<f64>, kyy: ArrayView2<f64>, kxy: ArrayView2<f64>) -> Result<f64> {
    let (n, n2) = kxx.dim();
    let (m, m2) = kyy.dim();
    if n != n2 || m != m2 {
        return Err(Error::ShapeMismatch(format!(
            "within-sample kernels must be square, got {n}x{n2} and {m}x{m2}"
        )));
    }
    if kxy.dim() != (n, m) {
        return Err(Error::ShapeMismatch(format!(
            "cross kernel must be {n}x{m}, got {}x{}",
            kxy.nrows(),
            kxy.ncols()
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::ShapeMismatch("both samples must be non-empty".into()));
    }
    let mean = |a: ArrayView2<f64>| a.iter().sum::<f64>() / a.len() as f64;
    Ok(mean(kxx) + mean(kyy) - 2.0 * mean(kxy))
}

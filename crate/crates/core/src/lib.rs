//! Kernel methods toolkit.
//!
//! * [`kernel`]: kernel functions, [`DataMatrix`], [`GramMatrix`], Gram construction
//! * [`gram_ops`]: centering, normalization, distance-derived kernels, Mercer checks, Cholesky
//! * [`eigen`]: symmetric Jacobi eigensolver and kernel EVD
//! * [`embedding`]: spectral embedding with out-of-sample extension
//! * [`nystrom`]: landmark selection and Nyström completion
//! * [`dependence`]: HSIC and MMD
//! * [`cli`]: the `kernelkit` batch front end
//!
//! Data-parallel loops (Gram rows, landmark rows, batch embedding) run on
//! rayon when the default `parallel` feature is on; results are bitwise
//! identical to the sequential path.
//!
//! ```
//! use kernelkit::{gram, validate_mercer, DataMatrix, KernelSpec};
//!
//! let x = DataMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]]).unwrap();
//! let k = gram(&KernelSpec::rbf(0.5), &x).unwrap();
//! assert_eq!(k.get(1, 1), 1.0);
//! assert!(validate_mercer(k.view(), 1e-8).unwrap().psd);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dependence;
pub mod eigen;
pub mod embedding;
pub mod error;
pub mod gram_ops;
pub mod kernel;
pub mod nystrom;
pub mod par;

pub use dependence::{hsic, mmd2, PairedKernels};
pub use eigen::{eigh, evd_factorize, EigenSystem};
pub use embedding::EmbeddingModel;
pub use error::{Error, ErrorClass, Result};
pub use gram_ops::{
    center_out_of_sample, centering_matrix, cholesky, cosine_normalize, double_center, generalized_normalize,
    kernel_from_distance, validate_mercer, CenteringStats, DistanceMatrix, MercerReport,
};
pub use kernel::{eval_kernel, gram, gram_between, DataMatrix, Gamma, GramMatrix, KernelFamily, KernelSpec};
pub use nystrom::{
    build as nystrom_build, nystrom_eigenfunction, reconstruction_error, select_landmarks, DataKernel, KernelProvider,
    LandmarkStrategy, NystromModel,
};
pub use par::Exec;

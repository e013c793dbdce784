//! The `kernelkit` command-line front end.
//!
//! CSV inputs are read with rows as samples and columns as features; kernel
//! and distance inputs are square matrices. Every command writes its result
//! to `--output` (stdout by default) and, when the output is a file or
//! `--meta` is given, a JSON metadata sidecar.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod io;

use std::ffi::OsString;
use std::fs::File;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde_json::{json, Value};

use crate::dependence::{hsic, mmd2, PairedKernels};
use crate::eigen::{eigh, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, ErrorClass};
use crate::gram_ops::{
    center_out_of_sample, cosine_normalize, double_center, generalized_normalize, kernel_from_distance,
    validate_mercer, DistanceMatrix, DEFAULT_PSD_TOL,
};
use crate::kernel::{gram, gram_between, DataMatrix, Gamma, GramMatrix, KernelFamily, KernelSpec};
use crate::nystrom::{self, DataKernel, LandmarkStrategy, DEFAULT_PINV_THRESHOLD};
use crate::par::Exec;

use io::{fmt_f64, matrix_csv, matrix_json, read_table, Sink};
pub use io::{parse_table, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Relative asymmetry accepted when reading a kernel matrix from CSV.
const KERNEL_SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    /// Wraps a library error, prefixing the file or parameter it concerns.
    fn from_core(context: &str, err: Error) -> Self {
        let code = match err.class() {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Data => EXIT_DATA,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: format!("{context}: {err}"),
        }
    }
}

trait Context<T> {
    fn ctx(self, context: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, Error> {
    fn ctx(self, context: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::from_core(context, e))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kernelkit",
    version,
    about = "Kernel matrices, spectral embedding, Nystrom completion, HSIC and MMD"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    /// linear, rbf, laplacian, sigmoid, polynomial, cosine or chi_squared
    #[arg(long)]
    kernel: KernelFamily,
    /// Positive number or `auto` (1/d); defaults to auto, or 1 for chi_squared
    #[arg(long)]
    gamma: Option<Gamma>,
    /// Intercept for sigmoid and polynomial kernels
    #[arg(long)]
    c: Option<f64>,
    /// Polynomial degree
    #[arg(long)]
    degree: Option<u32>,
}

impl KernelArgs {
    fn spec(&self) -> Result<KernelSpec, CliError> {
        build_spec(self.kernel, self.gamma, self.c, self.degree)
    }
}

fn build_spec(
    family: KernelFamily,
    gamma: Option<Gamma>,
    c: Option<f64>,
    degree: Option<u32>,
) -> Result<KernelSpec, CliError> {
    let mut spec = KernelSpec::new(family);
    if let Some(g) = gamma {
        spec.gamma = g;
    }
    if let Some(c) = c {
        spec.intercept = c;
    }
    if let Some(d) = degree {
        spec.degree = d;
    }
    spec.validate().ctx("kernel parameters")?;
    Ok(spec)
}

#[derive(Args, Debug, Clone)]
struct YKernelArgs {
    /// Kernel family for Y (defaults to the X kernel)
    #[arg(long = "y-kernel", id = "y_kernel")]
    kernel: Option<KernelFamily>,
    #[arg(long = "y-gamma", id = "y_gamma")]
    gamma: Option<Gamma>,
    #[arg(long = "y-c", id = "y_c")]
    c: Option<f64>,
    #[arg(long = "y-degree", id = "y_degree")]
    degree: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Result file (stdout when omitted or `-`)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Metadata sidecar path (defaults to `<output>.meta.json` when writing to a file)
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl OutputArgs {
    fn sink(&self) -> Sink {
        Sink {
            output: self.output.clone(),
            meta: self.meta.clone(),
            format: self.format,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Normalization {
    None,
    Cosine,
    TMean,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of a dataset, or the cross-kernel against --test
    Gram {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Second dataset; outputs the n x n_t cross-kernel
        #[arg(long)]
        test: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Double-center the result (applied after normalization)
        #[arg(long)]
        center: bool,
        #[arg(long, value_enum, default_value = "none")]
        normalize: Normalization,
        /// Exponent for t-mean normalization
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Double-center a kernel matrix, or center a train-vs-test kernel against it
    Center {
        /// Uncentered training kernel (n x n)
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Train-vs-test kernel (n x n_t) to center with the training mean
        #[arg(long)]
        test_kernel: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cosine or generalized-mean normalization of a kernel matrix
    Normalize {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "cosine")]
        method: Normalization,
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Report symmetry and positive semi-definiteness of a kernel matrix
    Validate {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Kernel -1/2 H D H from a matrix of squared distances
    FromDistance {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Also check the triangle inequality on sqrt(D) (O(n^3))
        #[arg(long)]
        check_triangle: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral embedding of a dataset
    Embed {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Embedding dimension
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        p: u64,
        /// Write the fitted model here for later `oos-embed`
        #[arg(long)]
        save_model: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Embed new samples with a saved model
    OosEmbed {
        /// Model JSON written by `embed --save-model`
        #[arg(long)]
        model: PathBuf,
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Output only this embedding dimension (1-based)
        #[arg(long)]
        component: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Nystrom approximation of the Gram matrix from landmark rows
    Nystrom {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelArgs,
        /// Number of landmarks
        #[arg(long)]
        m: usize,
        /// uniform (seeded sample) or greedy_pivot (pivoted partial Cholesky)
        #[arg(long, default_value = "uniform")]
        strategy: LandmarkStrategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PINV_THRESHOLD)]
        pinv_threshold: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Hilbert-Schmidt independence criterion between paired samples
    Hsic {
        /// First sample CSV
        #[arg(long)]
        x: PathBuf,
        /// Second sample CSV
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        y_kernel: YKernelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Squared maximum mean discrepancy between two samples
    Mmd {
        /// First sample CSV
        #[arg(long)]
        x: PathBuf,
        /// Second sample CSV
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Eigendecomposition of a symmetric matrix
    Eig {
        /// Input CSV (stdin when omitted or `-`)
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
        max_sweeps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Errors are printed to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn read_data(path: Option<&PathBuf>) -> Result<(DataMatrix, Table), CliError> {
    let table = read_table(path.map(PathBuf::as_path))?;
    let data = DataMatrix::from_samples(table.values.clone()).ctx(&table.source)?;
    Ok((data, table))
}

fn read_kernel(path: Option<&PathBuf>) -> Result<(GramMatrix, Table), CliError> {
    let table = read_table(path.map(PathBuf::as_path))?;
    let k = GramMatrix::from_array(table.values.clone(), KERNEL_SYMMETRY_TOL).ctx(&table.source)?;
    Ok((k, table))
}

fn kernel_meta(spec: &KernelSpec, d: usize) -> Value {
    let requested = match spec.gamma {
        Gamma::Auto => json!("auto"),
        Gamma::Value(g) => json!(g),
    };
    let mut meta = json!({
        "family": spec.family.name(),
        "gamma_requested": requested,
        "gamma_resolved": spec.gamma.resolve(d),
    });
    if matches!(spec.family, KernelFamily::Sigmoid | KernelFamily::Polynomial) {
        meta["intercept"] = json!(spec.intercept);
    }
    if spec.family == KernelFamily::Polynomial {
        meta["degree"] = json!(spec.degree);
    }
    meta
}

fn data_input_meta(table: &Table) -> Value {
    let mut v = table.describe();
    v["orientation"] = json!("rows are samples; transposed internally to columns-as-samples");
    v
}

fn base_meta(command: &str, inputs: Vec<Value>) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "notices": [],
    })
}

fn push_notice(meta: &mut Value, notice: impl Into<String>) {
    if let Some(list) = meta["notices"].as_array_mut() {
        list.push(json!(notice.into()));
    }
}

fn emit_matrix(out: &OutputArgs, m: &Array2<f64>, meta: Value) -> Result<(), CliError> {
    out.sink().emit(matrix_csv(m), matrix_json(m), meta)
}

fn emit_scalar(out: &OutputArgs, name: &str, value: f64, meta: Value) -> Result<(), CliError> {
    out.sink()
        .emit(format!("{}\n", fmt_f64(value)), json!({ name: value }), meta)
}

fn apply_normalization(
    k: GramMatrix,
    method: Normalization,
    t: Option<f64>,
    context: &str,
) -> Result<GramMatrix, CliError> {
    match method {
        Normalization::None => Ok(k),
        Normalization::Cosine => cosine_normalize(&k).ctx(context),
        Normalization::TMean => {
            let t = t.ok_or_else(|| CliError::usage("--t is required for t-mean normalization"))?;
            generalized_normalize(&k, t).ctx(context)
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gram {
            input,
            test,
            kernel,
            center,
            normalize,
            t,
            out,
        } => {
            let spec = kernel.spec()?;
            let (x, table) = read_data(input.as_ref())?;
            let mut meta = base_meta("gram", vec![data_input_meta(&table)]);
            meta["kernel"] = kernel_meta(&spec, x.d());
            if let Some(test) = test {
                if center || normalize != Normalization::None {
                    return Err(CliError::usage("--center and --normalize apply only to square Gram matrices; use `center --test-kernel` instead"));
                }
                let (xt, ttable) = read_data(Some(&test))?;
                meta["inputs"]
                    .as_array_mut()
                    .expect("array")
                    .push(data_input_meta(&ttable));
                let kt = gram_between(&spec, &x, &xt).ctx(&ttable.source)?;
                return emit_matrix(&out, &kt, meta);
            }
            let mut k = gram(&spec, &x).ctx(&table.source)?;
            k = apply_normalization(k, normalize, t, &table.source)?;
            if center {
                k = double_center(&k);
            }
            meta["normalization"] = json!(format!("{normalize:?}").to_lowercase());
            meta["centered"] = json!(k.is_centered());
            emit_matrix(&out, k.values(), meta)
        }
        Command::Center {
            input,
            test_kernel,
            out,
        } => {
            let (k, table) = read_kernel(input.as_ref())?;
            let mut meta = base_meta("center", vec![table.describe()]);
            match test_kernel {
                Some(path) => {
                    let kt = read_table(Some(&path))?;
                    meta["inputs"].as_array_mut().expect("array").push(kt.describe());
                    let c = center_out_of_sample(&k, kt.values.view()).ctx(&kt.source)?;
                    emit_matrix(&out, &c, meta)
                }
                None => emit_matrix(&out, double_center(&k).values(), meta),
            }
        }
        Command::Normalize { input, method, t, out } => {
            let (k, table) = read_kernel(input.as_ref())?;
            let mut meta = base_meta("normalize", vec![table.describe()]);
            meta["method"] = json!(format!("{method:?}").to_lowercase());
            if let Some(t) = t {
                meta["t"] = json!(t);
            }
            let k = apply_normalization(k, method, t, &table.source)?;
            emit_matrix(&out, k.values(), meta)
        }
        Command::Validate { input, tol, out } => {
            let table = read_table(input.as_deref())?;
            let report = validate_mercer(table.values.view(), tol).ctx(&table.source)?;
            let mut meta = base_meta("validate", vec![table.describe()]);
            meta["tolerance"] = json!(tol);
            let csv = format!(
                "symmetric,{}\nmax_asymmetry,{}\nmin_eigenvalue,{}\nmax_eigenvalue,{}\npsd,{}\ntolerance_used,{}\n",
                report.symmetric,
                fmt_f64(report.max_asymmetry),
                fmt_f64(report.min_eigenvalue),
                fmt_f64(report.max_eigenvalue),
                report.psd,
                fmt_f64(report.tolerance_used)
            );
            let body = serde_json::to_value(report).expect("serializable");
            meta["report"] = body.clone();
            out.sink().emit(csv, body, meta)
        }
        Command::FromDistance {
            input,
            check_triangle,
            out,
        } => {
            let table = read_table(input.as_deref())?;
            let d = DistanceMatrix::new(table.values.clone()).ctx(&table.source)?;
            let mut meta = base_meta("from-distance", vec![table.describe()]);
            if check_triangle {
                let violation = d.triangle_violation(1e-10 * d.values().iter().fold(0.0_f64, |a, v| a.max(v.sqrt())));
                meta["triangle_violation"] = json!(violation);
                if let Some((i, j, k)) = violation {
                    push_notice(
                        &mut meta,
                        format!("sqrt(D) violates the triangle inequality at ({i}, {j}, {k})"),
                    );
                }
            }
            emit_matrix(&out, kernel_from_distance(&d).values(), meta)
        }
        Command::Embed {
            input,
            kernel,
            p,
            save_model,
            out,
        } => {
            let spec = kernel.spec()?;
            let (x, table) = read_data(input.as_ref())?;
            if p as usize > x.n() {
                return Err(CliError::usage(format!(
                    "--p: embedding dimension {p} exceeds the {} samples in {}",
                    x.n(),
                    table.source
                )));
            }
            let model = EmbeddingModel::fit_data(&spec, &x, p as usize).ctx(&table.source)?;
            let mut meta = base_meta("embed", vec![data_input_meta(&table)]);
            meta["kernel"] = kernel_meta(&spec, x.d());
            meta["p_requested"] = json!(p);
            meta["p"] = json!(model.p());
            meta["eigenvalues"] = json!(model.eigenvalues());
            meta["tolerances"] = json!({ "eigen_tol": crate::embedding::FIT_EIGEN_TOL, "max_sweeps": DEFAULT_MAX_SWEEPS, "eig_floor_rel": crate::embedding::EIG_FLOOR_REL });
            meta["layout"] = json!("one row per sample, one column per embedding dimension");
            if model.truncated() {
                push_notice(
                    &mut meta,
                    format!(
                        "requested p = {p} but only {} positive eigenvalues; truncated",
                        model.p()
                    ),
                );
            }
            if let Some(path) = save_model {
                let file = File::create(&path)
                    .map_err(|e| CliError::data(format!("{}: cannot create: {e}", path.display())))?;
                model
                    .save(std::io::BufWriter::new(file))
                    .ctx(&path.display().to_string())?;
                meta["model"] = json!(path.display().to_string());
            }
            emit_matrix(&out, &model.embed_training().t().to_owned(), meta)
        }
        Command::OosEmbed {
            model,
            input,
            component,
            out,
        } => {
            let source = model.display().to_string();
            let file = File::open(&model).map_err(|e| CliError::data(format!("{source}: cannot open: {e}")))?;
            let model = EmbeddingModel::load(std::io::BufReader::new(file)).ctx(&source)?;
            if let Some(k) = component {
                if k == 0 {
                    return Err(CliError::usage("--component is 1-based"));
                }
                if k > model.p() {
                    return Err(CliError::from_core(
                        "--component",
                        Error::IndexOutOfRange {
                            index: k,
                            len: model.p(),
                        },
                    ));
                }
            }
            let (xt, table) = read_data(input.as_ref())?;
            let y = model
                .embed_out_of_sample_batch(&xt, Exec::default())
                .ctx(&table.source)?;
            let y = match component {
                Some(k) => y.slice(ndarray::s![.., k - 1..k]).to_owned(),
                None => y,
            };
            let mut meta = base_meta("oos-embed", vec![json!({ "model": source }), data_input_meta(&table)]);
            meta["p"] = json!(model.p());
            meta["component"] = json!(component);
            emit_matrix(&out, &y, meta)
        }
        Command::Nystrom {
            input,
            kernel,
            m,
            strategy,
            seed,
            pinv_threshold,
            out,
        } => {
            let spec = kernel.spec()?;
            let (x, table) = read_data(input.as_ref())?;
            let provider = DataKernel::new(&spec, &x).ctx("kernel parameters")?;
            let landmarks = nystrom::select_landmarks(&provider, m, strategy, seed).ctx("--m")?;
            let model = nystrom::build(&provider, &landmarks, pinv_threshold).ctx(&table.source)?;
            let approx = model.complete();
            let full = gram(&spec, &x).ctx(&table.source)?;
            let err = nystrom::reconstruction_error(&full, &approx).ctx(&table.source)?;
            let mut meta = base_meta("nystrom", vec![data_input_meta(&table)]);
            meta["kernel"] = kernel_meta(&spec, x.d());
            meta["m"] = json!(m);
            meta["strategy"] = json!(strategy.name());
            meta["seed"] = json!(seed);
            meta["pinv_threshold"] = json!(pinv_threshold);
            meta["landmarks"] = json!(model.landmark_indices());
            meta["landmark_rank"] = json!(model.rank());
            meta["reconstruction_error"] = json!(err);
            emit_matrix(&out, approx.values(), meta)
        }
        Command::Hsic {
            x,
            y,
            kernel,
            y_kernel,
            out,
        } => {
            let spec_x = kernel.spec()?;
            let spec_y = build_spec(
                y_kernel.kernel.unwrap_or(kernel.kernel),
                y_kernel
                    .gamma
                    .or(if y_kernel.kernel.is_none() { kernel.gamma } else { None }),
                y_kernel.c.or(if y_kernel.kernel.is_none() { kernel.c } else { None }),
                y_kernel
                    .degree
                    .or(if y_kernel.kernel.is_none() { kernel.degree } else { None }),
            )?;
            let (dx, tx) = read_data(Some(&x))?;
            let (dy, ty) = read_data(Some(&y))?;
            if dx.n() != dy.n() {
                return Err(CliError::data(format!(
                    "{} has {} samples but {} has {}; HSIC needs paired samples",
                    tx.source,
                    dx.n(),
                    ty.source,
                    dy.n()
                )));
            }
            let kx = gram(&spec_x, &dx).ctx(&tx.source)?;
            let ky = gram(&spec_y, &dy).ctx(&ty.source)?;
            let value = hsic(&PairedKernels::new(kx, ky).ctx("paired kernels")?).ctx("hsic")?;
            let mut meta = base_meta("hsic", vec![data_input_meta(&tx), data_input_meta(&ty)]);
            meta["kernel_x"] = kernel_meta(&spec_x, dx.d());
            meta["kernel_y"] = kernel_meta(&spec_y, dy.d());
            meta["normalization"] = json!("(n-1)^2");
            meta["hsic"] = json!(value);
            emit_scalar(&out, "hsic", value, meta)
        }
        Command::Mmd { x, y, kernel, out } => {
            let spec = kernel.spec()?;
            let (dx, tx) = read_data(Some(&x))?;
            let (dy, ty) = read_data(Some(&y))?;
            if dx.d() != dy.d() {
                return Err(CliError::data(format!(
                    "{} has dimension {} but {} has {}",
                    tx.source,
                    dx.d(),
                    ty.source,
                    dy.d()
                )));
            }
            // resolve against the shared dimension so all three blocks use one gamma
            let spec = spec.resolve(dx.d());
            let kxx = gram(&spec, &dx).ctx(&tx.source)?;
            let kyy = gram(&spec, &dy).ctx(&ty.source)?;
            let kxy = gram_between(&spec, &dx, &dy).ctx(&ty.source)?;
            let value = mmd2(kxx.view(), kyy.view(), kxy.view()).ctx("mmd")?;
            let mut meta = base_meta("mmd", vec![data_input_meta(&tx), data_input_meta(&ty)]);
            meta["kernel"] = kernel_meta(&spec, dx.d());
            meta["estimator"] = json!("biased V-statistic");
            meta["unequal_sizes"] = json!(dx.n() != dy.n());
            if dx.n() != dy.n() {
                push_notice(&mut meta, "sample sizes differ; per-block means used");
            }
            meta["mmd2"] = json!(value);
            emit_scalar(&out, "mmd2", value, meta)
        }
        Command::Eig {
            input,
            tol,
            max_sweeps,
            out,
        } => {
            let table = read_table(input.as_deref())?;
            let eig = eigh(table.values.view(), tol, max_sweeps).ctx(&table.source)?;
            let n = eig.n();
            let mut stacked = Array2::zeros((n + 1, n));
            stacked.row_mut(0).assign(&ndarray::ArrayView1::from(eig.eigenvalues()));
            stacked.slice_mut(ndarray::s![1.., ..]).assign(&eig.eigenvectors());
            let json_body = json!({
                "eigenvalues": eig.eigenvalues(),
                "eigenvectors": eig.eigenvectors().columns().into_iter().map(|c| c.to_vec()).collect::<Vec<_>>(),
            });
            let mut meta = base_meta("eig", vec![table.describe()]);
            meta["tolerances"] = json!({ "tol": tol, "max_sweeps": max_sweeps });
            meta["sweeps"] = json!(eig.sweeps());
            meta["residual"] = json!(eig.residual());
            meta["layout"] = json!("csv: first row eigenvalues (descending), then the n x n eigenvector matrix with eigenvectors as columns");
            out.sink().emit(matrix_csv(&stacked), json_body, meta)
        }
    }
}

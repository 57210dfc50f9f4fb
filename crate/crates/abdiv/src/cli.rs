//! The `abdiv` command line.
//!
//! [`parse_args`] turns an argv into a [`RunConfig`], [`RunConfig::to_argv`]
//! renders it back, and [`run`] executes it. [`main_with`] glues the two
//! together and maps failures onto the exit codes in [`exit`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use abdiv_core::kernel::{cpd_check, divergence_gram, gram, probe_hilbertianity_with, psd_check};
use abdiv_core::measure::divergence_measures;
use abdiv_core::sampling::random_density;
use abdiv_core::segmentation::{segment, NeighborMode, Normalization, SegmentationConfig};
use abdiv_core::svm::{Conditioning, SmoConfig};
use abdiv_core::{DiscreteDensity, DivergenceSpec, KernelSpec};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{self, BenchConfig, BenchData, KernelKind};
use crate::datasets::{self, DensityMode, DEFAULT_FEATURE_EPSILON};
use crate::error::{DataError, Result};
use crate::imageio;
use crate::report::{probe_record, push_spectrum, spec_string, KvRecord};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
}

const SPEC_HELP: &str = "\
Divergence: a name, ab:ALPHA,BETA, abs:ALPHA,BETA, dt:T, a bare ALPHA,BETA (ABS) or a bare T (d_t).
Names: euclidean = abs:1,1, v1-hellinger = abs:0.5,1, v2-hellinger = abs:0.5,-1,
hellinger = abs:0.5,0.5, jeffrey = abs:1,0, euclidean-dt = dt:1, hellinger-dt = dt:0.5,
itakura-saito (alias s-itakura-saito) = dt:-0.5, s-euclidean = dt:-1.
Note: dt:-0.5 is the symmetrized Itakura-Saito form 2(1/sqrt(p) - 1/sqrt(q))^2 and is
labelled Itakura-Saito in bench tables.";

const BENCH_HELP: &str = "\
Rows: Euclidean = dt:1, Hellinger = dt:0.5, Itakura-Saito = dt:-0.5, S-Euclidean = dt:-1.
Each row is reported twice: dir (-D as a cpd kernel) and tran (exp(-D / 2 sigma^2)).
Writes <out-dir>/<stem>.txt (table) and <out-dir>/<stem>.kv (key=value records).";

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "abdiv", version, about = "AB/ABS divergences, kernels, SVMs and segmentation", after_long_help = SPEC_HELP)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Evaluate a divergence between two scalars or two densities.
    Div(DivArgs),
    /// Build a Gram matrix and report its spectrum.
    Gram(GramArgs),
    /// Check conditional positive definiteness on random densities.
    Probe(ProbeArgs),
    /// Train and test one SVM with a divergence kernel.
    Svm(SvmArgs),
    /// Threshold neighbour divergences of an RGB image.
    Segment(SegmentArgs),
    /// Regenerate the divergence-kernel error table.
    #[command(after_long_help = BENCH_HELP)]
    Bench(BenchArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
#[command(group(ArgGroup::new("operands").required(true).args(["x", "p"])))]
pub struct DivArgs {
    #[arg(long, value_parser = parse_spec, allow_hyphen_values = true, long_help = SPEC_HELP)]
    pub spec: DivergenceSpec,
    /// First scalar argument.
    #[arg(long, requires = "y", allow_negative_numbers = true, value_parser = parse_finite)]
    pub x: Option<f64>,
    /// Second scalar argument.
    #[arg(long, requires = "x", allow_negative_numbers = true, value_parser = parse_finite)]
    pub y: Option<f64>,
    /// First density, comma-separated values.
    #[arg(long, requires = "q", conflicts_with = "x", value_delimiter = ',', allow_negative_numbers = true, value_parser = parse_finite)]
    pub p: Option<Vec<f64>>,
    /// Second density, comma-separated values.
    #[arg(long, requires = "p", value_delimiter = ',', allow_negative_numbers = true, value_parser = parse_finite)]
    pub q: Option<Vec<f64>>,
    /// Dominating-measure weights (default: all ones).
    #[arg(long, requires = "p", value_delimiter = ',', allow_negative_numbers = true, value_parser = parse_finite)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GramKind {
    /// The divergence matrix itself, checked for conditional positive definiteness.
    Divergence,
    /// Zero-measure-origin kernel.
    Lemma,
    /// exp(-D / 2 sigma^2).
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct GramArgs {
    #[arg(long, value_parser = parse_spec, allow_hyphen_values = true, long_help = SPEC_HELP)]
    pub spec: DivergenceSpec,
    #[arg(long, value_enum, default_value_t = GramKind::Divergence)]
    pub kernel: GramKind,
    /// Gaussian bandwidth, required for --kernel gaussian.
    #[arg(long, value_parser = parse_positive, required_if_eq("kernel", "gaussian"))]
    pub sigma: Option<f64>,
    /// CSV of feature rows (header required); random densities when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DensityArg::Simplex)]
    pub density: DensityArg,
    /// Number of random densities.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Atoms per random density.
    #[arg(long, default_value_t = 8)]
    pub atoms: usize,
    /// RNG seed, required for random densities.
    #[arg(long, required_unless_present = "input")]
    pub seed: Option<u64>,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
    pub tol: f64,
    /// Write the matrix as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ProbeArgs {
    #[arg(long, value_parser = parse_spec, allow_hyphen_values = true, long_help = SPEC_HELP)]
    pub spec: DivergenceSpec,
    /// Densities per trial.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 8)]
    pub atoms: usize,
    #[arg(long)]
    pub seed: u64,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
    pub tol: f64,
    /// Write the per-trial record.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityArg {
    Simplex,
    RawPositive,
}

impl From<DensityArg> for DensityMode {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::Simplex => DensityMode::Simplex,
            DensityArg::RawPositive => DensityMode::RawPositive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditioningArg {
    None,
    Clip,
    Jitter,
}

impl From<ConditioningArg> for Conditioning {
    fn from(c: ConditioningArg) -> Self {
        match c {
            ConditioningArg::None => Conditioning::None,
            ConditioningArg::Clip => Conditioning::Clip,
            ConditioningArg::Jitter => Conditioning::Jitter,
        }
    }
}

/// Dataset selection and the training protocol shared by `svm` and `bench`.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct DataArgs {
    /// `synth`, `cats`, or a path to a CSV file with a label column.
    #[arg(long)]
    pub data: String,
    /// Label column of a CSV dataset.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Label value of the positive class in a CSV dataset.
    #[arg(long, default_value = "1")]
    pub positive: String,
    /// How feature rows become densities.
    #[arg(long, value_enum, default_value_t = DensityArg::Simplex)]
    pub density: DensityArg,
    /// Floor applied to features before normalization.
    #[arg(long, default_value_t = DEFAULT_FEATURE_EPSILON, value_parser = parse_positive)]
    pub epsilon: f64,
    #[arg(long)]
    pub seed: u64,
    /// Penalty grid.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100", value_parser = parse_positive)]
    pub c: Vec<f64>,
    /// Gaussian bandwidth grid.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.5", value_parser = parse_positive)]
    pub sigma: Vec<f64>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0.8, value_parser = parse_fraction)]
    pub train_fraction: f64,
    /// Repair of indefinite Gaussian Grams.
    #[arg(long, value_enum, default_value_t = ConditioningArg::Clip)]
    pub conditioning: ConditioningArg,
    /// SMO stopping tolerance on the KKT gap.
    #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
    pub kkt_tol: f64,
    /// SMO budget, in multiples of the training-set size.
    #[arg(long, default_value_t = 10_000)]
    pub max_passes: usize,
}

impl DataArgs {
    pub fn bench_config(&self) -> BenchConfig {
        let data = match self.data.as_str() {
            "synth" => BenchData::Synth,
            "cats" => BenchData::Cats,
            path => BenchData::Csv {
                path: PathBuf::from(path),
                label_column: self.label_column.clone(),
                positive_label: self.positive.clone(),
            },
        };
        let mut cfg = BenchConfig::new(data, self.seed);
        cfg.density_mode = self.density.into();
        cfg.epsilon = self.epsilon;
        cfg.c_grid = self.c.clone();
        cfg.sigma_grid = self.sigma.clone();
        cfg.folds = self.folds;
        cfg.train_fraction = self.train_fraction;
        cfg.conditioning = self.conditioning.into();
        cfg.smo = SmoConfig {
            kkt_tol: self.kkt_tol,
            max_passes: self.max_passes,
        };
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SvmKernel {
    /// -D as a conditionally positive definite kernel.
    Direct,
    /// exp(-D / 2 sigma^2).
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SvmArgs {
    #[arg(long, value_parser = parse_spec, allow_hyphen_values = true, long_help = SPEC_HELP)]
    pub spec: DivergenceSpec,
    #[arg(long, value_enum, default_value_t = SvmKernel::Gaussian)]
    pub kernel: SvmKernel,
    #[command(flatten)]
    pub data: DataArgs,
    /// Write the key=value record.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Directory for the report files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Report file stem (default: `bench-<data>-<seed>`).
    #[arg(long)]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    /// Channel values 0..255, floored at epsilon.
    Raw,
    /// Channel values divided by 255, floored at epsilon.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Compare the left and upper neighbours.
    Literal,
    /// Compare the pixel with its left and upper neighbours.
    Current,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SegmentArgs {
    #[arg(long, value_parser = parse_spec, allow_hyphen_values = true, long_help = SPEC_HELP)]
    pub spec: DivergenceSpec,
    /// Threshold: pixels whose divergence is below k become foreground.
    #[arg(long, value_parser = parse_finite, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, value_enum)]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Literal)]
    pub mode: ModeArg,
    /// Channel floor (default: 1 for raw, 1e-3 for unit).
    #[arg(long, value_parser = parse_positive)]
    pub epsilon: Option<f64>,
    /// Input image (.ppm or .png).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output image (.ppm or .png).
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `--spec` values. See the `--spec` help for the grammar.
pub fn parse_spec(s: &str) -> std::result::Result<DivergenceSpec, String> {
    let s = s.trim();
    let pair = |body: &str| -> std::result::Result<(f64, f64), String> {
        let (a, b) = body
            .split_once(',')
            .ok_or_else(|| format!("expected ALPHA,BETA in `{s}`"))?;
        Ok((parse_finite(a)?, parse_finite(b)?))
    };
    let spec = if let Some(body) = s.strip_prefix("ab:") {
        let (a, b) = pair(body)?;
        DivergenceSpec::ab(a, b)
    } else if let Some(body) = s.strip_prefix("abs:") {
        let (a, b) = pair(body)?;
        DivergenceSpec::abs(a, b)
    } else if let Some(body) = s.strip_prefix("dt:") {
        DivergenceSpec::dt(parse_finite(body)?)
    } else if s.contains(',') {
        let (a, b) = pair(s)?;
        DivergenceSpec::abs(a, b)
    } else if let Ok(t) = s.parse::<f64>() {
        DivergenceSpec::dt(t)
    } else {
        return named_spec(s);
    };
    spec.map_err(|e| format!("`{s}`: {e}"))
}

fn named_spec(s: &str) -> std::result::Result<DivergenceSpec, String> {
    abdiv_core::measure::named_divergence(s)
        .map(|n| n.spec())
        .map_err(|_| {
            format!("unknown divergence `{s}`; expected a name, ab:A,B, abs:A,B, dt:T, A,B or T")
        })
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be > 0"))
    }
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must lie strictly between 0 and 1"))
    }
}

/// Parses a full argv, program name included.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    RunConfig::try_parse_from(argv)
}

fn value_name<E: ValueEnum>(e: &E) -> String {
    e.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_owned()
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

struct Argv(Vec<String>);

impl Argv {
    fn flag(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.0.push(format!("--{name}"));
        self.0.push(value.to_string());
        self
    }

    fn opt(&mut self, name: &str, value: Option<impl ToString>) -> &mut Self {
        if let Some(v) = value {
            self.flag(name, v);
        }
        self
    }

    fn path(&mut self, name: &str, value: &Path) -> &mut Self {
        self.flag(name, value.display())
    }

    fn data(&mut self, d: &DataArgs) -> &mut Self {
        self.flag("data", &d.data)
            .flag("label-column", &d.label_column)
            .flag("positive", &d.positive)
            .flag("density", value_name(&d.density))
            .flag("epsilon", d.epsilon)
            .flag("seed", d.seed)
            .flag("c", join(&d.c))
            .flag("sigma", join(&d.sigma))
            .flag("folds", d.folds)
            .flag("train-fraction", d.train_fraction)
            .flag("conditioning", value_name(&d.conditioning))
            .flag("kkt-tol", d.kkt_tol)
            .flag("max-passes", d.max_passes)
    }
}

impl RunConfig {
    /// Renders every setting explicitly; `parse_args(cfg.to_argv())` gives
    /// back `cfg`.
    pub fn to_argv(&self) -> Vec<String> {
        let mut a = Argv(vec!["abdiv".into()]);
        match &self.command {
            Command::Div(c) => {
                a.0.push("div".into());
                a.flag("spec", spec_string(&c.spec))
                    .opt("x", c.x)
                    .opt("y", c.y)
                    .opt("p", c.p.as_deref().map(join))
                    .opt("q", c.q.as_deref().map(join))
                    .opt("weights", c.weights.as_deref().map(join));
            }
            Command::Gram(c) => {
                a.0.push("gram".into());
                a.flag("spec", spec_string(&c.spec))
                    .flag("kernel", value_name(&c.kernel))
                    .opt("sigma", c.sigma)
                    .opt("input", c.input.as_ref().map(|p| p.display()))
                    .flag("density", value_name(&c.density))
                    .flag("n", c.n)
                    .flag("atoms", c.atoms)
                    .opt("seed", c.seed)
                    .flag("tol", c.tol)
                    .opt("out", c.out.as_ref().map(|p| p.display()));
            }
            Command::Probe(c) => {
                a.0.push("probe".into());
                a.flag("spec", spec_string(&c.spec))
                    .flag("n", c.n)
                    .flag("trials", c.trials)
                    .flag("atoms", c.atoms)
                    .flag("seed", c.seed)
                    .flag("tol", c.tol)
                    .opt("out", c.out.as_ref().map(|p| p.display()));
            }
            Command::Svm(c) => {
                a.0.push("svm".into());
                a.flag("spec", spec_string(&c.spec))
                    .flag("kernel", value_name(&c.kernel))
                    .data(&c.data)
                    .opt("out", c.out.as_ref().map(|p| p.display()));
            }
            Command::Segment(c) => {
                a.0.push("segment".into());
                a.flag("spec", spec_string(&c.spec))
                    .flag("k", c.k)
                    .flag("norm", value_name(&c.norm))
                    .flag("mode", value_name(&c.mode))
                    .opt("epsilon", c.epsilon)
                    .path("in", &c.input)
                    .path("out", &c.out);
            }
            Command::Bench(c) => {
                a.0.push("bench".into());
                a.data(&c.data)
                    .path("out-dir", &c.out_dir)
                    .opt("stem", c.stem.as_ref());
            }
        }
        a.0
    }
}

/// Text for stdout plus whether every solver converged.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub converged: bool,
}

impl Outcome {
    fn done(stdout: impl Into<String>) -> Self {
        Self {
            stdout: stdout.into(),
            converged: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.converged {
            exit::SUCCESS
        } else {
            exit::NOT_CONVERGED
        }
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| DataError::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Executes a parsed command.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Div(c) => run_div(c),
        Command::Gram(c) => run_gram(c),
        Command::Probe(c) => run_probe(c),
        Command::Svm(c) => run_svm(c),
        Command::Segment(c) => run_segment(c),
        Command::Bench(c) => run_bench(c),
    }
}

fn run_div(c: &DivArgs) -> Result<Outcome> {
    let value = match (c.x, c.y, &c.p, &c.q) {
        (Some(x), Some(y), _, _) => c.spec.eval(x, y)?,
        (_, _, Some(p), Some(q)) => {
            let weights = c.weights.clone().unwrap_or_else(|| vec![1.0; p.len()]);
            let p = DiscreteDensity::new(p.clone(), weights.clone())?;
            let q = DiscreteDensity::new(q.clone(), weights)?;
            divergence_measures(&c.spec, &p, &q)?
        }
        _ => return Err(DataError::Config("div needs --x/--y or --p/--q".into())),
    };
    let mut rec = KvRecord::new();
    rec.push("spec", spec_string(&c.spec)).push("value", value);
    Ok(Outcome::done(rec.to_string()))
}

fn run_gram(c: &GramArgs) -> Result<Outcome> {
    let densities = match (&c.input, c.seed) {
        (Some(path), _) => {
            let raw = datasets::load_csv_dataset(path, None, "")?;
            datasets::to_densities(&raw, c.density.into(), DEFAULT_FEATURE_EPSILON)?
        }
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..c.n)
                .map(|_| random_density(&mut rng, c.atoms))
                .collect()
        }
        (None, None) => return Err(DataError::Config("gram needs --input or --seed".into())),
    };
    let (matrix, report) = match c.kernel {
        GramKind::Divergence => {
            let d = divergence_gram(&c.spec, &densities)?;
            let r = cpd_check(&d, c.tol)?;
            (d, r)
        }
        GramKind::Lemma | GramKind::Gaussian => {
            let spec = match c.sigma.filter(|_| c.kernel == GramKind::Gaussian) {
                Some(sigma) => KernelSpec::gaussian(c.spec, sigma)?,
                None => KernelSpec::lemma(c.spec)?,
            };
            let g = gram(&spec, &densities)?;
            let r = psd_check(&g, c.tol)?;
            (g, r)
        }
    };
    if let Some(out) = &c.out {
        let n = matrix.order();
        let mut csv = String::new();
        for i in 0..n {
            let row: Vec<String> = matrix.row(i).iter().map(f64::to_string).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        write_file(out, csv)?;
    }
    let mut rec = KvRecord::new();
    rec.push("spec", spec_string(&c.spec))
        .push("kernel", value_name(&c.kernel));
    if let Some(s) = c.sigma {
        rec.push("sigma", s);
    }
    push_spectrum(&mut rec, "", &report);
    Ok(Outcome::done(rec.to_string()))
}

fn run_probe(c: &ProbeArgs) -> Result<Outcome> {
    let report = probe_hilbertianity_with(&c.spec, c.n, c.trials, c.seed, c.atoms, c.tol)?;
    let full = probe_record(&report);
    if let Some(out) = &c.out {
        write_file(out, full.to_string())?;
    }
    let mut summary = KvRecord::new();
    for (k, v) in full
        .entries()
        .iter()
        .filter(|(k, _)| !k.starts_with("trial."))
    {
        summary.push(k.clone(), v);
    }
    Ok(Outcome::done(summary.to_string()))
}

fn run_svm(c: &SvmArgs) -> Result<Outcome> {
    let cfg = c.data.bench_config();
    let data = bench::load_data(&cfg)?;
    let kind = match c.kernel {
        SvmKernel::Direct => KernelKind::Direct,
        SvmKernel::Gaussian => KernelKind::Transformed,
    };
    let name = spec_string(&c.spec);
    let (row, model) = bench::evaluate(&cfg, &data, &name, &c.spec, kind)?;
    let mut rec = KvRecord::new();
    rec.push("data", cfg.data.name())
        .push("seed", cfg.seed)
        .push("spec", &name)
        .push("kernel", value_name(&c.kernel))
        .push("C", row.c)
        .push("sigma", row.sigma.map_or("none".into(), |s| s.to_string()))
        .push("cv_error", format!("{:.6}", row.cv_error))
        .push("test_error", format!("{:.6}", row.test_error))
        .push("support_vectors", model.support_indices.len())
        .push("iterations", model.iterations)
        .push("converged", model.converged);
    let text = rec.to_string();
    if let Some(out) = &c.out {
        write_file(out, &text)?;
    }
    Ok(Outcome {
        stdout: text,
        converged: model.converged,
    })
}

fn run_segment(c: &SegmentArgs) -> Result<Outcome> {
    let norm = match c.norm {
        NormArg::Raw => Normalization::Raw,
        NormArg::Unit => Normalization::Unit,
    };
    let mut cfg = SegmentationConfig::new(c.spec, c.k, norm)?;
    cfg.neighbor_mode = match c.mode {
        ModeArg::Literal => NeighborMode::Literal,
        ModeArg::Current => NeighborMode::Current,
    };
    if let Some(eps) = c.epsilon {
        cfg.epsilon = eps;
    }
    let image = imageio::load_image(&c.input)?;
    let mask = segment(&image, &cfg)?;
    imageio::write_image(&mask, &c.out)?;
    let foreground = mask
        .pixels()
        .iter()
        .filter(|&&p| p == cfg.foreground)
        .count();
    let mut rec = KvRecord::new();
    rec.push("spec", spec_string(&c.spec))
        .push("k", c.k)
        .push("width", mask.width())
        .push("height", mask.height())
        .push("foreground", foreground)
        .push("out", c.out.display());
    Ok(Outcome::done(rec.to_string()))
}

fn run_bench(c: &BenchArgs) -> Result<Outcome> {
    let cfg = c.data.bench_config();
    let report = bench::run_bench(&cfg)?;
    let stem = c
        .stem
        .clone()
        .unwrap_or_else(|| format!("bench-{}-{}", cfg.data.name(), cfg.seed));
    let (txt, kv) = report.write(&c.out_dir, &stem)?;
    let mut stdout = report.table();
    stdout.push_str(&format!(
        "\nwrote {}\nwrote {}\n",
        txt.display(),
        kv.display()
    ));
    Ok(Outcome {
        stdout,
        converged: report.all_converged(),
    })
}

/// Parses, runs, prints, and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if !outcome.converged {
                eprintln!("abdiv: the solver hit its iteration budget before converging");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("abdiv: {e}");
            exit::DATA
        }
    }
}

//! Experiment harness: for each divergence, an 80/20 stratified split,
//! cross-validated choice of `C` (and `σ` for the Gaussian transform) on
//! the training part, and the test error of the refitted model.

use std::fs;
use std::path::{Path, PathBuf};

use abdiv_core::kernel::divergence_gram;
use abdiv_core::svm::{
    condition_gram, cross_validate, kernel_from_divergence_gram, solve_dual_smo, stratified_split,
    test_error, Conditioning, CvConfig, SmoConfig,
};
use abdiv_core::{DivergenceSpec, GramMatrix, Label, LabeledDataset, SvmModel};

use crate::datasets::{self, DensityMode, SynthConfig, DEFAULT_FEATURE_EPSILON};
use crate::error::{DataError, Result};
use crate::report::{spec_string, KvRecord, Table};

#[derive(Debug, Clone, PartialEq)]
pub enum BenchData {
    Synth,
    Cats,
    /// Any dense CSV with a label column, e.g. gene-expression profiles.
    Csv {
        path: PathBuf,
        label_column: String,
        positive_label: String,
    },
}

impl BenchData {
    pub fn name(&self) -> &str {
        match self {
            BenchData::Synth => "synth",
            BenchData::Cats => "cats",
            BenchData::Csv { .. } => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub data: BenchData,
    pub seed: u64,
    pub density_mode: DensityMode,
    pub epsilon: f64,
    pub train_fraction: f64,
    pub c_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub folds: usize,
    pub divergences: Vec<(String, DivergenceSpec)>,
    pub smo: SmoConfig,
    pub conditioning: Conditioning,
}

/// The four rows of the `d_t` table: t = 1, 1/2, −1/2, −1.
pub fn default_divergences() -> Vec<(String, DivergenceSpec)> {
    [
        ("Euclidean", 1.0),
        ("Hellinger", 0.5),
        ("Itakura-Saito", -0.5),
        ("S-Euclidean", -1.0),
    ]
    .into_iter()
    .map(|(n, t)| (n.to_owned(), DivergenceSpec::Dt(t)))
    .collect()
}

impl BenchConfig {
    pub fn new(data: BenchData, seed: u64) -> Self {
        Self {
            data,
            seed,
            density_mode: DensityMode::Simplex,
            epsilon: DEFAULT_FEATURE_EPSILON,
            train_fraction: 0.8,
            c_grid: vec![1.0, 10.0, 100.0],
            sigma_grid: vec![0.5, 1.5],
            folds: 5,
            divergences: default_divergences(),
            smo: SmoConfig::default(),
            conditioning: Conditioning::Clip,
        }
    }
}

/// Loads the configured dataset as labelled densities.
pub fn load_data(cfg: &BenchConfig) -> Result<LabeledDataset> {
    match &cfg.data {
        BenchData::Synth => datasets::synth_two_class(&SynthConfig::default(), cfg.seed),
        BenchData::Cats => datasets::to_labeled(&datasets::cats()?, cfg.density_mode, cfg.epsilon),
        BenchData::Csv {
            path,
            label_column,
            positive_label,
        } => {
            let raw = datasets::load_csv_dataset(path, Some(label_column), positive_label)?;
            datasets::to_labeled(&raw, cfg.density_mode, cfg.epsilon)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `−D` as a conditionally positive definite kernel.
    Direct,
    /// `exp(−D / 2σ²)`.
    Transformed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub spec: DivergenceSpec,
    pub kind: KernelKind,
    pub test_error: f64,
    pub cv_error: f64,
    pub c: f64,
    pub sigma: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub data: String,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, name: &str, kind: KernelKind) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.name == name && r.kind == kind)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn table(&self) -> String {
        let mut t = Table::new(["divergence", "kernel", "error", "C", "sigma"]);
        for r in &self.rows {
            t.row([
                r.name.clone(),
                match r.kind {
                    KernelKind::Direct => "dir".into(),
                    KernelKind::Transformed => "tran".into(),
                },
                format!("{:.4}", r.test_error),
                format!("{}", r.c),
                r.sigma.map_or("-".into(), |s| format!("{s}")),
            ]);
        }
        format!(
            "data: {}  seed: {}  train: {}  test: {}\n\n{}",
            self.data, self.seed, self.n_train, self.n_test, t
        )
    }

    pub fn record(&self) -> KvRecord {
        let mut rec = KvRecord::new();
        rec.push("data", &self.data)
            .push("seed", self.seed)
            .push("n_train", self.n_train)
            .push("n_test", self.n_test);
        for (i, r) in self.rows.iter().enumerate() {
            let p = format!("row.{i}.");
            rec.push(format!("{p}name"), &r.name)
                .push(format!("{p}spec"), spec_string(&r.spec))
                .push(
                    format!("{p}kernel"),
                    match r.kind {
                        KernelKind::Direct => "direct",
                        KernelKind::Transformed => "gaussian",
                    },
                )
                .push(format!("{p}test_error"), format!("{:.6}", r.test_error))
                .push(format!("{p}cv_error"), format!("{:.6}", r.cv_error))
                .push(format!("{p}C"), r.c)
                .push(
                    format!("{p}sigma"),
                    r.sigma.map_or("none".into(), |s| s.to_string()),
                )
                .push(format!("{p}converged"), r.converged);
        }
        rec
    }

    /// Writes `<stem>.txt` (table) and `<stem>.kv` (records) into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|source| DataError::Io {
            path: dir.to_owned(),
            source,
        })?;
        let txt = dir.join(format!("{stem}.txt"));
        let kv = dir.join(format!("{stem}.kv"));
        fs::write(&txt, self.table()).map_err(|source| DataError::Io {
            path: txt.clone(),
            source,
        })?;
        fs::write(&kv, self.record().to_string()).map_err(|source| DataError::Io {
            path: kv.clone(),
            source,
        })?;
        Ok((txt, kv))
    }
}

/// Runs every configured divergence with both kernel kinds.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let data = load_data(cfg)?;
    run_bench_on(cfg, &data)
}

pub fn run_bench_on(cfg: &BenchConfig, data: &LabeledDataset) -> Result<BenchReport> {
    if cfg.divergences.is_empty() {
        return Err(DataError::Config(
            "the divergence list must be nonempty".into(),
        ));
    }
    let split = Split::new(cfg, data)?;
    let mut rows = Vec::new();
    for (name, spec) in &cfg.divergences {
        let d_all = divergence_gram(spec, data.densities())?;
        for kind in [KernelKind::Direct, KernelKind::Transformed] {
            rows.push(split.fit(cfg, &d_all, name, spec, kind)?.0);
        }
    }
    Ok(BenchReport {
        data: cfg.data.name().to_owned(),
        seed: cfg.seed,
        n_train: split.train.len(),
        n_test: split.test.len(),
        rows,
    })
}

/// One divergence and kernel kind: the bench row and the refitted model.
pub fn evaluate(
    cfg: &BenchConfig,
    data: &LabeledDataset,
    name: &str,
    spec: &DivergenceSpec,
    kind: KernelKind,
) -> Result<(BenchRow, SvmModel)> {
    let split = Split::new(cfg, data)?;
    let d_all = divergence_gram(spec, data.densities())?;
    split.fit(cfg, &d_all, name, spec, kind)
}

struct Split {
    train: Vec<usize>,
    test: Vec<usize>,
    train_labels: Vec<Label>,
    test_labels: Vec<Label>,
}

impl Split {
    fn new(cfg: &BenchConfig, data: &LabeledDataset) -> Result<Self> {
        if cfg.c_grid.is_empty() || cfg.sigma_grid.is_empty() {
            return Err(DataError::Config(
                "the C and sigma grids must be nonempty".into(),
            ));
        }
        let (train, test) = stratified_split(data.labels(), cfg.train_fraction, cfg.seed)?;
        if test.is_empty() {
            return Err(DataError::Config("the split leaves no test samples".into()));
        }
        let train_labels = train.iter().map(|&i| data.labels()[i]).collect();
        let test_labels = test.iter().map(|&i| data.labels()[i]).collect();
        Ok(Self {
            train,
            test,
            train_labels,
            test_labels,
        })
    }

    fn fit(
        &self,
        cfg: &BenchConfig,
        d_all: &GramMatrix,
        name: &str,
        spec: &DivergenceSpec,
        kind: KernelKind,
    ) -> Result<(BenchRow, SvmModel)> {
        let sigma_grid = match kind {
            KernelKind::Direct => vec![None],
            KernelKind::Transformed => cfg.sigma_grid.iter().copied().map(Some).collect(),
        };
        let cv_cfg = CvConfig {
            c_grid: cfg.c_grid.clone(),
            sigma_grid,
            folds: cfg.folds,
            seed: cfg.seed,
            smo: cfg.smo,
            conditioning: cfg.conditioning,
        };
        let cv = cross_validate(&d_all.submatrix(&self.train), &self.train_labels, &cv_cfg)?;
        let k_all = kernel_from_divergence_gram(d_all, cv.best.sigma, Conditioning::None)?;
        let mut k_train = k_all.submatrix(&self.train);
        if cv.best.sigma.is_some() {
            k_train = condition_gram(&k_train, cfg.conditioning)?;
        }
        let model = solve_dual_smo(&k_train, &self.train_labels, cv.best.c, &cfg.smo)?;
        let err = test_error(
            &model,
            &k_all.cross_block(&self.test, &self.train),
            &self.test_labels,
        )?;
        let row = BenchRow {
            name: name.to_owned(),
            spec: *spec,
            kind,
            test_error: err,
            cv_error: cv.best.mean_error,
            c: cv.best.c,
            sigma: cv.best.sigma,
            converged: model.converged,
        };
        Ok((row, model))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use abdiv_core::DiscreteDensity;

    fn toy() -> LabeledDataset {
        let mut densities = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let s = 0.01 * i as f64;
            let positive = i % 2 == 0;
            let v = if positive {
                vec![0.7 - s, 0.3 + s]
            } else {
                vec![0.2 + s, 0.8 - s]
            };
            densities.push(DiscreteDensity::with_unit_weights(v).unwrap());
            labels.push(if positive {
                Label::Positive
            } else {
                Label::Negative
            });
        }
        LabeledDataset::new(densities, labels).unwrap()
    }

    #[test]
    fn separable_toy_table() {
        let mut cfg = BenchConfig::new(BenchData::Synth, 3);
        cfg.folds = 2;
        let report = run_bench_on(&cfg, &toy()).unwrap();
        assert_eq!((report.n_train, report.n_test), (16, 4));
        assert_eq!(report.rows.len(), 8);
        assert!(report.all_converged());
        let row = report.row("Hellinger", KernelKind::Transformed).unwrap();
        assert_eq!(row.test_error, 0.0);
        assert!(row.sigma.is_some());
        assert_eq!(
            report.row("Hellinger", KernelKind::Direct).unwrap().sigma,
            None
        );

        let table = report.table();
        assert!(table.starts_with("data: synth  seed: 3  train: 16  test: 4\n"));
        assert!(table
            .lines()
            .any(|l| l.starts_with("Itakura-Saito") && l.contains(" tran ")));
        let rec = report.record();
        assert_eq!(rec.get("row.2.spec"), Some("dt:0.5"));
        assert_eq!(rec.get("row.3.kernel"), Some("gaussian"));
    }

    #[test]
    fn single_evaluation_matches_the_table_row() {
        let mut cfg = BenchConfig::new(BenchData::Synth, 5);
        cfg.folds = 2;
        let data = toy();
        let report = run_bench_on(&cfg, &data).unwrap();
        let (row, model) = evaluate(
            &cfg,
            &data,
            "Euclidean",
            &DivergenceSpec::Dt(1.0),
            KernelKind::Transformed,
        )
        .unwrap();
        assert_eq!(
            &row,
            report.row("Euclidean", KernelKind::Transformed).unwrap()
        );
        assert_eq!(model.penalty, row.c);
    }

    #[test]
    fn empty_grids_rejected() {
        let mut cfg = BenchConfig::new(BenchData::Synth, 1);
        cfg.sigma_grid.clear();
        assert!(matches!(
            run_bench_on(&cfg, &toy()),
            Err(DataError::Config(_))
        ));
        cfg = BenchConfig::new(BenchData::Synth, 1);
        cfg.divergences.clear();
        assert!(matches!(
            run_bench_on(&cfg, &toy()),
            Err(DataError::Config(_))
        ));
    }
}

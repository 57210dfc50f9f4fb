//! Tabular data, conversion to densities and the synthetic generator.
//!
//! The cats table (sex, body weight in kg, heart weight in g for 144 adult
//! cats) ships inside the binary; [`DATA_DIR_ENV`] points the loaders at a
//! directory holding replacement or additional files.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use abdiv_core::measure::DiscreteDensity;
use abdiv_core::{Label, LabeledDataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};

/// Environment variable overriding the data directory.
pub const DATA_DIR_ENV: &str = "ABDIV_DATA_DIR";

/// Bundled cats table.
pub const CATS_CSV: &str = include_str!("../data/cats.csv");

/// Frozen generator parameters.
pub const SYNTH_TOML: &str = include_str!("../data/synth.toml");

/// Default floor for [`to_densities`].
pub const DEFAULT_FEATURE_EPSILON: f64 = 1e-9;

/// Dense feature matrix with optional binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Option<Vec<Label>>,
    pub column_names: Vec<String>,
}

impl RawDataset {
    pub fn rows(&self) -> usize {
        self.features.len()
    }

    pub fn cols(&self) -> usize {
        self.column_names.len()
    }
}

/// Reads a CSV file with a header row. See [`parse_csv_dataset`].
pub fn load_csv_dataset(
    path: &Path,
    label_column: Option<&str>,
    positive_label: &str,
) -> Result<RawDataset> {
    let bytes = fs::read(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_csv_dataset(&bytes, label_column, positive_label)
}

/// Parses CSV bytes. Every column except `label_column` is a feature;
/// label cells equal to `positive_label` map to +1, all others to −1.
pub fn parse_csv_dataset(
    bytes: &[u8],
    label_column: Option<&str>,
    positive_label: &str,
) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let header = reader.headers().map_err(csv_error)?.clone();
    let label_idx = match label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| DataError::MissingLabelColumn(name.to_owned()))?,
        ),
        None => None,
    };
    let column_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_idx)
        .map(|(_, h)| h.trim().to_owned())
        .collect();
    if column_names.is_empty() {
        return Err(DataError::NoFeatures);
    }

    let mut features = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(column_names.len());
        let mut feature_col = 0;
        for (i, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if Some(i) == label_idx {
                let label = if cell == positive_label {
                    Label::Positive
                } else {
                    Label::Negative
                };
                labels.as_mut().expect("label column present").push(label);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(DataError::NotNumeric {
                        line,
                        column: column_names[feature_col].clone(),
                        value: cell.to_owned(),
                    })
                }
            }
            feature_col += 1;
        }
        features.push(row);
    }
    if features.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(RawDataset {
        features,
        labels,
        column_names,
    })
}

fn csv_error(e: csv::Error) -> DataError {
    match e.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => DataError::Ragged {
            line: pos.as_ref().map_or(0, |p| p.line()),
            expected: *expected_len,
            found: *len,
        },
        _ => DataError::Csv(e.to_string()),
    }
}

/// The cats table with females as the positive class, read from
/// `$ABDIV_DATA_DIR/cats.csv` when present, else the bundled copy.
pub fn cats() -> Result<RawDataset> {
    match data_dir()
        .map(|d| d.join("cats.csv"))
        .filter(|p| p.is_file())
    {
        Some(path) => load_csv_dataset(&path, Some("Sex"), "F"),
        None => parse_csv_dataset(CATS_CSV.as_bytes(), Some("Sex"), "F"),
    }
}

/// Value of [`DATA_DIR_ENV`], if set and nonempty.
pub fn data_dir() -> Option<PathBuf> {
    env::var_os(DATA_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// How a feature row becomes a measure over its columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityMode {
    /// Floor at ε, then divide by the row sum.
    #[default]
    Simplex,
    /// Floor at ε and keep the mass.
    RawPositive,
}

/// Converts every row to a density with unit weights.
pub fn to_densities(
    data: &RawDataset,
    mode: DensityMode,
    epsilon: f64,
) -> Result<Vec<DiscreteDensity>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(DataError::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    data.features
        .iter()
        .enumerate()
        .map(|(row, values)| {
            if let Some((column, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(DataError::NegativeFeature { row, column, value });
            }
            let floored: Vec<f64> = values.iter().map(|v| v.max(epsilon)).collect();
            let values = match mode {
                DensityMode::Simplex => {
                    if values.iter().sum::<f64>() == 0.0 {
                        return Err(DataError::ZeroRow { row });
                    }
                    let total: f64 = floored.iter().sum();
                    floored.into_iter().map(|v| v / total).collect()
                }
                DensityMode::RawPositive => floored,
            };
            Ok(DiscreteDensity::with_unit_weights(values)?)
        })
        .collect()
}

/// Densities plus labels, ready for the SVM.
pub fn to_labeled(data: &RawDataset, mode: DensityMode, epsilon: f64) -> Result<LabeledDataset> {
    let labels = data.labels.clone().ok_or(DataError::Unlabeled)?;
    Ok(LabeledDataset::new(
        to_densities(data, mode, epsilon)?,
        labels,
    )?)
}

/// Parameters of [`synth_two_class`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_per_class: usize,
    pub atoms: usize,
    pub concentration_a: Vec<f64>,
    pub concentration_b: Vec<f64>,
}

impl Default for SynthConfig {
    /// The frozen parameters of `data/synth.toml`.
    fn default() -> Self {
        toml::from_str(SYNTH_TOML).expect("bundled synth.toml is valid")
    }
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| DataError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms < 2 {
            return Err(DataError::Config(format!(
                "atoms must be at least 2, got {}",
                self.atoms
            )));
        }
        if self.n_per_class == 0 {
            return Err(DataError::Config("n_per_class must be positive".into()));
        }
        for (name, conc) in [
            ("concentration_a", &self.concentration_a),
            ("concentration_b", &self.concentration_b),
        ] {
            if conc.len() != self.atoms {
                return Err(DataError::Config(format!(
                    "{name} has {} entries, expected {}",
                    conc.len(),
                    self.atoms
                )));
            }
            if let Some(bad) = conc.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
                return Err(DataError::Config(format!(
                    "{name} contains non-positive value {bad}"
                )));
            }
        }
        Ok(())
    }
}

/// Normalized Gamma histograms: `n_per_class` positives drawn with
/// `concentration_a`, then as many negatives with `concentration_b`.
pub fn synth_two_class(cfg: &SynthConfig, seed: u64) -> Result<LabeledDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut densities = Vec::with_capacity(2 * cfg.n_per_class);
    let mut labels = Vec::with_capacity(2 * cfg.n_per_class);
    for (label, conc) in [
        (Label::Positive, &cfg.concentration_a),
        (Label::Negative, &cfg.concentration_b),
    ] {
        let gammas: Vec<Gamma<f64>> = conc
            .iter()
            .map(|&k| Gamma::new(k, 1.0).expect("validated shape"))
            .collect();
        for _ in 0..cfg.n_per_class {
            let mut draw: Vec<f64> = gammas
                .iter()
                .map(|g| g.sample(&mut rng).max(f64::MIN_POSITIVE))
                .collect();
            let total: f64 = draw.iter().sum();
            draw.iter_mut().for_each(|v| *v /= total);
            densities.push(DiscreteDensity::with_unit_weights(draw)?);
            labels.push(label);
        }
    }
    Ok(LabeledDataset::new(densities, labels)?)
}

//! Soft-margin binary SVM on precomputed Gram matrices.
//!
//! The dual
//!
//! ```text
//! max  Σ αᵢ − ½ Σᵢⱼ αᵢ αⱼ yᵢ yⱼ Kᵢⱼ   s.t.  0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! is solved by sequential minimal optimization, picking the maximal
//! violating pair at every step. Only differences `Kᵢᵢ + Kⱼⱼ − 2Kᵢⱼ` and
//! gradient differences drive the updates, so a conditionally positive
//! definite Gram such as `−D` trains the same classifier as any pd kernel
//! differing from it by `g(x) + g(y)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{gaussian_transform, GramMatrix, GramSource, KernelSpec};
use crate::linalg::symmetric_eigen;
use crate::math;
use crate::measure::DiscreteDensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    /// `sign(score)` with `sign(0) = +1`.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidParameter {
                name: "label",
                value: other as f64,
            }),
        }
    }
}

/// Densities with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    densities: Vec<DiscreteDensity>,
    labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(densities: Vec<DiscreteDensity>, labels: Vec<Label>) -> Result<Self> {
        if densities.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: densities.len(),
                found: labels.len(),
            });
        }
        if densities.len() < 2 {
            return Err(Error::EmptyInput);
        }
        Ok(Self { densities, labels })
    }

    pub fn densities(&self) -> &[DiscreteDensity] {
        &self.densities
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `(negatives, positives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        class_counts(&self.labels)
    }

    /// Samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.densities[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}

fn class_counts(labels: &[Label]) -> (usize, usize) {
    let pos = labels.iter().filter(|&&l| l == Label::Positive).count();
    (labels.len() - pos, pos)
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    pub train_labels: Vec<Label>,
    pub penalty: f64,
    pub kernel: Option<KernelSpec>,
    /// False when the iteration budget ran out before the KKT gap closed.
    pub converged: bool,
    pub iterations: usize,
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    /// Stop once the maximal KKT violation gap is at most this.
    pub kkt_tol: f64,
    /// Budget of `max_passes × n` pair updates.
    pub max_passes: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self {
            kkt_tol: 1e-3,
            max_passes: 10_000,
        }
    }
}

const TAU: f64 = 1e-12;

/// Trains on the Gram matrix `g` with labels `labels` and penalty `c`.
pub fn solve_dual_smo(
    g: &GramMatrix,
    labels: &[Label],
    c: f64,
    cfg: &SmoConfig,
) -> Result<SvmModel> {
    let n = g.order();
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "C",
            value: c,
        });
    }
    if cfg.kkt_tol.is_nan() || cfg.kkt_tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "kkt_tol",
            value: cfg.kkt_tol,
        });
    }
    let (neg, pos) = class_counts(labels);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    if let Some(index) = g.entries().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }

    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * g.get(i, j);
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − Σα
    let mut grad = vec![-1.0; n];
    let budget = cfg.max_passes.saturating_mul(n).max(1);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < budget {
        let Some((i, j, gap)) = select_pair(&alpha, &grad, &y, c) else {
            converged = true;
            break;
        };
        if gap <= cfg.kkt_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (qii, qjj, qij) = (q(i, i), q(j, j), q(i, j));
        if y[i] != y[j] {
            let mut quad = qii + qjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = qii + qjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, gk) in grad.iter_mut().enumerate() {
            *gk += q(k, i) * di + q(k, j) * dj;
        }
    }

    let bias = -rho(&alpha, &grad, &y, c);
    let support_indices = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .map(|(i, _)| i)
        .collect();
    let kernel = match g.source() {
        GramSource::Kernel(k) => Some(k),
        _ => None,
    };
    Ok(SvmModel {
        dual_coeffs: alpha,
        bias,
        support_indices,
        train_labels: labels.to_vec(),
        penalty: c,
        kernel,
        converged,
        iterations,
    })
}

fn in_up(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Maximal violating pair `(i, j, m − M)`.
fn select_pair(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> Option<(usize, usize, f64)> {
    let mut up: Option<(usize, f64)> = None;
    let mut low: Option<(usize, f64)> = None;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        if in_up(alpha[t], y[t], c) && up.is_none_or(|(_, m)| v > m) {
            up = Some((t, v));
        }
        if in_low(alpha[t], y[t], c) && low.is_none_or(|(_, m)| v < m) {
            low = Some((t, v));
        }
    }
    let ((i, m), (j, mm)) = (up?, low?);
    Some((i, j, m - mm))
}

/// Offset `ρ` with `f(x) = Σ αᵢ yᵢ K(xᵢ, x) − ρ`: mean of `yᵢ ∇ᵢ` over free
/// vectors, else the midpoint of the feasible interval.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    }
}

/// `Σ αᵢ − ½ Σᵢⱼ αᵢ αⱼ yᵢ yⱼ Kᵢⱼ`.
pub fn dual_objective(g: &GramMatrix, labels: &[Label], alpha: &[f64]) -> f64 {
    let n = g.order();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        let yi = labels[i].sign();
        for j in 0..n {
            quad += alpha[i] * alpha[j] * yi * labels[j].sign() * g.get(i, j);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Largest KKT violation of `model` on its own training Gram: `1 − yf` at
/// `α = 0`, `yf − 1` at `α = C`, `|yf − 1|` in between.
pub fn kkt_residual(model: &SvmModel, g: &GramMatrix) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..g.order() {
        let yf = model.train_labels[i].sign() * decision_function(model, g.row(i))?;
        let a = model.dual_coeffs[i];
        let v = if a <= 0.0 {
            1.0 - yf
        } else if a >= model.penalty {
            yf - 1.0
        } else {
            (yf - 1.0).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}

/// `f(x) = Σ αᵢ yᵢ K(xᵢ, x) + b` from the kernel row `K(xᵢ, x)`.
pub fn decision_function(model: &SvmModel, kernel_row: &[f64]) -> Result<f64> {
    if kernel_row.len() != model.dual_coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: model.dual_coeffs.len(),
            found: kernel_row.len(),
        });
    }
    let mut f = model.bias;
    for &i in &model.support_indices {
        f += model.dual_coeffs[i] * model.train_labels[i].sign() * kernel_row[i];
    }
    Ok(f)
}

/// Predicted label, with `sign(0) = +1`.
pub fn predict(model: &SvmModel, kernel_row: &[f64]) -> Result<Label> {
    decision_function(model, kernel_row).map(Label::from_score)
}

/// Fraction of `rows` whose prediction differs from `labels`.
pub fn test_error(model: &SvmModel, rows: &[Vec<f64>], labels: &[Label]) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let mut wrong = 0usize;
    for (row, &label) in rows.iter().zip(labels) {
        if predict(model, row)? != label {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / rows.len() as f64)
}

/// Repair applied to a Gram matrix before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    #[default]
    None,
    /// Zero out negative eigenvalues.
    Clip,
    /// Add `(max(0, −λ_min) + 1e-10) I`.
    Jitter,
}

pub fn condition_gram(g: &GramMatrix, mode: Conditioning) -> Result<GramMatrix> {
    if let Some(index) = g.entries().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let n = g.order();
    match mode {
        Conditioning::None => Ok(g.clone()),
        Conditioning::Clip => {
            let eig = symmetric_eigen(g.entries(), n);
            if eig.min() >= 0.0 {
                return Ok(g.clone());
            }
            GramMatrix::from_entries(n, eig.reassemble(|l| l.max(0.0)), g.source())
        }
        Conditioning::Jitter => {
            let eig = symmetric_eigen(g.entries(), n);
            let delta = (-eig.min()).max(0.0) + 1e-10;
            let mut entries = g.entries().to_vec();
            for i in 0..n {
                entries[i * n + i] += delta;
            }
            GramMatrix::from_entries(n, entries, g.source())
        }
    }
}

fn check_fraction(f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "train_fraction",
            value: f,
        })
    }
}

/// Stratified shuffle split of indices `0..labels.len()`: each class is
/// shuffled and `round(fraction · n_class)` of it goes to training. Both
/// index lists come back sorted.
pub fn stratified_split(
    labels: &[Label],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    check_fraction(train_fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Label::Negative, Label::Positive] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = math::round(train_fraction * idx.len() as f64) as usize;
        if k == 0 {
            return Err(Error::EmptyClass {
                label: class.as_i8(),
            });
        }
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn train_test_split(
    data: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, Vec<DiscreteDensity>, Vec<Label>)> {
    let (train, test) = stratified_split(data.labels(), train_fraction, seed)?;
    Ok((
        data.subset(&train)?,
        test.iter().map(|&i| data.densities[i].clone()).collect(),
        test.iter().map(|&i| data.labels[i]).collect(),
    ))
}

/// Stratified `k`-fold assignment. Every training complement must hold
/// both classes.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "folds",
            value: k as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for class in [Label::Negative, Label::Positive] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for (f, fold) in folds.iter_mut().enumerate() {
        fold.sort_unstable();
        let (neg_in, pos_in) = class_counts(&fold.iter().map(|&i| labels[i]).collect::<Vec<_>>());
        let (neg, pos) = class_counts(labels);
        if fold.is_empty() || neg_in == neg || pos_in == pos {
            return Err(Error::DegenerateFold { fold: f });
        }
    }
    Ok(folds)
}

/// One evaluated grid point; `sigma = None` is the direct `−D` kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvPoint {
    pub c: f64,
    pub sigma: Option<f64>,
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub grid: Vec<CvPoint>,
    pub best: CvPoint,
    /// Fold trainings that hit the iteration budget.
    pub nonconverged: usize,
}

/// Grid and fold settings for [`cross_validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub c_grid: Vec<f64>,
    /// `None` entries use `−D` directly; `Some(σ)` the Gaussian transform.
    pub sigma_grid: Vec<Option<f64>>,
    pub folds: usize,
    pub seed: u64,
    pub smo: SmoConfig,
    /// Applied to Gaussian Grams; the direct `−D` Gram is never conditioned.
    pub conditioning: Conditioning,
}

impl CvConfig {
    pub fn new(c_grid: Vec<f64>, sigma_grid: Vec<Option<f64>>, seed: u64) -> Self {
        Self {
            c_grid,
            sigma_grid,
            folds: 5,
            seed,
            smo: SmoConfig::default(),
            conditioning: Conditioning::Clip,
        }
    }
}

/// Kernel Gram from a divergence matrix: `−D` or `exp(−D / 2σ²)`.
pub fn kernel_from_divergence_gram(
    d: &GramMatrix,
    sigma: Option<f64>,
    conditioning: Conditioning,
) -> Result<GramMatrix> {
    let source = match (d.source(), sigma) {
        (GramSource::Divergence(base), None) => GramSource::Kernel(KernelSpec::cpd(base)?),
        (GramSource::Divergence(base), Some(s)) => {
            GramSource::Kernel(KernelSpec::gaussian(base, s)?)
        }
        _ => GramSource::Custom,
    };
    match sigma {
        None => Ok(d.map(source, |v| -v)),
        Some(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    value: s,
                });
            }
            condition_gram(&d.map(source, |v| gaussian_transform(v, s)), conditioning)
        }
    }
}

/// Mean held-out error of every `(C, σ)` pair over stratified folds of the
/// divergence matrix `d`. Ties go to the smaller `C`, then the smaller `σ`
/// (with the direct kernel smallest).
pub fn cross_validate(d: &GramMatrix, labels: &[Label], cfg: &CvConfig) -> Result<CvReport> {
    if cfg.c_grid.is_empty() || cfg.sigma_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if labels.len() != d.order() {
        return Err(Error::LengthMismatch {
            expected: d.order(),
            found: labels.len(),
        });
    }
    let folds = stratified_folds(labels, cfg.folds, cfg.seed)?;
    let splits: Vec<(Vec<usize>, Vec<usize>)> = folds
        .iter()
        .map(|held| {
            let train = (0..labels.len())
                .filter(|i| held.binary_search(i).is_err())
                .collect();
            (train, held.clone())
        })
        .collect();

    let mut grid = Vec::new();
    let mut nonconverged = 0;
    for &sigma in &cfg.sigma_grid {
        let k = kernel_from_divergence_gram(d, sigma, cfg.conditioning)?;
        for &c in &cfg.c_grid {
            let mut total = 0.0;
            for (train, held) in &splits {
                let train_labels: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
                let model = solve_dual_smo(&k.submatrix(train), &train_labels, c, &cfg.smo)?;
                if !model.converged {
                    nonconverged += 1;
                }
                let rows = k.cross_block(held, train);
                let held_labels: Vec<Label> = held.iter().map(|&i| labels[i]).collect();
                total += test_error(&model, &rows, &held_labels)?;
            }
            grid.push(CvPoint {
                c,
                sigma,
                mean_error: total / splits.len() as f64,
            });
        }
    }
    let best = *grid
        .iter()
        .min_by(|a, b| {
            a.mean_error
                .total_cmp(&b.mean_error)
                .then(a.c.total_cmp(&b.c))
                .then(
                    a.sigma
                        .unwrap_or(f64::NEG_INFINITY)
                        .total_cmp(&b.sigma.unwrap_or(f64::NEG_INFINITY)),
                )
        })
        .expect("grid is nonempty");
    Ok(CvReport {
        grid,
        best,
        nonconverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn custom(n: usize, e: Vec<f64>) -> GramMatrix {
        GramMatrix::from_entries(n, e, GramSource::Custom).unwrap()
    }

    #[test]
    fn two_sample_closed_form() {
        let g = custom(2, vec![1.0, 0.0, 0.0, 1.0]);
        let labels = [Label::Positive, Label::Negative];
        let m = solve_dual_smo(&g, &labels, 10.0, &SmoConfig::default()).unwrap();
        assert!(m.converged);
        assert_eq!(m.dual_coeffs, vec![1.0, 1.0]);
        assert_eq!(m.bias, 0.0);
        assert_eq!(decision_function(&m, g.row(0)).unwrap(), 1.0);
        assert_eq!(decision_function(&m, g.row(1)).unwrap(), -1.0);
        assert_eq!(m.support_indices, vec![0, 1]);
    }

    #[test]
    fn single_class_rejected() {
        let g = custom(2, vec![1.0, 0.0, 0.0, 1.0]);
        let err =
            solve_dual_smo(&g, &[Label::Positive; 2], 1.0, &SmoConfig::default()).unwrap_err();
        assert_eq!(err, Error::SingleClass);
    }

    #[test]
    fn decision_examples() {
        let m = SvmModel {
            dual_coeffs: vec![0.0, 0.0],
            bias: 0.3,
            support_indices: vec![],
            train_labels: vec![Label::Positive, Label::Negative],
            penalty: 1.0,
            kernel: None,
            converged: true,
            iterations: 0,
        };
        assert_eq!(decision_function(&m, &[0.0, 0.0]).unwrap(), 0.3);
        assert_eq!(decision_function(&m, &[5.0, -2.0]).unwrap(), 0.3);
        assert!(decision_function(&m, &[0.0]).is_err());
        let zero = SvmModel {
            bias: 0.0,
            ..m.clone()
        };
        assert_eq!(predict(&zero, &[0.0, 0.0]).unwrap(), Label::Positive);
        let rows = vec![vec![0.0, 0.0]; 8];
        let mut labels = vec![Label::Positive; 8];
        assert_eq!(test_error(&m, &rows, &labels).unwrap(), 0.0);
        labels[3] = Label::Negative;
        assert_eq!(test_error(&m, &rows, &labels).unwrap(), 0.125);
        assert_eq!(test_error(&m, &rows, &[Label::Negative; 8]).unwrap(), 1.0);
        assert!(test_error(&m, &[], &[]).is_err());
    }

    #[test]
    fn conditioning_examples() {
        let g = custom(2, vec![1.0, 2.0, 2.0, 1.0]);
        let clipped = condition_gram(&g, Conditioning::Clip).unwrap();
        for v in clipped.entries() {
            assert!((v - 1.5).abs() < 1e-12);
        }
        let jittered = condition_gram(&g, Conditioning::Jitter).unwrap();
        assert!((jittered.get(0, 0) - 2.0).abs() < 1e-9);
        assert_eq!(jittered.get(0, 1), 2.0);
        assert!(symmetric_eigen(jittered.entries(), 2).min().abs() < 1e-9);
        let psd = custom(2, vec![2.0, 1.0, 1.0, 2.0]);
        assert_eq!(condition_gram(&psd, Conditioning::Clip).unwrap(), psd);
        assert_eq!(condition_gram(&g, Conditioning::None).unwrap(), g);
    }

    #[test]
    fn split_examples() {
        let labels: Vec<Label> = (0..10)
            .map(|i| {
                if i < 5 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let (train, test) = stratified_split(&labels, 0.8, 1).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let pos = train
            .iter()
            .filter(|&&i| labels[i] == Label::Positive)
            .count();
        assert_eq!(pos, 4);
        assert_eq!(stratified_split(&labels, 0.8, 1).unwrap(), (train, test));
        let four = [
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Negative,
        ];
        let (train, test) = stratified_split(&four, 0.5, 9).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(test.len(), 2);
        assert_eq!(
            class_counts(&train.iter().map(|&i| four[i]).collect::<Vec<_>>()),
            (1, 1)
        );
        assert!(stratified_split(&four, 1.0, 9).is_err());
        assert!(matches!(
            stratified_split(&four, 0.1, 9),
            Err(Error::EmptyClass { .. })
        ));
    }

    #[test]
    fn folds_partition_indices() {
        let labels: Vec<Label> = (0..23)
            .map(|i| {
                if i % 3 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let folds = stratified_folds(&labels, 5, 4).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert!(stratified_folds(&labels, 1, 4).is_err());
        assert!(matches!(
            stratified_folds(&labels, 40, 4),
            Err(Error::DegenerateFold { .. })
        ));
    }

    #[test]
    fn singleton_grid_and_determinism() {
        // four points on a line, two per class
        let xs = [0.0, 1.0, 5.0, 6.0, 0.5, 5.5, 0.2, 5.2, 0.8, 5.8];
        let labels: Vec<Label> = xs
            .iter()
            .map(|&x| {
                if x < 3.0 {
                    Label::Negative
                } else {
                    Label::Positive
                }
            })
            .collect();
        let n = xs.len();
        let d = custom(
            n,
            (0..n * n)
                .map(|k| (xs[k / n] - xs[k % n]) * (xs[k / n] - xs[k % n]))
                .collect(),
        );
        let mut cfg = CvConfig::new(vec![10.0], vec![None], 3);
        cfg.folds = 2;
        let r = cross_validate(&d, &labels, &cfg).unwrap();
        assert_eq!(r.best.c, 10.0);
        assert_eq!(r.best.sigma, None);
        assert_eq!(r, cross_validate(&d, &labels, &cfg).unwrap());
        cfg.c_grid = vec![100.0, 1.0, 10.0];
        cfg.sigma_grid = vec![Some(1.5), None, Some(0.5)];
        let r = cross_validate(&d, &labels, &cfg).unwrap();
        assert_eq!(r.grid.len(), 9);
        let worst = r.grid.iter().map(|p| p.mean_error).fold(0.0, f64::max);
        assert!(r.best.mean_error <= worst);
        // every point separates perfectly, so the tie rule picks C = 1, direct
        assert_eq!(r.best.mean_error, 0.0);
        assert_eq!((r.best.c, r.best.sigma), (1.0, None));
    }
}

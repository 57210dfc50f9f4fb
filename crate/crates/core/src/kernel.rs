//! Kernels built from divergences, Gram matrices and spectral checks.
//!
//! Three ways to turn a symmetric divergence `D` into a kernel:
//!
//! * [`KernelMode::NegDivergenceCpd`]: `K = −D`, conditionally positive
//!   definite whenever `D` is the square of a Hilbertian metric;
//! * [`KernelMode::LemmaPd`]: `K(P, Q) = ½(−D(P, Q) + D(P, 0) + D(Q, 0))`
//!   with the zero measure as origin, replaced by a closed form when
//!   `D(·, 0)` diverges;
//! * [`KernelMode::Gaussian`]: `K = exp(−D / 2σ²)`.
//!
//! [`psd_check`] and [`cpd_check`] verify the resulting matrices through a
//! full symmetric eigendecomposition.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::divergence::{branch_select, DivergenceBranch, DivergenceSpec, DEFAULT_EPS_PARAM};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::math;
use crate::measure::{divergence_measures, DiscreteDensity};
use crate::sampling::{random_density, DEFAULT_ATOMS};

/// Default eigenvalue tolerance for [`psd_check`] / [`cpd_check`].
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// How a divergence becomes a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMode {
    NegDivergenceCpd,
    LemmaPd,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub base: DivergenceSpec,
    pub mode: KernelMode,
}

impl KernelSpec {
    pub fn new(base: DivergenceSpec, mode: KernelMode) -> Result<Self> {
        if let KernelMode::Gaussian { sigma } = mode {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    value: sigma,
                });
            }
        }
        if !base.is_symmetric() {
            return Err(Error::UnsupportedSpec(
                "kernels need a symmetric divergence (ABS or DT)",
            ));
        }
        Ok(Self { base, mode })
    }

    pub fn cpd(base: DivergenceSpec) -> Result<Self> {
        Self::new(base, KernelMode::NegDivergenceCpd)
    }

    pub fn lemma(base: DivergenceSpec) -> Result<Self> {
        Self::new(base, KernelMode::LemmaPd)
    }

    pub fn gaussian(base: DivergenceSpec, sigma: f64) -> Result<Self> {
        Self::new(base, KernelMode::Gaussian { sigma })
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.mode {
            KernelMode::Gaussian { sigma } => Some(sigma),
            _ => None,
        }
    }

    /// `K(P, Q)` for this spec.
    pub fn eval(&self, p: &DiscreteDensity, q: &DiscreteDensity) -> Result<f64> {
        match self.mode {
            KernelMode::NegDivergenceCpd => divergence_measures(&self.base, p, q).map(|d| -d),
            KernelMode::LemmaPd => kernel_from_divergence(&self.base, p, q),
            KernelMode::Gaussian { sigma } => gaussian_kernel(&self.base, sigma, p, q),
        }
    }
}

/// `½(−D(P, Q) + D(P, 0) + D(Q, 0))`, or the closed-form kernel when the
/// divergence to the zero measure is infinite.
pub fn kernel_from_divergence(
    spec: &DivergenceSpec,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    if !spec.is_symmetric() {
        return Err(Error::UnsupportedSpec(
            "kernels need a symmetric divergence (ABS or DT)",
        ));
    }
    if spec.regular_at_zero(DEFAULT_EPS_PARAM) {
        lemma_kernel(spec, p, q)
    } else {
        closed_form_kernel(spec, p, q)
    }
}

/// The zero-origin construction, valid when `D(·, 0)` is finite.
pub fn lemma_kernel(
    spec: &DivergenceSpec,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    if !spec.regular_at_zero(DEFAULT_EPS_PARAM) {
        return Err(Error::UnsupportedSpec(
            "divergence to the zero measure is infinite",
        ));
    }
    let dpq = divergence_measures(spec, p, q)?;
    let dp0 = divergence_measures(spec, p, &p.zero_like())?;
    let dq0 = divergence_measures(spec, q, &q.zero_like())?;
    Ok(0.5 * (-dpq + dp0 + dq0))
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEFAULT_EPS_PARAM
}

/// Closed-form kernels:
///
/// | spec | `K(P, Q)` |
/// |------|-----------|
/// | ABS(1/2, 1) | `Σ (q√p + p√q) μ` |
/// | ABS(t, t), t ≠ 0 | `t⁻² Σ pᵗ qᵗ μ` (covers ABS(1,1) and ABS(1/2,1/2)) |
/// | ABS(1, 0) | `½ Σ ((q − p) ln(p/q) − p − q) μ` |
/// | DT t ≠ 0 | `(2t²)⁻¹ Σ pᵗ qᵗ μ` |
///
/// Anything else is [`Error::UnsupportedSpec`].
pub fn closed_form_kernel(
    spec: &DivergenceSpec,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    enum Form {
        Power { t: f64, scale: f64 },
        V1Hellinger,
        Jeffreys,
    }
    let form = match *spec {
        DivergenceSpec::Ab(_) => {
            return Err(Error::UnsupportedSpec(
                "kernels need a symmetric divergence (ABS or DT)",
            ))
        }
        DivergenceSpec::Dt(t) if t.abs() > DEFAULT_EPS_PARAM => Form::Power {
            t,
            scale: 0.5 / (t * t),
        },
        DivergenceSpec::Dt(_) => {
            return Err(Error::UnsupportedSpec("no closed-form kernel for t = 0"))
        }
        DivergenceSpec::Abs(pp) => {
            let (a, b) = (pp.alpha(), pp.beta());
            match branch_select(pp, DEFAULT_EPS_PARAM) {
                DivergenceBranch::Generic if near(a, b) => Form::Power {
                    t: a,
                    scale: 1.0 / (a * a),
                },
                DivergenceBranch::Generic if near(a, 0.5) && near(b, 1.0) => Form::V1Hellinger,
                DivergenceBranch::Generic if near(a, 1.0) && near(b, 0.5) => Form::V1Hellinger,
                DivergenceBranch::AlphaOnly if near(a, 1.0) => Form::Jeffreys,
                DivergenceBranch::BetaOnly if near(b, 1.0) => Form::Jeffreys,
                _ => {
                    return Err(Error::UnsupportedSpec(
                        "no closed-form kernel for this ABS member",
                    ))
                }
            }
        }
    };
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if let Some(index) = p
        .weights()
        .iter()
        .zip(q.weights())
        .position(|(a, b)| a != b)
    {
        return Err(Error::WeightMismatch { index });
    }
    let mut total = 0.0;
    for (index, ((&x, &y), &w)) in p
        .values()
        .iter()
        .zip(q.values())
        .zip(p.weights())
        .enumerate()
    {
        let term = match form {
            Form::Power { t, scale } => {
                if t < 0.0 && (x == 0.0 || y == 0.0) {
                    return Err(Error::SingularAtom { index });
                }
                scale * math::powf(x, t) * math::powf(y, t)
            }
            Form::V1Hellinger => y * math::sqrt(x) + x * math::sqrt(y),
            Form::Jeffreys => {
                if x == 0.0 || y == 0.0 {
                    return Err(Error::SingularAtom { index });
                }
                0.5 * ((y - x) * (math::ln(x) - math::ln(y)) - x - y)
            }
        };
        total += w * term;
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Range {
            term: "kernel",
            exponent: f64::NAN,
        })
    }
}

/// `exp(−D(P, Q) / 2σ²)`.
pub fn gaussian_kernel(
    spec: &DivergenceSpec,
    sigma: f64,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
        });
    }
    let d = divergence_measures(spec, p, q)?;
    Ok(gaussian_transform(d, sigma))
}

/// `exp(−d / 2σ²)` for a precomputed divergence value.
pub fn gaussian_transform(d: f64, sigma: f64) -> f64 {
    math::exp(-d / (2.0 * sigma * sigma))
}

/// What a [`GramMatrix`] holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GramSource {
    Kernel(KernelSpec),
    Divergence(DivergenceSpec),
    Custom,
}

/// Symmetric `n × n` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    order: usize,
    entries: Vec<f64>,
    source: GramSource,
}

impl GramMatrix {
    /// Wraps row-major `entries`, requiring exact symmetry.
    pub fn from_entries(order: usize, entries: Vec<f64>, source: GramSource) -> Result<Self> {
        if entries.len() != order * order {
            return Err(Error::LengthMismatch {
                expected: order * order,
                found: entries.len(),
            });
        }
        for i in 0..order {
            for j in i + 1..order {
                let (a, b) = (entries[i * order + j], entries[j * order + i]);
                if a != b && !(a.is_nan() && b.is_nan()) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self {
            order,
            entries,
            source,
        })
    }

    /// Builds a matrix from a symmetric element function, evaluating each
    /// unordered pair once.
    pub fn from_fn(
        order: usize,
        source: GramSource,
        mut f: impl FnMut(usize, usize) -> Result<f64>,
    ) -> Result<Self> {
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            for j in i..order {
                let v = f(i, j).map_err(|e| Error::AtPair {
                    row: i,
                    col: j,
                    source: Box::new(e),
                })?;
                entries[i * order + j] = v;
                entries[j * order + i] = v;
            }
        }
        Ok(Self {
            order,
            entries,
            source,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn source(&self) -> GramSource {
        self.source
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    /// Principal submatrix on `rows`.
    pub fn submatrix(&self, rows: &[usize]) -> Self {
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for &i in rows {
            for &j in rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            order: m,
            entries,
            source: self.source,
        }
    }

    /// Rectangular block `K[rows][cols]`, one inner vector per row.
    pub fn cross_block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// Applies `f` entrywise, keeping symmetry.
    pub fn map(&self, source: GramSource, f: impl Fn(f64) -> f64) -> Self {
        Self {
            order: self.order,
            entries: self.entries.iter().map(|&v| f(v)).collect(),
            source,
        }
    }

    fn check_finite(&self) -> Result<()> {
        match self.entries.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }
}

/// Gram matrix of `spec` over `data`.
pub fn gram(spec: &KernelSpec, data: &[DiscreteDensity]) -> Result<GramMatrix> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    if spec.mode == KernelMode::LemmaPd && spec.base.regular_at_zero(DEFAULT_EPS_PARAM) {
        let self_terms = data
            .iter()
            .enumerate()
            .map(|(i, p)| {
                divergence_measures(&spec.base, p, &p.zero_like()).map_err(|e| Error::AtPair {
                    row: i,
                    col: i,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        return GramMatrix::from_fn(data.len(), GramSource::Kernel(*spec), |i, j| {
            let d = if i == j {
                0.0
            } else {
                divergence_measures(&spec.base, &data[i], &data[j])?
            };
            Ok(0.5 * (-d + self_terms[i] + self_terms[j]))
        });
    }
    GramMatrix::from_fn(data.len(), GramSource::Kernel(*spec), |i, j| {
        spec.eval(&data[i], &data[j])
    })
}

/// Matrix of pairwise divergences `D(P_i, P_j)`.
pub fn divergence_gram(spec: &DivergenceSpec, data: &[DiscreteDensity]) -> Result<GramMatrix> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !spec.is_symmetric() {
        return Err(Error::UnsupportedSpec(
            "divergence matrices need a symmetric divergence (ABS or DT)",
        ));
    }
    GramMatrix::from_fn(data.len(), GramSource::Divergence(*spec), |i, j| {
        if i == j {
            Ok(0.0)
        } else {
            divergence_measures(spec, &data[i], &data[j])
        }
    })
}

/// Pd kernel from a divergence matrix with data point `origin` as the
/// origin: `K_ij = −D_ij + D_io + D_oj − D_oo`.
pub fn lemma_gram(d: &GramMatrix, origin: usize) -> Result<GramMatrix> {
    if origin >= d.order {
        return Err(Error::LengthMismatch {
            expected: d.order,
            found: origin,
        });
    }
    let o = origin;
    let doo = d.get(o, o);
    GramMatrix::from_fn(d.order, GramSource::Custom, |i, j| {
        Ok(-d.get(i, j) + d.get(i, o) + d.get(o, j) - doo)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Psd,
    Indefinite,
}

/// Extreme eigenvalues and the resulting verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    pub min_eig: f64,
    pub max_eig: f64,
    pub order: usize,
    pub centered: bool,
    pub verdict: Verdict,
    pub tol: f64,
}

impl SpectrumReport {
    fn from_eigs(min_eig: f64, max_eig: f64, order: usize, centered: bool, tol: f64) -> Self {
        let verdict = if min_eig >= -tol * max_eig.abs().max(1.0) {
            Verdict::Psd
        } else {
            Verdict::Indefinite
        };
        Self {
            min_eig,
            max_eig,
            order,
            centered,
            verdict,
            tol,
        }
    }

    /// `λ_min / max(1, |λ_max|)`.
    pub fn relative_min(&self) -> f64 {
        self.min_eig / self.max_eig.abs().max(1.0)
    }

    pub fn is_psd(&self) -> bool {
        self.verdict == Verdict::Psd
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
        })
    }
}

/// Eigenvalue check of a kernel Gram matrix.
pub fn psd_check(g: &GramMatrix, tol: f64) -> Result<SpectrumReport> {
    check_tol(tol)?;
    g.check_finite()?;
    if g.order == 0 {
        return Err(Error::EmptyInput);
    }
    let eig = symmetric_eigen(&g.entries, g.order);
    Ok(SpectrumReport::from_eigs(
        eig.min(),
        eig.max(),
        g.order,
        false,
        tol,
    ))
}

/// Checks that `−D` is conditionally positive definite: the spectrum of
/// `J(−D)J`, with `J = I − 11ᵀ/n`, must be nonnegative.
pub fn cpd_check(d: &GramMatrix, tol: f64) -> Result<SpectrumReport> {
    check_tol(tol)?;
    d.check_finite()?;
    let n = d.order;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let scale = d.entries.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        let v = d.get(i, i);
        if v.abs() > tol * scale {
            return Err(Error::NonZeroDiagonal { index: i, value: v });
        }
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).iter().sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut centered = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            // symmetric D: column means equal row means
            let v = -(d.get(i, j) - row_means[i] - row_means[j] + grand);
            centered[i * n + j] = v;
            centered[j * n + i] = v;
        }
    }
    let eig = symmetric_eigen(&centered, n);
    Ok(SpectrumReport::from_eigs(
        eig.min(),
        eig.max(),
        n,
        true,
        tol,
    ))
}

/// All per-trial reports of a [`probe_hilbertianity`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub spec: DivergenceSpec,
    pub n: usize,
    pub atoms: usize,
    pub seed: u64,
    pub reports: Vec<SpectrumReport>,
    /// Most negative `λ_min / max(1, |λ_max|)` over all trials.
    pub worst_relative_eig: f64,
}

impl ProbeReport {
    pub fn all_psd(&self) -> bool {
        self.reports.iter().all(SpectrumReport::is_psd)
    }

    pub fn indefinite_count(&self) -> usize {
        self.reports.iter().filter(|r| !r.is_psd()).count()
    }
}

/// Randomized search for indefinite centred divergence matrices.
///
/// Each trial draws `n` densities over [`DEFAULT_ATOMS`] atoms from
/// [`random_density`] and runs [`cpd_check`] at [`DEFAULT_EIG_TOL`].
pub fn probe_hilbertianity(
    spec: &DivergenceSpec,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    probe_hilbertianity_with(spec, n, trials, seed, DEFAULT_ATOMS, DEFAULT_EIG_TOL)
}

pub fn probe_hilbertianity_with(
    spec: &DivergenceSpec,
    n: usize,
    trials: usize,
    seed: u64,
    atoms: usize,
    tol: f64,
) -> Result<ProbeReport> {
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
        });
    }
    if atoms == 0 {
        return Err(Error::InvalidParameter {
            name: "atoms",
            value: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(trials);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let data: Vec<DiscreteDensity> = (0..n).map(|_| random_density(&mut rng, atoms)).collect();
        let report = cpd_check(&divergence_gram(spec, &data)?, tol)?;
        worst = worst.min(report.relative_min());
        reports.push(report);
    }
    Ok(ProbeReport {
        spec: *spec,
        n,
        atoms,
        seed,
        reports,
        worst_relative_eig: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pq() -> (DiscreteDensity, DiscreteDensity) {
        (
            DiscreteDensity::with_unit_weights(vec![0.5, 0.5]).unwrap(),
            DiscreteDensity::with_unit_weights(vec![0.25, 0.75]).unwrap(),
        )
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lemma_examples() {
        let (p, q) = pq();
        let hell = DivergenceSpec::abs(0.5, 0.5).unwrap();
        assert!(close(
            kernel_from_divergence(&hell, &p, &q).unwrap(),
            3.8637033051562731,
            1e-14
        ));
        assert!(close(
            kernel_from_divergence(&hell, &p, &p).unwrap(),
            4.0,
            1e-14
        ));
        let euc = DivergenceSpec::abs(1.0, 1.0).unwrap();
        assert!(close(
            kernel_from_divergence(&euc, &p, &q).unwrap(),
            0.5,
            1e-14
        ));
        let dt1 = DivergenceSpec::dt(1.0).unwrap();
        assert!(close(
            kernel_from_divergence(&dt1, &p, &q).unwrap(),
            0.25,
            1e-14
        ));
    }

    #[test]
    fn closed_forms_agree_with_lemma() {
        let (p, q) = pq();
        for spec in [
            DivergenceSpec::abs(1.0, 1.0).unwrap(),
            DivergenceSpec::abs(0.5, 1.0).unwrap(),
            DivergenceSpec::abs(0.5, 0.5).unwrap(),
            DivergenceSpec::dt(0.5).unwrap(),
            DivergenceSpec::dt(2.0).unwrap(),
        ] {
            let a = lemma_kernel(&spec, &p, &q).unwrap();
            let b = closed_form_kernel(&spec, &p, &q).unwrap();
            assert!(close(a, b, 1e-13), "{spec:?}: {a} vs {b}");
        }
    }

    #[test]
    fn singular_specs_use_closed_forms() {
        let (p, q) = pq();
        let s_euc = DivergenceSpec::dt(-1.0).unwrap();
        // (1/2) Σ 1/(pq) = 0.5 (1/0.125 + 1/0.375)
        let expected = 0.5 * (8.0 + 1.0 / 0.375);
        assert!(close(
            kernel_from_divergence(&s_euc, &p, &q).unwrap(),
            expected,
            1e-14
        ));
        let jeffreys = DivergenceSpec::abs(1.0, 0.0).unwrap();
        let expected = 0.5 * ((0.25 - 0.5) * (2.0f64).ln() - 0.75)
            + 0.5 * ((0.75 - 0.5) * (0.5f64 / 0.75).ln() - 1.25);
        assert!(close(
            kernel_from_divergence(&jeffreys, &p, &q).unwrap(),
            expected,
            1e-14
        ));
        let v2 = DivergenceSpec::abs(0.5, -1.0).unwrap();
        assert!(matches!(
            kernel_from_divergence(&v2, &p, &q),
            Err(Error::UnsupportedSpec(_))
        ));
        let ab = DivergenceSpec::ab(1.0, 1.0).unwrap();
        assert!(matches!(
            kernel_from_divergence(&ab, &p, &q),
            Err(Error::UnsupportedSpec(_))
        ));
        assert!(KernelSpec::lemma(ab).is_err());
    }

    #[test]
    fn gaussian_examples() {
        let (p, q) = pq();
        let euc = DivergenceSpec::abs(1.0, 1.0).unwrap();
        assert!(close(
            gaussian_kernel(&euc, 0.5, &p, &q).unwrap(),
            0.7788007830714049,
            1e-15
        ));
        assert_eq!(gaussian_kernel(&euc, 0.5, &p, &p).unwrap(), 1.0);
        assert!(gaussian_kernel(&euc, 1e6, &p, &q).unwrap() > 1.0 - 1e-12);
        assert!(gaussian_kernel(&euc, 0.0, &p, &q).is_err());
        assert!(KernelSpec::gaussian(euc, -1.0).is_err());
    }

    #[test]
    fn gram_examples() {
        let (p, q) = pq();
        let euc = DivergenceSpec::abs(1.0, 1.0).unwrap();
        let g = gram(&KernelSpec::lemma(euc).unwrap(), &[p.clone(), q.clone()]).unwrap();
        let expected = [0.5, 0.5, 0.5, 0.625];
        for (a, b) in g.entries().iter().zip(expected) {
            assert!(close(*a, b, 1e-14));
        }
        let one = gram(&KernelSpec::lemma(euc).unwrap(), core::slice::from_ref(&p)).unwrap();
        assert_eq!(one.order(), 1);
        let ones = gram(
            &KernelSpec::gaussian(euc, 1.0).unwrap(),
            &[q.clone(), q.clone(), q],
        )
        .unwrap();
        assert!(ones.entries().iter().all(|&v| v == 1.0));
        assert!(gram(&KernelSpec::lemma(euc).unwrap(), &[]).is_err());
    }

    #[test]
    fn gram_errors_carry_location() {
        let p = DiscreteDensity::with_unit_weights(vec![0.5, 0.5]).unwrap();
        let z = DiscreteDensity::with_unit_weights(vec![0.0, 1.0]).unwrap();
        let hell_dt = DivergenceSpec::dt(-0.5).unwrap();
        let err = divergence_gram(&hell_dt, &[p, z]).unwrap_err();
        assert!(matches!(err, Error::AtPair { row: 0, col: 1, .. }));
    }

    #[test]
    fn spectral_examples() {
        let id = GramMatrix::from_entries(2, vec![1.0, 0.0, 0.0, 1.0], GramSource::Custom).unwrap();
        let r = psd_check(&id, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Psd);
        assert!((r.min_eig - 1.0).abs() < 1e-15);
        let bad =
            GramMatrix::from_entries(2, vec![1.0, 2.0, 2.0, 1.0], GramSource::Custom).unwrap();
        let r = psd_check(&bad, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Indefinite);
        assert!((r.min_eig + 1.0).abs() < 1e-14);
        let zero = GramMatrix::from_entries(3, vec![0.0; 9], GramSource::Custom).unwrap();
        assert!(cpd_check(&zero, DEFAULT_EIG_TOL).unwrap().is_psd());
        assert!(GramMatrix::from_entries(2, vec![0.0, 1.0, 2.0, 0.0], GramSource::Custom).is_err());
        let diag =
            GramMatrix::from_entries(2, vec![1.0, 0.0, 0.0, 0.0], GramSource::Custom).unwrap();
        assert!(matches!(
            cpd_check(&diag, DEFAULT_EIG_TOL),
            Err(Error::NonZeroDiagonal { index: 0, .. })
        ));
        let nan = GramMatrix::from_entries(1, vec![f64::NAN], GramSource::Custom).unwrap();
        assert!(psd_check(&nan, DEFAULT_EIG_TOL).is_err());
    }

    #[test]
    fn scalar_euclidean_is_cpd() {
        let data: Vec<_> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&x| DiscreteDensity::with_unit_weights(vec![x]).unwrap())
            .collect();
        let d = divergence_gram(&DivergenceSpec::abs(1.0, 1.0).unwrap(), &data).unwrap();
        assert!(cpd_check(&d, DEFAULT_EIG_TOL).unwrap().is_psd());
        assert!(psd_check(&lemma_gram(&d, 0).unwrap(), DEFAULT_EIG_TOL)
            .unwrap()
            .is_psd());
    }

    #[test]
    fn probe_is_deterministic() {
        let spec = DivergenceSpec::abs(1.0, 1.0).unwrap();
        let a = probe_hilbertianity(&spec, 6, 3, 11).unwrap();
        let b = probe_hilbertianity(&spec, 6, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.all_psd());
        assert!(probe_hilbertianity(&spec, 2, 3, 11).is_err());
    }
}

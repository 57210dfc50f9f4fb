//! Divergences between discrete measures.
//!
//! A measure is stored as a density `p_i = dP/dμ` over a fixed set of
//! atoms together with the weights `μ_i` of the dominating measure. A
//! scalar divergence `d` lifts to measures as `D(P, Q) = Σ_i μ_i d(p_i, q_i)`.
//! When `d` is 1-homogeneous the lifted value does not depend on the choice
//! of μ; [`change_dominating_measure`] rewrites a density against another μ
//! so that this can be checked directly.

use alloc::borrow::ToOwned;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::divergence::{DivergenceSpec, EvalConfig, ParameterPair};
use crate::error::{Error, Result};
use crate::math;

/// Tolerance on `Σ v_i μ_i = 1` for the normalized flag.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Default floor used by [`DiscreteDensity::smoothed`].
pub const DEFAULT_SMOOTHING: f64 = 1e-9;

/// Density values over shared atoms plus dominating-measure weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDensity {
    values: Vec<f64>,
    weights: Vec<f64>,
    normalized: bool,
}

/// Checks `values` / `weights` and builds a density.
pub fn validate_density(values: Vec<f64>, weights: Vec<f64>) -> Result<DiscreteDensity> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: weights.len(),
        });
    }
    for (index, (&v, &w)) in values.iter().zip(&weights).enumerate() {
        if !v.is_finite() || !w.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if v < 0.0 {
            return Err(Error::NegativeValue { index, value: v });
        }
        if w <= 0.0 {
            return Err(Error::NonPositiveWeight { index, value: w });
        }
    }
    let mass: f64 = values.iter().zip(&weights).map(|(v, w)| v * w).sum();
    let normalized = (mass - 1.0).abs() <= NORMALIZATION_TOL;
    Ok(DiscreteDensity {
        values,
        weights,
        normalized,
    })
}

impl DiscreteDensity {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        validate_density(values, weights)
    }

    /// Density with respect to the counting measure.
    pub fn with_unit_weights(values: Vec<f64>) -> Result<Self> {
        let weights = alloc::vec![1.0; values.len()];
        validate_density(values, weights)
    }

    /// The zero measure on the same atoms.
    pub fn zero_like(&self) -> Self {
        Self {
            values: alloc::vec![0.0; self.values.len()],
            weights: self.weights.clone(),
            normalized: false,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether `Σ v_i μ_i = 1` within [`NORMALIZATION_TOL`].
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Total mass `Σ v_i μ_i`.
    pub fn mass(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Floors every value at `epsilon`, optionally rescaling back to unit mass.
    pub fn smoothed(&self, epsilon: f64, renormalize: bool) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
            });
        }
        let mut values: Vec<f64> = self.values.iter().map(|&v| v.max(epsilon)).collect();
        if renormalize {
            let mass: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
            values.iter_mut().for_each(|v| *v /= mass);
        }
        validate_density(values, self.weights.clone())
    }

    /// Atomwise mixture `(P + Q)/2` on the shared dominating measure.
    pub fn midpoint(&self, other: &Self) -> Result<Self> {
        check_compatible(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(p, q)| 0.5 * (p + q))
            .collect();
        validate_density(values, self.weights.clone())
    }

    /// Multiplies the measure by `c > 0` (density values scale, weights stay).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
            });
        }
        validate_density(
            self.values.iter().map(|v| v * c).collect(),
            self.weights.clone(),
        )
    }

    /// Concatenates the atoms of two densities.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        validate_density(values, weights)
    }
}

/// Rewrites `p` against the dominating measure `new_weights`:
/// `v'_i = v_i μ_i / ν_i`, which represents the same measure.
pub fn change_dominating_measure(
    p: &DiscreteDensity,
    new_weights: &[f64],
) -> Result<DiscreteDensity> {
    if new_weights.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: new_weights.len(),
        });
    }
    if let Some((index, &value)) = new_weights
        .iter()
        .enumerate()
        .find(|(_, w)| w.is_nan() || **w <= 0.0)
    {
        return Err(Error::NonPositiveWeight { index, value });
    }
    let values = p
        .values
        .iter()
        .zip(&p.weights)
        .zip(new_weights)
        .map(|((v, w), nw)| v * w / nw)
        .collect();
    validate_density(values, new_weights.to_owned())
}

fn check_compatible(p: &DiscreteDensity, q: &DiscreteDensity) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    match p.weights.iter().zip(&q.weights).position(|(a, b)| a != b) {
        Some(index) => Err(Error::WeightMismatch { index }),
        None => Ok(()),
    }
}

/// `D(P, Q) = Σ_i μ_i d(p_i, q_i)`.
///
/// Zero density values are accepted only where the scalar divergence is
/// regular at zero; otherwise a [`Error::SingularAtom`] names the atom.
pub fn divergence_measures(
    spec: &DivergenceSpec,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    divergence_measures_with(spec, p, q, &EvalConfig::default())
}

pub fn divergence_measures_with(
    spec: &DivergenceSpec,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
    cfg: &EvalConfig,
) -> Result<f64> {
    check_compatible(p, q)?;
    let mut total = 0.0;
    for (index, ((&pv, &qv), &w)) in p.values.iter().zip(&q.values).zip(&p.weights).enumerate() {
        match spec.eval_nonneg(pv, qv, cfg)? {
            Some(d) => total += w * d,
            None => return Err(Error::SingularAtom { index }),
        }
    }
    Ok(total)
}

/// Type-2 symmetrization `½[D_AB(P, M) + D_AB(Q, M)]` with `M = (P + Q)/2`.
pub fn symmetrize_type2(
    params: ParameterPair,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    let spec = DivergenceSpec::Ab(params);
    let m = p.midpoint(q)?;
    Ok(0.5 * (divergence_measures(&spec, p, &m)? + divergence_measures(&spec, q, &m)?))
}

/// Type-1 symmetrization lifted to measures, `½[D_AB(P, Q) + D_AB(Q, P)]`.
pub fn symmetrize_type1_measures(
    params: ParameterPair,
    p: &DiscreteDensity,
    q: &DiscreteDensity,
) -> Result<f64> {
    let spec = DivergenceSpec::Ab(params);
    Ok(0.5 * (divergence_measures(&spec, p, q)? + divergence_measures(&spec, q, p)?))
}

/// Divergences with a conventional name and a closed form.
///
/// The `d_t` names follow the defining formula: `t = 1/2` is the Hellinger
/// form `2(√p − √q)²` and `t = −1/2` the symmetrized Itakura-Saito form
/// `2(1/√p − 1/√q)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedDivergence {
    /// ABS(1, 1): `(p − q)²`.
    Euclidean,
    /// ABS(1/2, 1): `2(√p − √q)(p − q)`.
    V1Hellinger,
    /// ABS(1/2, −1): `2(√p − √q)(p − q)/(pq)`.
    V2Hellinger,
    /// ABS(1/2, 1/2): `4(√p − √q)²`.
    Hellinger,
    /// ABS(1, 0): `(p − q) ln(p/q)`.
    Jeffrey,
    /// d_t, t = 1: `½(p − q)²`.
    EuclideanDt,
    /// d_t, t = 1/2: `2(√p − √q)²`.
    HellingerDt,
    /// d_t, t = −1/2: `2(1/√p − 1/√q)²`.
    SItakuraSaito,
    /// d_t, t = −1: `½(1/p − 1/q)²`.
    SEuclidean,
}

impl NamedDivergence {
    pub const ALL: [NamedDivergence; 9] = [
        Self::Euclidean,
        Self::V1Hellinger,
        Self::V2Hellinger,
        Self::Hellinger,
        Self::Jeffrey,
        Self::EuclideanDt,
        Self::HellingerDt,
        Self::SItakuraSaito,
        Self::SEuclidean,
    ];

    pub fn spec(self) -> DivergenceSpec {
        let abs = |a, b| DivergenceSpec::Abs(ParameterPair::new(a, b).expect("finite constants"));
        match self {
            Self::Euclidean => abs(1.0, 1.0),
            Self::V1Hellinger => abs(0.5, 1.0),
            Self::V2Hellinger => abs(0.5, -1.0),
            Self::Hellinger => abs(0.5, 0.5),
            Self::Jeffrey => abs(1.0, 0.0),
            Self::EuclideanDt => DivergenceSpec::Dt(1.0),
            Self::HellingerDt => DivergenceSpec::Dt(0.5),
            Self::SItakuraSaito => DivergenceSpec::Dt(-0.5),
            Self::SEuclidean => DivergenceSpec::Dt(-1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::V1Hellinger => "v1-hellinger",
            Self::V2Hellinger => "v2-hellinger",
            Self::Hellinger => "hellinger",
            Self::Jeffrey => "jeffrey",
            Self::EuclideanDt => "euclidean-dt",
            Self::HellingerDt => "hellinger-dt",
            Self::SItakuraSaito => "s-itakura-saito",
            Self::SEuclidean => "s-euclidean",
        }
    }

    /// Per-atom closed form `φ(p, q)`.
    pub fn closed_form(self, p: f64, q: f64) -> f64 {
        match self {
            Self::Euclidean => (p - q) * (p - q),
            Self::V1Hellinger => 2.0 * (math::sqrt(p) - math::sqrt(q)) * (p - q),
            Self::V2Hellinger => 2.0 * (math::sqrt(p) - math::sqrt(q)) * (p - q) / (p * q),
            Self::Hellinger => {
                let d = math::sqrt(p) - math::sqrt(q);
                4.0 * d * d
            }
            Self::Jeffrey => (p - q) * math::ln(p / q),
            Self::EuclideanDt => 0.5 * (p - q) * (p - q),
            Self::HellingerDt => {
                let d = math::sqrt(p) - math::sqrt(q);
                2.0 * d * d
            }
            Self::SItakuraSaito => {
                let d = 1.0 / math::sqrt(p) - 1.0 / math::sqrt(q);
                2.0 * d * d
            }
            Self::SEuclidean => {
                let d = 1.0 / p - 1.0 / q;
                0.5 * d * d
            }
        }
    }

    /// `Σ_i μ_i φ(p_i, q_i)`.
    pub fn closed_form_measures(self, p: &DiscreteDensity, q: &DiscreteDensity) -> Result<f64> {
        check_compatible(p, q)?;
        Ok(p.values
            .iter()
            .zip(&q.values)
            .zip(&p.weights)
            .map(|((&pv, &qv), &w)| w * self.closed_form(pv, qv))
            .sum())
    }
}

impl fmt::Display for NamedDivergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedDivergence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        named_divergence(s)
    }
}

/// Looks up a divergence by name (case-insensitive; `_`, spaces and `-`
/// are interchangeable).
pub fn named_divergence(name: &str) -> Result<NamedDivergence> {
    let key: alloc::string::String = name
        .trim()
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .flat_map(char::to_lowercase)
        .collect();
    let found = match key.as_str() {
        "euclidean" | "euclidian" => NamedDivergence::Euclidean,
        "v1hellinger" => NamedDivergence::V1Hellinger,
        "v2hellinger" => NamedDivergence::V2Hellinger,
        "hellinger" => NamedDivergence::Hellinger,
        "jeffrey" | "jeffreys" => NamedDivergence::Jeffrey,
        "euclideandt" | "euclidiandt" => NamedDivergence::EuclideanDt,
        "hellingerdt" => NamedDivergence::HellingerDt,
        "sitakurasaito" | "itakurasaito" => NamedDivergence::SItakuraSaito,
        "seuclidean" | "seuclidian" => NamedDivergence::SEuclidean,
        _ => return Err(Error::UnknownName(name.to_owned())),
    };
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit(values: &[f64]) -> DiscreteDensity {
        DiscreteDensity::with_unit_weights(values.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn validation() {
        let d = validate_density(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        assert!(d.is_normalized());
        assert!(matches!(
            validate_density(vec![0.5, -0.1], vec![1.0, 1.0]),
            Err(Error::NegativeValue { index: 1, .. })
        ));
        assert!(validate_density(vec![1.0, 1.0], vec![0.25, 0.75])
            .unwrap()
            .is_normalized());
        assert!(matches!(
            validate_density(vec![1.0], vec![1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            validate_density(vec![1.0, 1.0], vec![1.0, 0.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            validate_density(vec![f64::NAN], vec![1.0]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert!(!unit(&[2.0, 2.0]).is_normalized());
    }

    #[test]
    fn measure_examples() {
        let p = unit(&[0.5, 0.5]);
        let q = unit(&[0.25, 0.75]);
        let euclid = NamedDivergence::Euclidean.spec();
        assert!(close(
            divergence_measures(&euclid, &p, &q).unwrap(),
            0.125,
            1e-15
        ));
        let hell = NamedDivergence::Hellinger.spec();
        // mpmath: 4 Σ (√p − √q)²
        let expected = 0.272_593_389_687_453_7;
        assert!(close(
            divergence_measures(&hell, &p, &q).unwrap(),
            expected,
            1e-14
        ));
        for named in NamedDivergence::ALL {
            assert_eq!(divergence_measures(&named.spec(), &q, &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn singular_atoms_are_reported() {
        let p = unit(&[0.0, 1.0]);
        let q = unit(&[0.5, 0.5]);
        let jeffrey = NamedDivergence::Jeffrey.spec();
        assert_eq!(
            divergence_measures(&jeffrey, &p, &q),
            Err(Error::SingularAtom { index: 0 })
        );
        // regular spec accepts the zero atom
        let euclid = NamedDivergence::Euclidean.spec();
        assert!(close(
            divergence_measures(&euclid, &p, &q).unwrap(),
            0.5,
            1e-15
        ));
        // smoothing makes the singular spec finite
        let smooth = p.smoothed(DEFAULT_SMOOTHING, true).unwrap();
        assert!(divergence_measures(&jeffrey, &smooth, &q)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn mismatched_measures() {
        let p = unit(&[0.5, 0.5]);
        let q = DiscreteDensity::new(vec![0.5, 0.25], vec![1.0, 2.0]).unwrap();
        let spec = NamedDivergence::Euclidean.spec();
        assert_eq!(
            divergence_measures(&spec, &p, &q),
            Err(Error::WeightMismatch { index: 1 })
        );
        let r = unit(&[1.0]);
        assert!(matches!(
            divergence_measures(&spec, &p, &r),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn type2_examples() {
        let p = unit(&[0.5, 0.5]);
        let q = unit(&[0.25, 0.75]);
        let params = ParameterPair::new(1.0, 1.0).unwrap();
        assert!(close(
            symmetrize_type2(params, &p, &q).unwrap(),
            0.015_625,
            1e-15
        ));
        assert_eq!(symmetrize_type2(params, &p, &p).unwrap(), 0.0);
        assert_eq!(
            symmetrize_type2(params, &p, &q).unwrap(),
            symmetrize_type2(params, &q, &p).unwrap()
        );
    }

    #[test]
    fn names() {
        assert_eq!(
            named_divergence("Hellinger").unwrap().spec(),
            DivergenceSpec::abs(0.5, 0.5).unwrap()
        );
        assert_eq!(
            named_divergence("Jeffrey").unwrap().spec(),
            DivergenceSpec::abs(1.0, 0.0).unwrap()
        );
        assert_eq!(
            named_divergence("S-Euclidean").unwrap().spec(),
            DivergenceSpec::Dt(-1.0)
        );
        assert_eq!(
            named_divergence("itakura_saito").unwrap(),
            NamedDivergence::SItakuraSaito
        );
        assert!(matches!(
            named_divergence("bregman"),
            Err(Error::UnknownName(_))
        ));
        for n in NamedDivergence::ALL {
            assert_eq!(named_divergence(n.name()).unwrap(), n);
        }
    }

    #[test]
    fn change_of_measure_examples() {
        let p = unit(&[0.5, 0.5]);
        let moved = change_dominating_measure(&p, &[2.0, 2.0]).unwrap();
        assert_eq!(moved.values(), &[0.25, 0.25]);
        assert_eq!(moved.weights(), &[2.0, 2.0]);
        assert!(moved.is_normalized());
        assert_eq!(change_dominating_measure(&p, &[1.0, 1.0]).unwrap(), p);
        let r = DiscreteDensity::new(vec![1.0, 1.0], vec![0.25, 0.75]).unwrap();
        assert_eq!(
            change_dominating_measure(&r, &[1.0, 1.0]).unwrap().values(),
            &[0.25, 0.75]
        );
        assert!(matches!(
            change_dominating_measure(&p, &[1.0, -1.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn additivity_over_blocks() {
        let (p1, q1) = (unit(&[0.1, 0.2]), unit(&[0.3, 0.05]));
        let (p2, q2) = (unit(&[0.4, 0.3]), unit(&[0.25, 0.4]));
        let spec = DivergenceSpec::abs(0.5, 1.0).unwrap();
        let joined =
            divergence_measures(&spec, &p1.concat(&p2).unwrap(), &q1.concat(&q2).unwrap()).unwrap();
        let parts = divergence_measures(&spec, &p1, &q1).unwrap()
            + divergence_measures(&spec, &p2, &q2).unwrap();
        // equal up to summation order
        assert!(close(joined, parts, 4.0 * f64::EPSILON));
    }
}

//! Seeded random densities for probes and property tests.
//!
//! A density is a vector of i.i.d. `Exp(1)` variates divided by their sum,
//! i.e. a uniform draw from the probability simplex, taken against the
//! counting measure.

use alloc::vec::Vec;

use rand::distr::Open01;
use rand::Rng;

use crate::math;
use crate::measure::DiscreteDensity;

/// Atom count used when none is given.
pub const DEFAULT_ATOMS: usize = 8;

/// One `Exp(1)` variate by inversion.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -math::ln(u)
}

/// Normalized exponential vector of length `atoms` with unit weights.
///
/// # Panics
/// If `atoms == 0`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, atoms: usize) -> DiscreteDensity {
    assert!(atoms > 0, "a density needs at least one atom");
    let raw: Vec<f64> = (0..atoms).map(|_| exponential(rng)).collect();
    let total: f64 = raw.iter().sum();
    DiscreteDensity::with_unit_weights(raw.into_iter().map(|v| v / total).collect())
        .expect("normalized exponential draws are positive and finite")
}

use std::ops::Deref;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::cis;

/// Largest allowed deviation of `|x_i|` from 1.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

/// Feasible RIS coefficients.
///
/// Entry `i` holds the conjugated reflection coefficient `e^{-jφ_i}` of
/// element `i`; the global channel applies `Φ = diag(conj(x))`. Every entry has
/// unit modulus to within [`UNIT_MODULUS_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<Complex64>);

impl PhaseVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("phase vector must be non-empty".into()));
        }
        check_unit_modulus(&entries)?;
        Ok(Self(entries))
    }

    pub fn ones(n: usize) -> Self {
        assert!(n > 0);
        Self(vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        assert!(!angles.is_empty());
        Self(angles.iter().map(|a| cis(*a)).collect())
    }

    /// Angles of the stored entries, in `(-π, π]`.
    pub fn angles(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.arg()).collect()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Replaces entry `i` without re-validating; `value` must be unit modulus.
    pub(crate) fn set_unchecked(&mut self, i: usize, value: Complex64) {
        debug_assert!((value.norm() - 1.0).abs() <= UNIT_MODULUS_TOL);
        self.0[i] = value;
    }
}

impl Deref for PhaseVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

pub(crate) fn check_unit_modulus(x: &[Complex64]) -> Result<()> {
    match x
        .iter()
        .position(|z| !((z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL))
    {
        Some(i) => Err(Error::Validation(format!(
            "entry {i} has modulus {} (unit modulus required)",
            x[i].norm()
        ))),
        None => Ok(()),
    }
}

/// I.i.d. phases uniform on `[0, 2π)`.
pub fn random_phases<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PhaseVector {
    assert!(n > 0, "need at least one RIS element");
    PhaseVector(
        (0..n)
            .map(|_| cis(rng.random_range(0.0..std::f64::consts::TAU)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_unit_entries() {
        assert!(PhaseVector::new(vec![Complex64::new(1.0, 1.0)]).is_err());
        assert!(PhaseVector::new(vec![]).is_err());
        assert!(PhaseVector::new(vec![Complex64::new(0.0, -1.0)]).is_ok());
        assert!(PhaseVector::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn random_phases_reproducible() {
        let a = random_phases(&mut ChaCha8Rng::seed_from_u64(3), 16);
        let b = random_phases(&mut ChaCha8Rng::seed_from_u64(3), 16);
        assert_eq!(a, b);
        let single = random_phases(&mut ChaCha8Rng::seed_from_u64(9), 1);
        assert_eq!(single.len(), 1);
        assert!((single[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_phases_circular_mean_small() {
        let x = random_phases(&mut ChaCha8Rng::seed_from_u64(11), 10_000);
        let mean: Complex64 = x.iter().sum::<Complex64>() / 10_000.0;
        // The circular mean has standard deviation 1/√(2·10⁴) ≈ 0.007 per component.
        assert!(mean.norm() <= 0.03, "{}", mean.norm());
    }
}

//! Dense complex linear algebra.
//!
//! Only what the sum-rate machinery needs: a row-major matrix type, Cholesky
//! based log-determinants and solves, a dominant Hermitian eigenpair and a
//! dominant singular triple. Nothing here forms an explicit inverse.

mod cholesky;
mod eigen;
mod matrix;

pub use cholesky::{logdet_hpd, solve_hpd, Cholesky};
pub use eigen::{hermitian_max_eigpair, rank1_svd, EigenPair, Rank1Svd};
pub use matrix::{ComplexMatrix, ComplexVector};

pub use num_complex::Complex64;

/// Relative tolerance used for factorization-based routines.
pub const FACTOR_TOL: f64 = 1e-10;
/// Default relative residual tolerance for eigenpairs.
pub const EIGEN_TOL: f64 = 1e-9;
/// Default iteration cap for the dominant eigenpair.
pub const EIGEN_MAX_ITER: usize = 100_000;

/// `e^{j angle}`.
#[inline]
pub fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Rotates `v` so that its first entry with non-negligible modulus is real
/// and non-negative.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(idx) = v.iter().position(|z| z.norm() > 1e-12 * scale) {
        let lead = v[idx];
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[idx] = Complex64::new(lead.norm(), 0.0);
    }
}

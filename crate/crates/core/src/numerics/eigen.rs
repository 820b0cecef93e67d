use num_complex::Complex64;

use super::{fix_phase, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Dominant eigenpair of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit 2-norm; first non-negligible entry real and non-negative.
    pub vector: ComplexVector,
    pub iterations: usize,
}

enum PowerOutcome {
    Converged(EigenPair),
    Stalled {
        best: EigenPair,
        residual: f64,
    },
}

/// Power iteration on `A + shift·I` starting from `start`. Convergence is
/// judged on the unshifted residual `‖A v − λ v‖` with `λ` the Rayleigh
/// quotient of `A`.
fn power_iterate(
    a: &ComplexMatrix,
    shift: f64,
    start: ComplexVector,
    threshold: f64,
    max_iter: usize,
) -> PowerOutcome {
    let mut v = start;
    let mut best: Option<(f64, f64, ComplexVector)> = None;
    for iter in 0..=max_iter {
        let av = a.mul_vec(&v);
        let lambda = v.dot(&av).re;
        let residual = av
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= threshold {
            return PowerOutcome::Converged(EigenPair {
                value: lambda,
                vector: v,
                iterations: iter,
            });
        }
        if best.as_ref().map_or(true, |(r, _, _)| residual < *r) {
            best = Some((residual, lambda, v.clone()));
        }
        let mut next: ComplexVector = av
            .iter()
            .zip(v.iter())
            .map(|(x, y)| x + shift * y)
            .collect::<Vec<_>>()
            .into();
        let norm = next.norm();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for z in next.iter_mut() {
            *z /= norm;
        }
        v = next;
    }
    let (residual, value, vector) = best.expect("at least one iterate");
    PowerOutcome::Stalled {
        best: EigenPair {
            value,
            vector,
            iterations: max_iter,
        },
        residual,
    }
}

/// Largest (algebraic) eigenvalue of a Hermitian matrix and its eigenvector.
///
/// Power iteration from the normalized all-ones vector. If the unshifted run
/// lands on a negative eigenvalue or stalls, it is repeated on `A + ‖A‖_F I`,
/// which makes the wanted eigenvalue the dominant one. A converged pair whose
/// eigenvalue is beaten by some diagonal entry (start vector orthogonal to
/// the top eigenvector) is restarted from that coordinate vector.
pub fn hermitian_max_eigpair(a: &ComplexMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    if !a.is_square() {
        return Err(Error::Validation(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    if a.hermitian_defect() > tol * scale {
        return Err(Error::Validation("matrix is not Hermitian".into()));
    }
    let ones = ComplexVector(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
    if scale == 0.0 {
        return Ok(EigenPair {
            value: 0.0,
            vector: ones,
            iterations: 0,
        });
    }
    let threshold = tol * scale;

    let (max_diag_idx, max_diag) = (0..n)
        .map(|i| (i, a[(i, i)].re))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });

    let mut start = ones;
    let mut last_stall = None;
    for attempt in 0..3 {
        let mut pair = None;
        for shift in [0.0, scale] {
            match power_iterate(a, shift, start.clone(), threshold, max_iter) {
                PowerOutcome::Converged(p) if p.value >= 0.0 || shift > 0.0 => {
                    pair = Some(p);
                    break;
                }
                PowerOutcome::Converged(_) => {}
                PowerOutcome::Stalled { best, residual } => last_stall = Some((best, residual)),
            }
        }
        let Some(mut pair) = pair else { break };
        if pair.value + threshold < max_diag && attempt < 2 {
            let mut e = ComplexVector::zeros(n);
            e[max_diag_idx] = Complex64::new(1.0, 0.0);
            start = e;
            continue;
        }
        fix_phase(&mut pair.vector);
        return Ok(pair);
    }
    let (mut best, residual) = last_stall.expect("stalled run recorded");
    fix_phase(&mut best.vector);
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
        eigenvalue: best.value,
        eigenvector: best.vector,
    })
}

/// Dominant singular triple `A ≈ d1 u1 v1ᴴ`.
#[derive(Debug, Clone)]
pub struct Rank1Svd {
    pub sigma: f64,
    /// First non-negligible entry real and non-negative.
    pub u: ComplexVector,
    /// `Aᴴ u / σ`.
    pub v: ComplexVector,
    /// Set for the zero matrix; `u` and `v` are then arbitrary unit vectors.
    pub degenerate: bool,
}

/// Dominant singular triple via the dominant eigenpair of the smaller Gram
/// matrix. Exact rank-1 inputs converge in a single power step.
pub fn rank1_svd(a: &ComplexMatrix, tol: f64) -> Rank1Svd {
    let (m, n) = (a.rows(), a.cols());
    if a.frobenius_norm() == 0.0 {
        return Rank1Svd {
            sigma: 0.0,
            u: ComplexVector(vec![Complex64::new(1.0 / (m as f64).sqrt(), 0.0); m]),
            v: ComplexVector(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]),
            degenerate: true,
        };
    }
    let eig_tol = tol.max(f64::EPSILON * 16.0);
    let pick = |res: Result<EigenPair>| -> EigenPair {
        match res {
            Ok(p) => p,
            Err(Error::Convergence {
                eigenvalue,
                eigenvector,
                ..
            }) => EigenPair {
                value: eigenvalue,
                vector: eigenvector,
                iterations: 0,
            },
            Err(e) => unreachable!("Gram matrix is Hermitian by construction: {e}"),
        }
    };
    let mut u = if n <= m {
        let gram = a.gram();
        let pair = pick(hermitian_max_eigpair(&gram, eig_tol, super::EIGEN_MAX_ITER));
        a.mul_vec(&pair.vector)
    } else {
        let gram = a.matmul(&a.adjoint());
        pick(hermitian_max_eigpair(&gram, eig_tol, super::EIGEN_MAX_ITER)).vector
    };
    let un = u.norm();
    for z in u.iter_mut() {
        *z /= un;
    }
    fix_phase(&mut u);
    let mut v = a.adjoint_mul_vec(&u);
    let sigma = v.norm();
    for z in v.iter_mut() {
        *z /= sigma;
    }
    Rank1Svd {
        sigma,
        u,
        v,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{EIGEN_MAX_ITER, EIGEN_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &ComplexMatrix, p: &EigenPair) -> f64 {
        let av = a.mul_vec(&p.vector);
        av.iter()
            .zip(p.vector.iter())
            .map(|(x, y)| (x - p.value * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn identity_any_unit_vector() {
        let a = ComplexMatrix::identity(3);
        let p = hermitian_max_eigpair(&a, EIGEN_TOL, EIGEN_MAX_ITER).unwrap();
        assert!((p.value - 1.0).abs() < 1e-15);
        assert!((p.vector.norm() - 1.0).abs() < 1e-15);
        assert!(residual(&a, &p) <= EIGEN_TOL * a.frobenius_norm());
    }

    #[test]
    fn diagonal_picks_largest() {
        let a = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let p = hermitian_max_eigpair(&a, EIGEN_TOL, EIGEN_MAX_ITER).unwrap();
        assert!((p.value - 3.0).abs() < 1e-9);
        assert!((p.vector[1] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(p.vector[0].norm() < 1e-9);
    }

    #[test]
    fn negative_dominant_magnitude_still_returns_algebraic_max() {
        let a = ComplexMatrix::from_diag(&[c(-5.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let p = hermitian_max_eigpair(&a, EIGEN_TOL, EIGEN_MAX_ITER).unwrap();
        assert!((p.value - 2.0).abs() < 1e-8, "{}", p.value);
    }

    #[test]
    fn start_vector_orthogonal_to_top_eigenvector() {
        // (1,-1)(1,-1)ᴴ/2 annihilates the all-ones start.
        let z = [c(1.0, 0.0), c(-1.0, 0.0)];
        let a = ComplexMatrix::outer(&z, &z).scale(c(0.5, 0.0));
        let p = hermitian_max_eigpair(&a, EIGEN_TOL, EIGEN_MAX_ITER).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            hermitian_max_eigpair(&a, EIGEN_TOL, 10),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn stall_reports_best_iterate() {
        // Nearly tied eigenvalues with a 2-step budget cannot converge.
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(1.0 + 1e-3 * i as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        match hermitian_max_eigpair(&a, 1e-14, 2) {
            Err(Error::Convergence { eigenvector, .. }) => {
                assert!((eigenvector.norm() - 1.0).abs() < 1e-12)
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn phase_convention_first_entry_real() {
        let z = [c(0.0, 1.0), c(1.0, 1.0), c(-2.0, 0.5)];
        let a = ComplexMatrix::outer(&z, &z);
        let p = hermitian_max_eigpair(&a, EIGEN_TOL, EIGEN_MAX_ITER).unwrap();
        assert_eq!(p.vector[0].im, 0.0);
        assert!(p.vector[0].re > 0.0);
    }

    #[test]
    fn rank1_svd_outer_product_norms() {
        let m = 6;
        let n = 10;
        let a_vec: Vec<_> = (0..m).map(|i| crate::numerics::cis(0.3 * i as f64)).collect();
        let b_vec: Vec<_> = (0..n).map(|i| crate::numerics::cis(-1.1 * i as f64)).collect();
        let a = ComplexMatrix::outer(&a_vec, &b_vec);
        let svd = rank1_svd(&a, 1e-12);
        assert!(!svd.degenerate);
        assert!((svd.sigma - ((m * n) as f64).sqrt()).abs() < 1e-10);
        let rebuilt = ComplexMatrix::outer(&svd.u, &svd.v).scale(c(svd.sigma, 0.0));
        assert!(a.sub(&rebuilt).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        // a_vec has first entry 1, so u recovers it exactly up to 1/√m.
        for (ui, ai) in svd.u.iter().zip(&a_vec) {
            assert!((ui * (m as f64).sqrt() - ai).norm() < 1e-12);
        }
    }

    #[test]
    fn rank1_svd_wide_matrix() {
        let a_vec = [c(1.0, 0.0), c(0.0, 2.0)];
        let b_vec: Vec<_> = (0..5).map(|i| c(i as f64, 1.0)).collect();
        let a = ComplexMatrix::outer(&a_vec, &b_vec);
        let svd = rank1_svd(&a, 1e-12);
        let expected = ComplexVector(a_vec.to_vec()).norm() * ComplexVector(b_vec).norm();
        assert!((svd.sigma - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn rank1_svd_zero_is_degenerate() {
        let svd = rank1_svd(&ComplexMatrix::zeros(3, 4), 1e-12);
        assert!(svd.degenerate);
        assert_eq!(svd.sigma, 0.0);
        assert!((svd.u.norm() - 1.0).abs() < 1e-15);
        assert!((svd.v.norm() - 1.0).abs() < 1e-15);
    }
}

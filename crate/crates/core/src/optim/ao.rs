use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::PhaseVector;
use crate::separation::{QuadraticForm, SeparatedChannel};

pub const AO_EPSILON: f64 = 1e-6;
pub const AO_MAX_SWEEPS: usize = 100;

/// Quadratic objective after every sweep; `objective[0]` is the start point.
#[derive(Debug, Clone, PartialEq)]
pub struct AoTrace {
    pub objective: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    pub epsilon: f64,
}

impl AoTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objective.last().expect("trace holds the start point")
    }

    /// First sweep whose objective is within `tol` of the final value.
    pub fn sweeps_to_within(&self, tol: f64) -> usize {
        let last = self.final_objective();
        self.objective
            .iter()
            .position(|v| last - v <= tol)
            .expect("final entry always qualifies")
    }
}

/// Cyclic coordinate ascent of `xᴴBx + 2Re(xᴴw2)` over unit-modulus `x`.
pub fn ao_optimize(
    sep: &SeparatedChannel,
    epsilon: f64,
    max_sweeps: usize,
    x0: &PhaseVector,
) -> Result<(PhaseVector, AoTrace)> {
    ao_optimize_form(&sep.quadratic_form(), epsilon, max_sweeps, x0)
}

/// [`ao_optimize`] on a precomputed expansion.
pub fn ao_optimize_form(
    qf: &QuadraticForm,
    epsilon: f64,
    max_sweeps: usize,
    x0: &PhaseVector,
) -> Result<(PhaseVector, AoTrace)> {
    if !(epsilon > 0.0) {
        return Err(Error::Validation(format!("AO epsilon must be positive, got {epsilon}")));
    }
    let n = qf.dim();
    if x0.len() != n {
        return Err(Error::Validation(format!(
            "start point has {} entries, RIS has {n} elements",
            x0.len()
        )));
    }
    let b = &qf.b;
    let mut x = x0.clone();
    let mut v = b.mul_vec(&x);
    let mut current = qf.value(&x);
    let mut objective = vec![current];
    let mut converged = false;

    for _ in 0..max_sweeps {
        let before = x.clone();
        for i in 0..n {
            let old = x[i];
            // Σ_{m≠i} B[i,m] x_m + w2[i]
            let t = v[i] - b[(i, i)] * old + qf.w2[i];
            let tn = t.norm();
            if tn == 0.0 {
                continue;
            }
            let new = t / tn;
            debug_assert!(
                tn - (old.conj() * t).re >= -1e-12 * tn,
                "coordinate update decreased the objective"
            );
            let delta = new - old;
            if delta == Complex64::new(0.0, 0.0) {
                continue;
            }
            x.set_unchecked(i, new);
            for r in 0..n {
                v[r] += b[(r, i)] * delta;
            }
        }
        v = b.mul_vec(&x);
        let value = qf.value(&x);
        if value < current {
            // Only rounding can get here; keep the previous iterate.
            x = before;
            objective.push(current);
            converged = true;
            break;
        }
        let gain = value - current;
        current = value;
        objective.push(current);
        if gain < epsilon {
            converged = true;
            break;
        }
    }
    let sweeps = objective.len() - 1;
    Ok((
        x,
        AoTrace {
            objective,
            sweeps,
            converged,
            epsilon,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KFactor;
    use crate::numerics::{cis, ComplexMatrix, ComplexVector};
    use crate::optim::lower_bound_phases;
    use crate::separation::tests::synthetic;
    use crate::separation::tests::gaussian_matrix;
    use crate::separation::{quadratic_objective, separate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_element_closed_form() {
        let qf = QuadraticForm {
            b: ComplexMatrix::from_vec(1, 1, vec![Complex64::new(2.0, 0.0)]).unwrap(),
            w2: ComplexVector(vec![Complex64::new(-1.0, 1.0)]),
            c: 0.5,
        };
        let (x, trace) = ao_optimize_form(&qf, 1e-9, 10, &PhaseVector::ones(1)).unwrap();
        let want = Complex64::new(-1.0, 1.0) / 2f64.sqrt();
        assert!((x[0] - want).norm() < 1e-15);
        let best = (0..3600)
            .map(|s| qf.value(&[cis(s as f64 * std::f64::consts::TAU / 3600.0)]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(trace.final_objective() >= best - 1e-12);
    }

    #[test]
    fn diagonal_without_linear_term_is_flat() {
        let qf = QuadraticForm {
            b: ComplexMatrix::from_diag(&[Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(0.5, 0.0)]),
            w2: ComplexVector::zeros(3),
            c: 0.0,
        };
        let (x, trace) = ao_optimize_form(&qf, 1e-9, 10, &PhaseVector::ones(3)).unwrap();
        assert_eq!(x, PhaseVector::ones(3));
        assert_eq!(trace.objective, vec![4.5, 4.5]);
        assert!(trace.converged);
    }

    #[test]
    fn bad_arguments_rejected() {
        let ch = synthetic(1, 4, 4, 2, KFactor::PureLos);
        let sep = separate(&ch).unwrap();
        assert!(ao_optimize(&sep, 0.0, 10, &PhaseVector::ones(4)).is_err());
        assert!(ao_optimize(&sep, 1e-6, 10, &PhaseVector::ones(3)).is_err());
    }

    #[test]
    fn trace_is_monotone_and_ends_at_returned_point() {
        for seed in 0..50 {
            let ch = synthetic(seed, 16, 64, 4, KFactor::Finite(1.0));
            let sep = separate(&ch).unwrap();
            let (x, trace) = ao_optimize(&sep, AO_EPSILON, AO_MAX_SWEEPS, &PhaseVector::ones(64)).unwrap();
            assert!(trace.objective.windows(2).all(|w| w[1] >= w[0]), "seed {seed}");
            let q = quadratic_objective(&sep, &x).unwrap();
            assert!((q - trace.final_objective()).abs() <= 1e-10 * q);
            assert_eq!(trace.sweeps, trace.objective.len() - 1);
        }
    }

    fn gaussian_instance(seed: u64, m: usize, n: usize, k: usize) -> SeparatedChannel {
        let mut ch = synthetic(seed, m, n, k, KFactor::PureLos);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ch.h_d = gaussian_matrix(&mut rng, m, k, 1.0);
        ch.h_ru = gaussian_matrix(&mut rng, n, k, 1.0);
        separate(&ch).unwrap()
    }

    fn ao_at_least_projection(sep: &SeparatedChannel) -> bool {
        let n = sep.ris_elements();
        let lb = lower_bound_phases(sep);
        let (x, _) = ao_optimize(sep, AO_EPSILON, AO_MAX_SWEEPS, &PhaseVector::ones(n)).unwrap();
        quadratic_objective(sep, &x).unwrap() >= quadratic_objective(sep, &lb.phases).unwrap() - 1e-12
    }

    #[test]
    fn usually_beats_projection_start() {
        let wins = (0..1000).filter(|s| ao_at_least_projection(&gaussian_instance(*s, 8, 8, 2))).count();
        assert!(wins >= 950, "{wins}/1000");
    }

    #[test]
    fn projection_comparison_on_geometric_drops() {
        // Strong path-loss disparity makes the landscape rougher; reported.
        let wins = (0..1000)
            .filter(|s| ao_at_least_projection(&separate(&synthetic(*s, 8, 8, 2, KFactor::PureLos)).unwrap()))
            .count();
        println!("geometric drops, N=8 K=2: AO >= projection on {wins}/1000");
        assert!(wins >= 850, "{wins}/1000");
    }

    #[test]
    fn near_exhaustive_grid_optimum() {
        // N = 6, 3-bit grid: 8⁶ points, best refined by AO from the grid point.
        let mut hits = 0;
        for seed in 0..20 {
            let sep = gaussian_instance(1000 + seed, 8, 6, 2);
            let qf = sep.quadratic_form();
            let cw: Vec<Complex64> = (0..8).map(|m| cis(m as f64 * std::f64::consts::TAU / 8.0)).collect();
            let mut best = (f64::NEG_INFINITY, 0usize);
            let mut x = vec![Complex64::new(1.0, 0.0); 6];
            for code in 0..8usize.pow(6) {
                let mut c = code;
                for xi in x.iter_mut() {
                    *xi = cw[c % 8];
                    c /= 8;
                }
                let v = qf.value(&x);
                if v > best.0 {
                    best = (v, code);
                }
            }
            let mut c = best.1;
            for xi in x.iter_mut() {
                *xi = cw[c % 8];
                c /= 8;
            }
            let (_, refined) = ao_optimize_form(&qf, 1e-12, 1000, &PhaseVector::new(x.clone()).unwrap()).unwrap();
            let (_, ao) = ao_optimize_form(&qf, AO_EPSILON, AO_MAX_SWEEPS, &PhaseVector::ones(6)).unwrap();
            let target = refined.final_objective();
            assert!(ao.final_objective() >= 0.99 * best.0, "seed {seed}");
            if (ao.final_objective() - target).abs() <= 1e-6 * target.max(1.0) {
                hits += 1;
            }
        }
        assert!(hits >= 19, "{hits}/20 reached the refined grid optimum");
    }
}

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;

use crate::numerics::cis;
use crate::phase::PhaseVector;
use crate::separation::{QuadraticForm, SeparatedChannel};

/// Bound on the separated sum-rate over all unit-modulus `x`, from
/// `|x_n* B_nr x_r| ≤ |B_nr|` and `|x_n* p_n| ≤ |p_n|`.
pub fn upper_bound(sep: &SeparatedChannel) -> f64 {
    upper_bound_form(sep, &sep.quadratic_form())
}

pub fn upper_bound_form(sep: &SeparatedChannel, qf: &QuadraticForm) -> f64 {
    let b_sum: f64 = qf.b.as_slice().iter().map(|z| z.norm()).sum();
    let p_sum: f64 = qf.w2.iter().map(|z| z.norm()).sum();
    let q = qf.c + b_sum + 2.0 * p_sum;
    sep.log2_det_q() + q.ln_1p() / LN_2
}

/// Codeword index in `0..2^bits` nearest to `angle`; ties go to the smaller
/// index, and the wrap-around tie between `2^bits − 1` and `0` goes to 0.
pub fn quantize_index(angle: f64, bits: u32) -> usize {
    assert!((1..=24).contains(&bits), "quantizer bits must be in 1..=24");
    let levels = 1usize << bits;
    let step = TAU / levels as f64;
    let a = angle.rem_euclid(TAU);
    let t = a / step;
    let lo = t.floor();
    let frac = t - lo;
    let lo = lo as usize;
    if frac > 0.5 || (frac == 0.5 && lo == levels - 1) {
        (lo + 1) % levels
    } else {
        lo % levels
    }
}

/// Nearest codeword `2πm/2^bits` to each phase.
pub fn quantize_phases(x: &PhaseVector, bits: u32) -> PhaseVector {
    let step = TAU / (1usize << bits) as f64;
    let entries: Vec<Complex64> = x
        .iter()
        .map(|z| {
            let m = quantize_index(z.arg(), bits);
            if m == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                cis(m as f64 * step)
            }
        })
        .collect();
    PhaseVector::new(entries).expect("codewords are unit modulus")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::assemble_global;
    use crate::config::KFactor;
    use crate::numerics::ComplexMatrix;
    use crate::optim::lower_bound_phases;
    use crate::phase::random_phases;
    use crate::separation::tests::synthetic;
    use crate::separation::{separate, sum_rate_direct, sum_rate_separated};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn quantizer_examples() {
        assert_eq!(quantize_index(0.6 * PI, 1), 1);
        assert_eq!(quantize_index(FRAC_PI_4, 2), 0);
        assert_eq!(quantize_index(3.0 * FRAC_PI_4, 2), 1);
        assert_eq!(quantize_index(-FRAC_PI_4, 2), 0);
        assert_eq!(quantize_index(7.0 * FRAC_PI_4, 2), 0);
        assert_eq!(quantize_index(-0.1, 3), 0);
        assert_eq!(quantize_index(PI, 1), 1);
        let x = PhaseVector::from_angles(&[0.6 * PI, 0.1, -2.0]);
        let q = quantize_phases(&x, 1);
        assert_eq!(q.as_slice()[1], Complex64::new(1.0, 0.0));
        assert!((q[0] + 1.0).norm() < 1e-15 && (q[2] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn quantization_error_bounded_by_half_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_phases(&mut rng, 1000);
        for bits in 1..=6u32 {
            let half = PI / (1u32 << bits) as f64;
            let q = quantize_phases(&x, bits);
            for (a, b) in x.iter().zip(q.iter()) {
                assert!((a.conj() * b).arg().abs() <= half + 1e-12);
            }
        }
    }

    #[test]
    fn fine_quantization_loses_less() {
        for seed in 0..20 {
            let ch = synthetic(seed, 16, 64, 2, KFactor::PureLos);
            let sep = separate(&ch).unwrap();
            let lb = lower_bound_phases(&sep).phases;
            let rate = |x: &PhaseVector| sum_rate_direct(&assemble_global(&ch, x).unwrap());
            let base = rate(&lb);
            let loss2 = base - rate(&quantize_phases(&lb, 2));
            let loss10 = base - rate(&quantize_phases(&lb, 10));
            assert!(loss10 <= loss2 + 1e-12, "seed {seed}: {loss10} vs {loss2}");
        }
    }

    #[test]
    fn bound_without_ris_is_exact() {
        let mut ch = synthetic(3, 8, 16, 3, KFactor::PureLos);
        ch.h_ru = ComplexMatrix::zeros(16, 3);
        let sep = separate(&ch).unwrap();
        let exact = sum_rate_direct(&ch.h_d);
        assert!((upper_bound(&sep) - exact).abs() < 1e-10);
        ch.h_d = ComplexMatrix::zeros(8, 3);
        let sep = separate(&ch).unwrap();
        assert_eq!(upper_bound(&sep), sep.log2_det_q());
    }

    #[test]
    fn bound_dominates_random_probes() {
        let ch = synthetic(4, 16, 16, 2, KFactor::PureLos);
        let sep = separate(&ch).unwrap();
        let ub = upper_bound(&sep);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let best = (0..100_000)
            .map(|_| sum_rate_separated(&sep, &random_phases(&mut rng, 16)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(ub >= best, "{ub} < {best}");
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{derive_seed, STREAM_CHANNEL};
use crate::channel::{assemble_global, generate_channel_set, linear_to_db};
use crate::config::{KFactor, ScenarioConfig};
use crate::error::{Error, Result};

/// Search interval for the reference power, dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBracket {
    pub lo_db: f64,
    pub hi_db: f64,
}

impl Default for CalibrationBracket {
    fn default() -> Self {
        Self {
            lo_db: 0.0,
            hi_db: 100.0,
        }
    }
}

/// Single user, 64 BS antennas, 100 RIS elements, fully scattered UE links
/// and a pure-LOS RIS-BS link.
pub fn calibration_baseline() -> ScenarioConfig {
    ScenarioConfig {
        kappa_d: KFactor::Finite(0.0),
        kappa_ru: KFactor::Finite(0.0),
        kappa_br: KFactor::PureLos,
        ..ScenarioConfig::with_sizes(64, 100, 1)
    }
}

/// Average per-antenna power `‖h_k‖²/M` of the global channel with all RIS
/// phases zero, over users and `trials` drops, in dB. Drop `d` always uses
/// the same random numbers, so the result is a smooth function of the
/// configured reference power.
pub fn average_channel_power_db(config: &ScenarioConfig, trials: usize) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Config("calibration needs at least one trial".into()));
    }
    let powers: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|d| {
            let seed = derive_seed(config.seed, d as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_CHANNEL));
            let ch = generate_channel_set(&mut rng, config)?;
            let ones = vec![num_complex::Complex64::new(1.0, 0.0); ch.ris_elements()];
            let h = assemble_global(&ch, &ones)?;
            Ok(h.frobenius_norm().powi(2) / (h.rows() * h.cols()) as f64)
        })
        .collect();
    let mut total = 0.0;
    for p in powers {
        total += p?;
    }
    Ok(linear_to_db(total / trials as f64))
}

/// Bisection on the reference power until the average channel power is
/// within 0.01 dB of `target_db`.
pub fn calibrate_reference_power(
    config: &ScenarioConfig,
    target_db: f64,
    trials: usize,
    bracket: CalibrationBracket,
) -> Result<f64> {
    config.validate()?;
    let eval = |p: f64| -> Result<f64> {
        let cfg = ScenarioConfig {
            reference_power_db: p,
            ..config.clone()
        };
        Ok(average_channel_power_db(&cfg, trials)? - target_db)
    };
    let (mut lo, mut hi) = (bracket.lo_db, bracket.hi_db);
    let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Domain(format!(
            "reference power range [{lo}, {hi}] dB does not bracket target {target_db} dB \
             (channel power {:.2} to {:.2} dB)",
            f_lo + target_db,
            f_hi + target_db
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid)?;
        if f.abs() <= 0.01 || hi - lo < 1e-9 {
            return Ok(mid);
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ScenarioConfig {
        ScenarioConfig {
            seed: 3,
            ..calibration_baseline()
        }
    }

    #[test]
    fn fixed_point_returns_current_power() {
        let cfg = ScenarioConfig {
            reference_power_db: 40.0,
            ..quick()
        };
        let current = average_channel_power_db(&cfg, 50).unwrap();
        let p = calibrate_reference_power(&cfg, current, 50, CalibrationBracket::default()).unwrap();
        assert!((p - 40.0).abs() <= 0.1, "{p}");
    }

    #[test]
    fn doubling_user_distances_costs_six_db() {
        let base = ScenarioConfig {
            direct_pathloss_exponent: 2.0,
            ris_pathloss_exponent: 2.0,
            ..quick()
        };
        let far = ScenarioConfig {
            cell_radius: 2.0 * base.cell_radius,
            exclusion_radius: 2.0 * base.exclusion_radius,
            ..base.clone()
        };
        let b = CalibrationBracket::default();
        let p0 = calibrate_reference_power(&base, 0.0, 50, b).unwrap();
        let p1 = calibrate_reference_power(&far, 0.0, 50, b).unwrap();
        let want = 20.0 * 2f64.log10();
        assert!((p1 - p0 - want).abs() <= 0.1, "{p0} -> {p1}");
    }

    #[test]
    fn non_bracketing_range_rejected() {
        let b = CalibrationBracket {
            lo_db: 0.0,
            hi_db: 1.0,
        };
        assert!(matches!(
            calibrate_reference_power(&quick(), 0.0, 10, b),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn power_is_linear_in_reference() {
        let a = average_channel_power_db(&quick(), 20).unwrap();
        let b = average_channel_power_db(
            &ScenarioConfig {
                reference_power_db: quick().reference_power_db + 7.0,
                ..quick()
            },
            20,
        )
        .unwrap();
        assert!((b - a - 7.0).abs() < 1e-9);
    }
}

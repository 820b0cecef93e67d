use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::LinkGainParams;
use crate::error::{Error, Result};

/// Linear large-scale power gain `P · X · d^(-γ)` with log-normal shadowing
/// `X` (zero-mean Gaussian in dB). No draw is taken when the shadowing
/// standard deviation is zero.
pub fn link_gain<R: Rng + ?Sized>(params: &LinkGainParams, d: f64, rng: &mut R) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    let shadow_db = if params.shadow_std_db > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        params.shadow_std_db * z
    } else {
        0.0
    };
    Ok(db_to_linear(params.reference_power_db + shadow_db) * d.powf(-params.pathloss_exponent))
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

//! Clustered ray-based channel synthesis for one user drop.

mod drop;
mod gain;
mod rays;
mod steering;

pub use drop::{annulus_distance_cdf, draw_user_drop, sample_annulus_distance, Angles, UserDrop};
pub use gain::{db_to_linear, link_gain, linear_to_db};
pub use rays::{sample_laplacian, synth_hbr, synth_ray_channel, RayDiagnostics};
pub use steering::steering_vector;

use num_complex::Complex64;
use rand::Rng;

use crate::config::{KFactor, ScenarioConfig};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Parameters and geometry that produced a synthesized [`ChannelSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct DropMeta {
    pub drop: UserDrop,
    pub kappa_d: KFactor,
    pub kappa_ru: KFactor,
    /// Diagonal of `B_d`.
    pub direct_gains: Vec<f64>,
    /// Diagonal of `B_ru`.
    pub ris_gains: Vec<f64>,
    pub diagnostics: RayDiagnostics,
}

/// The three channel matrices of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// UE-BS, `M × K`.
    pub h_d: ComplexMatrix,
    /// UE-RIS, `N × K`.
    pub h_ru: ComplexMatrix,
    /// RIS-BS, `M × N`.
    pub h_br: ComplexMatrix,
    /// Whether `H_br` is exactly rank one (pure LOS) or has scattering.
    pub kappa_br: KFactor,
    /// Present for synthesized drops.
    pub meta: Option<DropMeta>,
}

impl ChannelSet {
    /// Builds a channel set from explicit matrices.
    pub fn from_matrices(
        h_d: ComplexMatrix,
        h_ru: ComplexMatrix,
        h_br: ComplexMatrix,
        kappa_br: KFactor,
    ) -> Result<Self> {
        let (m, k) = (h_d.rows(), h_d.cols());
        let n = h_ru.rows();
        if h_ru.cols() != k || h_br.rows() != m || h_br.cols() != n {
            return Err(Error::Validation(format!(
                "inconsistent shapes: H_d {}x{}, H_ru {}x{}, H_br {}x{}",
                m,
                k,
                n,
                h_ru.cols(),
                h_br.rows(),
                h_br.cols()
            )));
        }
        if !(h_d.all_finite() && h_ru.all_finite() && h_br.all_finite()) {
            return Err(Error::Validation("channel entries must be finite".into()));
        }
        Ok(Self {
            h_d,
            h_ru,
            h_br,
            kappa_br,
            meta: None,
        })
    }

    pub fn bs_antennas(&self) -> usize {
        self.h_d.rows()
    }

    pub fn users(&self) -> usize {
        self.h_d.cols()
    }

    pub fn ris_elements(&self) -> usize {
        self.h_ru.rows()
    }
}

/// Synthesizes one drop: geometry, large-scale gains, then `H_d`, `H_ru` and
/// `H_br`, all from the single stream `rng`.
pub fn generate_channel_set<R: Rng + ?Sized>(rng: &mut R, config: &ScenarioConfig) -> Result<ChannelSet> {
    let drop = draw_user_drop(rng, config)?;
    let direct_link = config.direct_link();
    let ris_link = config.ris_link();
    let direct_gains = drop
        .direct_distances
        .iter()
        .map(|d| link_gain(&direct_link, *d, rng))
        .collect::<Result<Vec<_>>>()?;
    let ris_gains = drop
        .ris_distances
        .iter()
        .map(|d| link_gain(&ris_link, *d, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut diagnostics = RayDiagnostics::default();
    let h_d = synth_ray_channel(
        rng,
        &config.bs,
        &config.ue_rays,
        &direct_gains,
        &drop.direct_los,
        config.kappa_d,
        &mut diagnostics,
    );
    let h_ru = synth_ray_channel(
        rng,
        &config.ris,
        &config.ue_rays,
        &ris_gains,
        &drop.ris_los,
        config.kappa_ru,
        &mut diagnostics,
    );
    let h_br = synth_hbr(
        rng,
        &config.bs,
        &config.ris,
        &drop,
        &config.br_rays,
        config.kappa_br,
        &mut diagnostics,
    )?;
    Ok(ChannelSet {
        h_d,
        h_ru,
        h_br,
        kappa_br: config.kappa_br,
        meta: Some(DropMeta {
            drop,
            kappa_d: config.kappa_d,
            kappa_ru: config.kappa_ru,
            direct_gains,
            ris_gains,
            diagnostics,
        }),
    })
}

/// Global uplink channel `H_d + H_br diag(conj(x)) H_ru`, where `x` holds
/// conjugated RIS coefficients.
pub fn assemble_global(ch: &ChannelSet, x: &[Complex64]) -> Result<ComplexMatrix> {
    let n = ch.ris_elements();
    if x.len() != n {
        return Err(Error::Validation(format!(
            "phase vector has {} entries, RIS has {n} elements",
            x.len()
        )));
    }
    let (m, k) = (ch.bs_antennas(), ch.users());
    // diag(conj x) H_ru, then H_br times that.
    let mut scaled = ch.h_ru.clone();
    for (r, xr) in x.iter().enumerate() {
        let phase = xr.conj();
        for j in 0..k {
            scaled[(r, j)] *= phase;
        }
    }
    let reflected = ch.h_br.matmul(&scaled);
    debug_assert_eq!((reflected.rows(), reflected.cols()), (m, k));
    Ok(ch.h_d.add(&reflected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_config() -> ScenarioConfig {
        ScenarioConfig {
            bs: crate::config::ArrayGeometry::new(2, 2, 0.5),
            ris: crate::config::ArrayGeometry::new(3, 2, 0.2),
            users: 3,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn shapes_follow_config() {
        let ch = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(1), &small_config()).unwrap();
        assert_eq!((ch.h_d.rows(), ch.h_d.cols()), (4, 3));
        assert_eq!((ch.h_ru.rows(), ch.h_ru.cols()), (6, 3));
        assert_eq!((ch.h_br.rows(), ch.h_br.cols()), (4, 6));
        assert!(ch.h_d.all_finite() && ch.h_ru.all_finite() && ch.h_br.all_finite());
    }

    #[test]
    fn seed_determinism() {
        let cfg = ScenarioConfig {
            kappa_br: KFactor::Finite(1.0),
            ..small_config()
        };
        let a = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(77), &cfg).unwrap();
        let b = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(77), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_ris_channel_leaves_direct_path() {
        let mut ch = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(2), &small_config()).unwrap();
        ch.h_br = ComplexMatrix::zeros(4, 6);
        let x: Vec<_> = (0..6).map(|i| cis(i as f64)).collect();
        assert_eq!(assemble_global(&ch, &x).unwrap(), ch.h_d);
    }

    #[test]
    fn identity_phases_give_plain_cascade() {
        let ch = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(3), &small_config()).unwrap();
        let x = vec![Complex64::new(1.0, 0.0); 6];
        let h = assemble_global(&ch, &x).unwrap();
        let want = ch.h_d.add(&ch.h_br.matmul(&ch.h_ru));
        assert!(h.sub(&want).frobenius_norm() < 1e-12 * want.frobenius_norm());
    }

    #[test]
    fn matches_elementwise_triple_product() {
        let ch = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(4), &small_config()).unwrap();
        let x: Vec<_> = (0..6).map(|i| cis(0.7 * i as f64 - 1.0)).collect();
        let h = assemble_global(&ch, &x).unwrap();
        for m in 0..4 {
            for k in 0..3 {
                let mut want = ch.h_d[(m, k)];
                for r in 0..6 {
                    want += ch.h_br[(m, r)] * x[r].conj() * ch.h_ru[(r, k)];
                }
                assert!((h[(m, k)] - want).norm() <= 1e-12 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let ch = generate_channel_set(&mut ChaCha8Rng::seed_from_u64(5), &small_config()).unwrap();
        assert!(matches!(
            assemble_global(&ch, &[Complex64::new(1.0, 0.0); 5]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn direct_column_power_matches_gain() {
        // κ_d = 1, σ_sf = 0: E‖(H_d)_{:,k}‖² = M·(B_d)_kk, averaged as a ratio
        // so the random gains cancel.
        let cfg = ScenarioConfig {
            bs: crate::config::ArrayGeometry::new(4, 2, 0.5),
            ris: crate::config::ArrayGeometry::new(2, 2, 0.2),
            users: 1,
            ue_rays: crate::config::RayParams {
                clusters: 4,
                subrays: 4,
                ..crate::config::RayParams::broad()
            },
            ..ScenarioConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let trials = 10_000;
        let mut ratio = 0.0;
        for _ in 0..trials {
            let ch = generate_channel_set(&mut rng, &cfg).unwrap();
            ratio += ch.h_d.column(0).norm_sqr() / (8.0 * ch.meta.unwrap().direct_gains[0]);
        }
        ratio /= trials as f64;
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }
}

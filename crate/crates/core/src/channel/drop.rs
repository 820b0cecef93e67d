use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

/// Elevation/azimuth pair in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
}

/// Random user placement and LOS geometry for one Monte-Carlo drop.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    /// UE-BS distances, metres.
    pub direct_distances: Vec<f64>,
    /// UE-RIS distances, metres.
    pub ris_distances: Vec<f64>,
    /// LOS arrival angles of each UE at the BS.
    pub direct_los: Vec<Angles>,
    /// LOS arrival angles of each UE at the RIS.
    pub ris_los: Vec<Angles>,
    pub ris_bs_distance: f64,
    /// RIS-BS LOS arrival angles at the BS.
    pub br_arrival: Angles,
    /// RIS-BS LOS departure angles at the RIS.
    pub br_departure: Angles,
}

impl UserDrop {
    pub fn users(&self) -> usize {
        self.direct_distances.len()
    }
}

/// Distance from the array of a point uniform over the annulus
/// `exclusion ≤ r ≤ cell`: uniform-area disk sampling with rejection inside
/// the exclusion radius.
pub fn sample_annulus_distance<R: Rng + ?Sized>(rng: &mut R, exclusion: f64, cell: f64) -> f64 {
    loop {
        let r = cell * rng.random::<f64>().sqrt();
        if r >= exclusion {
            return r;
        }
    }
}

/// Closed-form CDF of [`sample_annulus_distance`].
pub fn annulus_distance_cdf(r: f64, exclusion: f64, cell: f64) -> f64 {
    if r <= exclusion {
        0.0
    } else if r >= cell {
        1.0
    } else {
        (r * r - exclusion * exclusion) / (cell * cell - exclusion * exclusion)
    }
}

pub fn draw_user_drop<R: Rng + ?Sized>(rng: &mut R, config: &ScenarioConfig) -> Result<UserDrop> {
    let (r0, r1) = (config.exclusion_radius, config.cell_radius);
    if !(r0 >= 0.0 && r0 < r1) {
        return Err(Error::Config(format!(
            "exclusion radius {r0} must be below cell radius {r1}"
        )));
    }
    let k = config.users;
    let mut direct_distances = Vec::with_capacity(k);
    let mut ris_distances = Vec::with_capacity(k);
    let mut direct_los = Vec::with_capacity(k);
    let mut ris_los = Vec::with_capacity(k);
    for _ in 0..k {
        direct_distances.push(sample_annulus_distance(rng, r0, r1));
        ris_distances.push(sample_annulus_distance(rng, r0, r1));
        direct_los.push(ue_los_angles(rng));
        ris_los.push(ue_los_angles(rng));
    }
    let deg = PI / 180.0;
    let theta_d = rng.random_range(70.0 * deg..=90.0 * deg);
    let phi_d = rng.random_range(-30.0 * deg..=30.0 * deg);
    let phi_a = rng.random_range(-30.0 * deg..=30.0 * deg);
    Ok(UserDrop {
        direct_distances,
        ris_distances,
        direct_los,
        ris_los,
        ris_bs_distance: config.ris_bs_distance,
        br_arrival: Angles {
            theta: PI - theta_d,
            phi: phi_a,
        },
        br_departure: Angles {
            theta: theta_d,
            phi: phi_d,
        },
    })
}

fn ue_los_angles<R: Rng + ?Sized>(rng: &mut R) -> Angles {
    Angles {
        theta: rng.random_range(0.0..PI),
        phi: rng.random_range(-FRAC_PI_2..FRAC_PI_2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_radii_rejected() {
        let cfg = ScenarioConfig {
            exclusion_radius: 50.0,
            ..ScenarioConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(draw_user_drop(&mut rng, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_drop() {
        let cfg = ScenarioConfig {
            users: 4,
            ..ScenarioConfig::default()
        };
        let a = draw_user_drop(&mut ChaCha8Rng::seed_from_u64(5), &cfg).unwrap();
        let b = draw_user_drop(&mut ChaCha8Rng::seed_from_u64(5), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.users(), 4);
    }

    #[test]
    fn angle_and_distance_ranges() {
        let cfg = ScenarioConfig {
            users: 6,
            ..ScenarioConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let d = draw_user_drop(&mut rng, &cfg).unwrap();
            for r in d.direct_distances.iter().chain(&d.ris_distances) {
                assert!((5.0..=50.0).contains(r));
            }
            for a in d.direct_los.iter().chain(&d.ris_los) {
                assert!((0.0..=PI).contains(&a.theta));
                assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&a.phi));
            }
            let deg = PI / 180.0;
            assert!(d.br_departure.theta >= 70.0 * deg - 1e-12 && d.br_departure.theta <= 90.0 * deg + 1e-12);
            assert!((d.br_arrival.theta + d.br_departure.theta - PI).abs() < 1e-12);
            assert!(d.br_arrival.phi.abs() <= 30.0 * deg + 1e-12);
            assert!(d.br_departure.phi.abs() <= 30.0 * deg + 1e-12);
        }
    }

    #[test]
    fn distance_law_matches_annulus_cdf() {
        // Kolmogorov distance between the empirical CDF of 10⁴ draws and the
        // closed-form annulus CDF.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut samples: Vec<f64> = (0..10_000)
            .map(|_| sample_annulus_distance(&mut rng, 5.0, 50.0))
            .collect();
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let ks = samples
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let f = annulus_distance_cdf(*r, 5.0, 50.0);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.02, "KS distance {ks}");
    }
}

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::drop::{Angles, UserDrop};
use super::steering::steering_into;
use crate::config::{ArrayGeometry, KFactor, RayParams};
use crate::error::{Error, Result};
use crate::numerics::{cis, ComplexMatrix};

/// Counters collected while synthesizing scattered rays.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RayDiagnostics {
    /// Sub-ray elevations that fell outside `[0, π]` and were clamped.
    pub clamped_elevations: usize,
}

/// Zero-mean Laplacian draw with standard deviation `std` (scale `std/√2`),
/// by inverting the two-sided exponential CDF.
pub fn sample_laplacian<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    let scale = std / std::f64::consts::SQRT_2;
    loop {
        let u = rng.random::<f64>() - 0.5;
        let tail = 1.0 - 2.0 * u.abs();
        if tail > 0.0 {
            return -scale * u.signum() * tail.ln();
        }
    }
}

/// Draws the `clusters × subrays` angle pairs of one scattered component.
fn draw_ray_angles<R: Rng + ?Sized>(
    rng: &mut R,
    ray: &RayParams,
    diag: &mut RayDiagnostics,
    out: &mut Vec<Angles>,
) {
    let deg = PI / 180.0;
    out.clear();
    for _ in 0..ray.clusters {
        let theta_c = ray.central_el_mean_deg * deg + sample_laplacian(rng, ray.central_el_std_deg * deg);
        let z: f64 = rng.sample(StandardNormal);
        let phi_c = (ray.central_az_mean_deg + ray.central_az_std_deg * z) * deg;
        for _ in 0..ray.subrays {
            let mut theta = theta_c + sample_laplacian(rng, ray.subray_el_std_deg * deg);
            if !(0.0..=PI).contains(&theta) {
                theta = theta.clamp(0.0, PI);
                diag.clamped_elevations += 1;
            }
            let phi = phi_c + sample_laplacian(rng, ray.subray_az_std_deg * deg);
            out.push(Angles { theta, phi });
        }
    }
}

/// Channel from `K` single-antenna users to an array.
///
/// Column `k` is `η √B_k a(LOS_k) + ζ Σ_{c,s} √(B_k/(C·S)) e^{jψ} a(θ_cs, φ_cs)`
/// with `ψ ~ U(0, 2π)`, so the ray powers of each user sum to `B_k`.
pub fn synth_ray_channel<R: Rng + ?Sized>(
    rng: &mut R,
    geom: &ArrayGeometry,
    ray: &RayParams,
    gains: &[f64],
    los: &[Angles],
    kappa: KFactor,
    diag: &mut RayDiagnostics,
) -> ComplexMatrix {
    assert_eq!(gains.len(), los.len(), "one LOS direction per user");
    let n = geom.elements();
    let users = gains.len();
    let (eta, zeta) = kappa.weights();
    let mut h = ComplexMatrix::zeros(n, users);
    let mut a = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(ray.rays());
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..users {
        col.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        if eta > 0.0 {
            steering_into(geom, los[k].theta, los[k].phi, &mut a);
            let amp = eta * gains[k].sqrt();
            for (c, s) in col.iter_mut().zip(&a) {
                *c += amp * s;
            }
        }
        if zeta > 0.0 {
            draw_ray_angles(rng, ray, diag, &mut angles);
            let amp = zeta * (gains[k] / ray.rays() as f64).sqrt();
            for ang in &angles {
                let coeff = amp * cis(rng.random_range(0.0..TAU));
                steering_into(geom, ang.theta, ang.phi, &mut a);
                for (c, s) in col.iter_mut().zip(&a) {
                    *c += coeff * s;
                }
            }
        }
        h.set_column(k, &col);
    }
    h
}

/// RIS-BS channel (`M × N`).
///
/// Pure LOS: `√β a_b(arrival) a_rᴴ(departure)` with `β = d_br^-2`.
/// Finite `κ_br`: the LOS term is weighted by `η` and `β = d_br^-2/η²`, plus
/// `ζ`-weighted narrow-spread rays, each an outer product of a BS arrival
/// and a RIS departure steering vector with power `β/(C·S)`.
pub fn synth_hbr<R: Rng + ?Sized>(
    rng: &mut R,
    bs: &ArrayGeometry,
    ris: &ArrayGeometry,
    drop: &UserDrop,
    ray: &RayParams,
    kappa_br: KFactor,
    diag: &mut RayDiagnostics,
) -> Result<ComplexMatrix> {
    let (m, n) = (bs.elements(), ris.elements());
    let base = drop.ris_bs_distance.powi(-2);
    let (eta, zeta) = kappa_br.weights();
    if eta == 0.0 {
        return Err(Error::Domain("kappa_br must be positive".into()));
    }
    let beta = base / (eta * eta);
    let mut a_b = Vec::with_capacity(m);
    let mut a_r = Vec::with_capacity(n);
    steering_into(bs, drop.br_arrival.theta, drop.br_arrival.phi, &mut a_b);
    steering_into(ris, drop.br_departure.theta, drop.br_departure.phi, &mut a_r);
    let mut h = ComplexMatrix::outer(&a_b, &a_r).scale(Complex64::new(eta * beta.sqrt(), 0.0));
    if zeta > 0.0 {
        let mut arrivals = Vec::with_capacity(ray.rays());
        let mut departures = Vec::with_capacity(ray.rays());
        draw_ray_angles(rng, ray, diag, &mut arrivals);
        draw_ray_angles(rng, ray, diag, &mut departures);
        let amp = zeta * (beta / ray.rays() as f64).sqrt();
        for (arr, dep) in arrivals.iter().zip(&departures) {
            let coeff = amp * cis(rng.random_range(0.0..TAU));
            steering_into(bs, arr.theta, arr.phi, &mut a_b);
            steering_into(ris, dep.theta, dep.phi, &mut a_r);
            for i in 0..m {
                let left = coeff * a_b[i];
                for j in 0..n {
                    h[(i, j)] += left * a_r[j].conj();
                }
            }
        }
    }
    Ok(h)
}

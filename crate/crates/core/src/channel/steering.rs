use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::config::ArrayGeometry;
use crate::numerics::{cis, ComplexVector};

/// Array response of a y-z uniform rectangular array.
///
/// `a = a_y ⊗ a_z` with `a_y[m] = e^{j2π m d sinθ sinφ}` and
/// `a_z[m] = e^{j2π m d cosθ}`; element `(iy, iz)` sits at index
/// `iy·n_z + iz`. `theta` is the elevation measured from the z axis, `phi`
/// the azimuth.
pub fn steering_vector(geom: &ArrayGeometry, theta: f64, phi: f64) -> ComplexVector {
    let mut out = Vec::with_capacity(geom.elements());
    steering_into(geom, theta, phi, &mut out);
    ComplexVector(out)
}

pub(crate) fn steering_into(geom: &ArrayGeometry, theta: f64, phi: f64, out: &mut Vec<Complex64>) {
    out.clear();
    let ky = TAU * geom.spacing * theta.sin() * phi.sin();
    let kz = TAU * geom.spacing * theta.cos();
    let az: Vec<Complex64> = (0..geom.n_z).map(|m| cis(kz * m as f64)).collect();
    for iy in 0..geom.n_y {
        let ay = cis(ky * iy as f64);
        out.extend(az.iter().map(|z| ay * z));
    }
}

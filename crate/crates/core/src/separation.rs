//! Rank-one separation of the RIS-BS link.
//!
//! With `H_br ≈ d1 u1 v1ᴴ` the sum-rate splits into a part that does not
//! depend on the RIS phases, `log₂|Q|`, and a scalar term
//! `log₂(1 + wᴴQ⁻¹w)` with `w = w1 + Z′ᴴx` affine in the phases. For an
//! exactly rank-one `H_br` this is an identity; otherwise it is the
//! approximation the optimizers work with, and reported rates always come
//! from [`sum_rate_direct`] on the true channel.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::numerics::{rank1_svd, Cholesky, ComplexMatrix, ComplexVector, FACTOR_TOL};
use crate::phase::check_unit_modulus;

/// Phase-independent parts of the separated sum-rate.
#[derive(Debug, Clone)]
pub struct SeparatedChannel {
    /// `I + H_dᴴ(I − a_b a_bᴴ/M)H_d`, `K × K`.
    pub q: ComplexMatrix,
    q_chol: Cholesky,
    log2_det_q: f64,
    /// `H_dᴴ a_b / √M`.
    pub w1: ComplexVector,
    /// `scale · diag(conj a_r) · H_ru`, `N × K`.
    pub zp: ComplexMatrix,
    /// `√M u1`.
    pub a_b: ComplexVector,
    /// `√N v1`.
    pub a_r: ComplexVector,
    /// `d1 / √N`.
    pub scale: f64,
    /// `‖H_br − d1 u1 v1ᴴ‖_F / ‖H_br‖_F`; zero up to rounding for pure LOS.
    pub rank1_residual: f64,
}

/// `q(x) = c + xᴴBx + 2Re(xᴴw2)`, the expanded form of `wᴴQ⁻¹w`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    /// `Z′Q⁻¹Z′ᴴ`, Hermitian PSD, `N × N`.
    pub b: ComplexMatrix,
    /// `Z′Q⁻¹w1`.
    pub w2: ComplexVector,
    /// `w1ᴴQ⁻¹w1`.
    pub c: f64,
}

impl QuadraticForm {
    pub fn value(&self, x: &[Complex64]) -> f64 {
        let bx = self.b.mul_vec(x);
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..x.len() {
            quad += (x[i].conj() * bx[i]).re;
            lin += (x[i].conj() * self.w2[i]).re;
        }
        self.c + quad + 2.0 * lin
    }

    pub fn dim(&self) -> usize {
        self.w2.len()
    }
}

pub fn separate(ch: &ChannelSet) -> Result<SeparatedChannel> {
    let (m, k, n) = (ch.bs_antennas(), ch.users(), ch.ris_elements());
    let svd = rank1_svd(&ch.h_br, 1e-13);
    if svd.degenerate || !(svd.sigma > 0.0) {
        return Err(Error::Domain("RIS-BS channel is zero".into()));
    }
    let u = &svd.u;
    // w1 = H_dᴴ u1; projected H_d = H_d − u1 w1ᴴ, so Q = I + H1ᴴH1 stays
    // exactly PSD-plus-identity in floating point.
    let w1 = ch.h_d.adjoint_mul_vec(u);
    let h1 = ComplexMatrix::from_fn(m, k, |i, j| ch.h_d[(i, j)] - u[i] * w1[j].conj());
    let mut q = h1.gram();
    for i in 0..k {
        q[(i, i)] = Complex64::new(q[(i, i)].re + 1.0, 0.0);
        for j in 0..i {
            let z = 0.5 * (q[(i, j)] + q[(j, i)].conj());
            q[(i, j)] = z;
            q[(j, i)] = z.conj();
        }
    }
    let q_chol = Cholesky::new(&q)?;
    let log2_det_q = q_chol.log2_det();

    let sm = (m as f64).sqrt();
    let sn = (n as f64).sqrt();
    let a_b = svd.u.scaled(Complex64::new(sm, 0.0));
    let a_r = svd.v.scaled(Complex64::new(sn, 0.0));
    let scale = svd.sigma / sn;
    let zp = ComplexMatrix::from_fn(n, k, |r, j| scale * a_r[r].conj() * ch.h_ru[(r, j)]);

    let approx = ComplexMatrix::outer(&svd.u, &svd.v).scale(Complex64::new(svd.sigma, 0.0));
    let rank1_residual = ch.h_br.sub(&approx).frobenius_norm() / ch.h_br.frobenius_norm();

    Ok(SeparatedChannel {
        q,
        q_chol,
        log2_det_q,
        w1,
        zp,
        a_b,
        a_r,
        scale,
        rank1_residual,
    })
}

impl SeparatedChannel {
    pub fn users(&self) -> usize {
        self.q.rows()
    }

    pub fn ris_elements(&self) -> usize {
        self.zp.rows()
    }

    pub fn q_cholesky(&self) -> &Cholesky {
        &self.q_chol
    }

    /// `log₂|Q|`, the phase-independent part of the rate.
    pub fn log2_det_q(&self) -> f64 {
        self.log2_det_q
    }

    /// Whether `H_br` was rank one to within the factorization tolerance.
    pub fn is_exact(&self) -> bool {
        self.rank1_residual <= FACTOR_TOL
    }

    /// `w1 + Z′ᴴx` for any `x`, unit modulus or not.
    pub(crate) fn compose_w_unchecked(&self, x: &[Complex64]) -> ComplexVector {
        let mut w = self.zp.adjoint_mul_vec(x);
        for (wi, w1i) in w.iter_mut().zip(self.w1.iter()) {
            *wi += w1i;
        }
        w
    }

    /// `wᴴQ⁻¹w` for any `x`.
    pub(crate) fn quadratic_unchecked(&self, x: &[Complex64]) -> f64 {
        self.q_chol.quad_form(&self.compose_w_unchecked(x))
    }

    /// Rate as a function of the quadratic objective value.
    pub fn rate_from_quadratic(&self, q: f64) -> f64 {
        self.log2_det_q + q.ln_1p() / LN_2
    }

    /// Expanded form of the quadratic objective.
    pub fn quadratic_form(&self) -> QuadraticForm {
        let (n, k) = (self.zp.rows(), self.zp.cols());
        // Y = L⁻¹Z′ᴴ (K × N), so B = YᴴY and w2 = Yᴴ L⁻¹w1.
        let zph = self.zp.adjoint();
        let mut y = ComplexMatrix::zeros(k, n);
        for col in 0..n {
            let c = zph.column(col);
            y.set_column(col, &self.q_chol.solve_lower(&c));
        }
        let lw1 = self.q_chol.solve_lower(&self.w1);
        let mut b = y.gram();
        for i in 0..n {
            b[(i, i)] = Complex64::new(b[(i, i)].re, 0.0);
            for j in 0..i {
                b[(j, i)] = b[(i, j)].conj();
            }
        }
        QuadraticForm {
            b,
            w2: y.adjoint_mul_vec(&lw1),
            c: lw1.norm_sqr(),
        }
    }

    fn check_len(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.ris_elements() {
            return Err(Error::Validation(format!(
                "phase vector has {} entries, RIS has {} elements",
                x.len(),
                self.ris_elements()
            )));
        }
        check_unit_modulus(x)
    }
}

pub fn compose_w(sep: &SeparatedChannel, x: &[Complex64]) -> Result<ComplexVector> {
    sep.check_len(x)?;
    Ok(sep.compose_w_unchecked(x))
}

/// `log₂|I + HᴴH|` at unit SNR.
pub fn sum_rate_direct(h: &ComplexMatrix) -> f64 {
    let k = h.cols();
    let mut a = h.gram();
    for i in 0..k {
        a[(i, i)] = Complex64::new(a[(i, i)].re + 1.0, 0.0);
        for j in 0..i {
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    Cholesky::new(&a)
        .expect("I + HᴴH is positive definite for finite H")
        .log2_det()
}

pub fn sum_rate_separated(sep: &SeparatedChannel, x: &[Complex64]) -> Result<f64> {
    Ok(sep.rate_from_quadratic(quadratic_objective(sep, x)?))
}

/// `wᴴQ⁻¹w`.
pub fn quadratic_objective(sep: &SeparatedChannel, x: &[Complex64]) -> Result<f64> {
    sep.check_len(x)?;
    Ok(sep.quadratic_unchecked(x))
}

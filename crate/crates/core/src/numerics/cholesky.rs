use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, FACTOR_TOL};
use crate::error::{Error, Result};

/// Cholesky factor `A = L Lᴴ` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    /// Factors `a`, which must be Hermitian to within `FACTOR_TOL·‖A‖_F`.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Validation(format!(
                "cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let scale = a.frobenius_norm();
        if a.hermitian_defect() > FACTOR_TOL * scale.max(1.0) {
            return Err(Error::Validation("matrix is not Hermitian".into()));
        }
        let n = a.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Domain(format!(
                    "matrix is not positive definite (pivot {j} = {d:.3e})"
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &ComplexMatrix {
        &self.l
    }

    /// `log₂|A|`.
    pub fn log2_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[(i, i)].re.log2()).sum::<f64>()
    }

    /// Forward substitution: `L⁻¹ b`.
    pub fn solve_lower(&self, b: &[Complex64]) -> ComplexVector {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)].re;
        }
        ComplexVector(y)
    }

    /// Back substitution: `L⁻ᴴ b`.
    pub fn solve_upper(&self, b: &[Complex64]) -> ComplexVector {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = s / self.l[(i, i)].re;
        }
        ComplexVector(x)
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[Complex64]) -> ComplexVector {
        let y = self.solve_lower(b);
        self.solve_upper(&y)
    }

    /// `A⁻¹ B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(b.rows(), self.dim());
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            out.set_column(j, &x);
        }
        out
    }

    /// `bᴴ A⁻¹ b`, real and non-negative up to rounding.
    pub fn quad_form(&self, b: &[Complex64]) -> f64 {
        self.solve_lower(b).norm_sqr()
    }
}

/// `log₂|A|` for Hermitian positive-definite `a`.
pub fn logdet_hpd(a: &ComplexMatrix) -> Result<f64> {
    Ok(Cholesky::new(a)?.log2_det())
}

/// Solves `A y = b` for Hermitian positive-definite `a`.
pub fn solve_hpd(a: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector> {
    if b.len() != a.rows() {
        return Err(Error::Validation(format!(
            "rhs length {} does not match matrix order {}",
            b.len(),
            a.rows()
        )));
    }
    Ok(Cholesky::new(a)?.solve(b))
}

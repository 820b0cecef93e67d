use num_complex::Complex64;

use crate::error::Error;
use crate::numerics::{hermitian_max_eigpair, ComplexMatrix, ComplexVector, EigenPair, EIGEN_MAX_ITER};
use crate::phase::PhaseVector;
use crate::separation::SeparatedChannel;

/// Relative gap below which the top two eigenvalues count as tied.
pub const TIE_TOL: f64 = 1e-8;

/// Maximizer of `xᴴZx` over the sphere `‖x‖² = N`, `Z = Z′Q⁻¹Z′ᴴ`.
/// Not a feasible RIS design; see [`lower_bound_phases`].
#[derive(Debug, Clone)]
pub struct RelaxedSolution {
    pub x: ComplexVector,
    /// `λ_max(Z)`; the relaxed optimum of `xᴴZx` is `N·λ_max`.
    pub eigenvalue: f64,
    /// Second eigenvalue of the reduced `K × K` problem (0 when `K = 1`).
    pub second_eigenvalue: f64,
    /// `‖Zx − λx‖ / (λ‖x‖)`, checked after the lift to `N` dimensions.
    pub residual: f64,
    /// `Z′ = 0`: every direction is optimal and `x` is all-ones.
    pub degenerate: bool,
}

impl RelaxedSolution {
    /// Top eigenvalue not separated from the next one; the direction is then
    /// one of many optimal choices.
    pub fn is_tied(&self) -> bool {
        !self.degenerate && self.eigenvalue - self.second_eigenvalue <= TIE_TOL * self.eigenvalue
    }
}

fn eig(a: &ComplexMatrix) -> EigenPair {
    match hermitian_max_eigpair(a, 1e-12, EIGEN_MAX_ITER) {
        Ok(p) => p,
        Err(Error::Convergence {
            eigenvalue,
            eigenvector,
            ..
        }) => EigenPair {
            value: eigenvalue,
            vector: eigenvector,
            iterations: EIGEN_MAX_ITER,
        },
        Err(e) => unreachable!("reduced matrix is Hermitian by construction: {e}"),
    }
}

/// Solves the reduced problem `Q⁻¹Z′ᴴZ′ x′ = λ x′` through the Hermitian
/// form `L⁻¹Z′ᴴZ′L⁻ᴴ` and lifts `x* ∝ Z′x′`.
pub fn relaxed_solution(sep: &SeparatedChannel) -> RelaxedSolution {
    let (n, k) = (sep.zp.rows(), sep.zp.cols());
    let sn = (n as f64).sqrt();
    if sep.zp.frobenius_norm() == 0.0 {
        return RelaxedSolution {
            x: ComplexVector::ones(n),
            eigenvalue: 0.0,
            second_eigenvalue: 0.0,
            residual: 0.0,
            degenerate: true,
        };
    }
    let chol = sep.q_cholesky();
    // Y = L⁻¹Z′ᴴ, S = YYᴴ.
    let zph = sep.zp.adjoint();
    let mut y = ComplexMatrix::zeros(k, n);
    for col in 0..n {
        y.set_column(col, &chol.solve_lower(&zph.column(col)));
    }
    let mut s = y.matmul(&y.adjoint());
    hermitize(&mut s);
    let top = eig(&s);
    let second = if k > 1 {
        let mut deflated = s.sub(&ComplexMatrix::outer(&top.vector, &top.vector).scale(Complex64::new(top.value, 0.0)));
        hermitize(&mut deflated);
        eig(&deflated).value.max(0.0)
    } else {
        0.0
    };

    let xp = chol.solve_upper(&top.vector);
    let mut x = sep.zp.mul_vec(&xp);
    let norm = x.norm();
    for z in x.iter_mut() {
        *z *= sn / norm;
    }
    // Z x = Yᴴ(Y x).
    let zx = y.adjoint_mul_vec(&y.mul_vec(&x));
    let residual = zx
        .iter()
        .zip(x.iter())
        .map(|(a, b)| (a - top.value * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / (top.value * sn);
    RelaxedSolution {
        x,
        eigenvalue: top.value,
        second_eigenvalue: second,
        residual,
        degenerate: false,
    }
}

fn hermitize(a: &mut ComplexMatrix) {
    for i in 0..a.rows() {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            let z = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
}

/// Feasible design from the relaxed solution.
#[derive(Debug, Clone)]
pub struct LowerBoundDesign {
    pub phases: PhaseVector,
    pub relaxed: RelaxedSolution,
    /// Entries of the relaxed solution too small to carry a phase; set to 1.
    pub zero_entries: Vec<usize>,
}

/// Element-wise `e^{j∠x_i}`, the closest unit-modulus vector in every
/// `ℓ_p` sense. Entries with `|x_i| ≤ 1e-12·max|x|` map to 1 and are listed.
pub fn project_unit_modulus(x: &[Complex64]) -> (PhaseVector, Vec<usize>) {
    let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut zeros = Vec::new();
    let entries = x
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let r = z.norm();
            if r <= 1e-12 * scale || r == 0.0 {
                zeros.push(i);
                Complex64::new(1.0, 0.0)
            } else {
                z / r
            }
        })
        .collect();
    let phases = PhaseVector::new(entries).expect("projection yields unit-modulus entries");
    (phases, zeros)
}

pub fn lower_bound_phases(sep: &SeparatedChannel) -> LowerBoundDesign {
    let relaxed = relaxed_solution(sep);
    let (phases, zero_entries) = project_unit_modulus(&relaxed.x);
    LowerBoundDesign {
        phases,
        relaxed,
        zero_entries,
    }
}

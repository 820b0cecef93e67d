//! Gradient-ascent benchmark over the RIS phase angles.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{assemble_global, ChannelSet};
use crate::numerics::{cis, Cholesky};
use crate::phase::PhaseVector;
use crate::separation::{sum_rate_direct, SeparatedChannel};

/// Sum-rate as a smooth function of the angles `θ`, with `x = e^{jθ}`.
pub trait PhaseObjective {
    fn dim(&self) -> usize;

    fn value(&self, theta: &[f64]) -> f64;

    /// Value and gradient.
    fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>);
}

fn phases(theta: &[f64]) -> Vec<Complex64> {
    theta.iter().map(|t| cis(*t)).collect()
}

/// `log₂|Q| + log₂(1 + wᴴQ⁻¹w)`.
pub struct SeparatedObjective<'a> {
    pub sep: &'a SeparatedChannel,
}

impl PhaseObjective for SeparatedObjective<'_> {
    fn dim(&self) -> usize {
        self.sep.ris_elements()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.sep.rate_from_quadratic(self.sep.quadratic_unchecked(&phases(theta)))
    }

    fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let x = phases(theta);
        let w = self.sep.compose_w_unchecked(&x);
        let y = self.sep.q_cholesky().solve(&w);
        let q = w.dot(&y).re;
        // ∂q/∂θ_n = −2 Im{x_n conj((Z′y)_n)}
        let zy = self.sep.zp.mul_vec(&y);
        let factor = 1.0 / ((1.0 + q) * LN_2);
        let grad = x
            .iter()
            .zip(zy.iter())
            .map(|(xn, zn)| -2.0 * (xn * zn.conj()).im * factor)
            .collect();
        (self.sep.rate_from_quadratic(q), grad)
    }
}

/// `log₂|I + HᴴH|` on the assembled channel, valid for any `H_br`.
pub struct DirectObjective<'a> {
    pub ch: &'a ChannelSet,
}

impl PhaseObjective for DirectObjective<'_> {
    fn dim(&self) -> usize {
        self.ch.ris_elements()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let h = assemble_global(self.ch, &phases(theta)).expect("angle vector has RIS length");
        sum_rate_direct(&h)
    }

    fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let h = assemble_global(self.ch, &phases(theta)).expect("angle vector has RIS length");
        let k = h.cols();
        let mut a = h.gram();
        for i in 0..k {
            a[(i, i)] = Complex64::new(a[(i, i)].re + 1.0, 0.0);
            for j in 0..i {
                a[(j, i)] = a[(i, j)].conj();
            }
        }
        let chol = Cholesky::new(&a).expect("I + HᴴH is positive definite");
        // X = A⁻¹Hᴴ (K × M), C = H_brᴴ Xᴴ (N × K).
        let x = chol.solve_matrix(&h.adjoint());
        let c = self.ch.h_br.adjoint_matmul(&x.adjoint());
        let grad = theta
            .iter()
            .enumerate()
            .map(|(n, t)| {
                let mut s = Complex64::new(0.0, 0.0);
                for kk in 0..k {
                    s += self.ch.h_ru[(n, kk)] * c[(n, kk)].conj();
                }
                2.0 / LN_2 * (cis(-t) * s).im
            })
            .collect();
        (chol.log2_det(), grad)
    }
}

/// Result of one ascent run.
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Gradient ascent with Barzilai-Borwein initial steps and Armijo
/// backtracking. The objective never decreases between iterates.
pub fn gradient_ascent(obj: &dyn PhaseObjective, theta0: Vec<f64>, steps: usize) -> AscentResult {
    const ARMIJO: f64 = 1e-4;
    let mut theta = theta0;
    let (mut f, mut g) = obj.value_and_gradient(&theta);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    for _ in 0..steps {
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2.sqrt() <= 1e-12 * (1.0 + f.abs()) {
            break;
        }
        let mut alpha = match &prev {
            Some((s, y)) => {
                let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
                let ss: f64 = s.iter().map(|a| a * a).sum();
                if sy < 0.0 {
                    // Ascent: curvature along s is negative.
                    ss / -sy
                } else {
                    0.1 / g2.sqrt()
                }
            }
            None => 0.1 / g2.sqrt(),
        };
        alpha = alpha.min(10.0 / g2.sqrt());
        let mut accepted = None;
        for _ in 0..50 {
            let cand: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t + alpha * gi).collect();
            let fc = obj.value(&cand);
            if fc >= f + ARMIJO * alpha * g2 {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let (fc2, gc) = obj.value_and_gradient(&cand);
        debug_assert!((fc2 - fc).abs() <= 1e-9 * fc.abs().max(1.0));
        let s: Vec<f64> = cand.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        prev = Some((s, y));
        let gain = fc - f;
        theta = cand;
        f = fc;
        g = gc;
        iterations += 1;
        if gain <= 1e-13 * (1.0 + f.abs()) {
            break;
        }
    }
    AscentResult {
        theta,
        value: f,
        iterations,
    }
}

/// Best ascent result over the given start points.
pub fn numerical_baseline_from(obj: &dyn PhaseObjective, starts: &[PhaseVector], steps: usize) -> (PhaseVector, f64) {
    assert!(!starts.is_empty(), "need at least one start point");
    let mut best: Option<AscentResult> = None;
    for x0 in starts {
        let r = gradient_ascent(obj, x0.angles(), steps);
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("non-empty starts");
    let theta: Vec<f64> = best.theta.iter().map(|t| t.rem_euclid(TAU)).collect();
    (PhaseVector::from_angles(&theta), best.value)
}

/// All-ones start plus `restarts − 1` uniform random starts.
pub fn numerical_baseline<R: Rng + ?Sized>(
    obj: &dyn PhaseObjective,
    restarts: usize,
    steps: usize,
    rng: &mut R,
) -> (PhaseVector, f64) {
    assert!(restarts >= 1, "need at least one restart");
    let n = obj.dim();
    let mut starts = vec![PhaseVector::ones(n)];
    for _ in 1..restarts {
        starts.push(crate::phase::random_phases(rng, n));
    }
    numerical_baseline_from(obj, &starts, steps)
}

/// Largest relative deviation between the analytic gradient and central
/// differences, normalized by the gradient's max-norm.
pub fn gradient_check(obj: &dyn PhaseObjective, theta: &[f64], h: f64) -> f64 {
    let (_, g) = obj.value_and_gradient(theta);
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut t = theta.to_vec();
    let mut worst = 0.0f64;
    for i in 0..t.len() {
        let orig = t[i];
        t[i] = orig + h;
        let fp = obj.value(&t);
        t[i] = orig - h;
        let fm = obj.value(&t);
        t[i] = orig;
        let fd = (fp - fm) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / scale);
    }
    worst
}

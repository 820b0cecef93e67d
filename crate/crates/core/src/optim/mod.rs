//! RIS phase designs and sum-rate bounds.
//!
//! All designs hold conjugated coefficients `x = e^{-jφ}` and are built from
//! the separated form of a drop. The relaxed solution and the upper bound
//! are not achievable; everything else returns a feasible [`PhaseVector`].
//!
//! [`PhaseVector`]: crate::phase::PhaseVector

mod ao;
mod baseline;
mod bounds;
mod relaxed;

pub use ao::{ao_optimize, ao_optimize_form, AoTrace, AO_EPSILON, AO_MAX_SWEEPS};
pub use baseline::{
    gradient_ascent, gradient_check, numerical_baseline, numerical_baseline_from, AscentResult, DirectObjective,
    PhaseObjective, SeparatedObjective,
};
pub use bounds::{quantize_index, quantize_phases, upper_bound, upper_bound_form};
pub use relaxed::{lower_bound_phases, project_unit_modulus, relaxed_solution, LowerBoundDesign, RelaxedSolution, TIE_TOL};
pub use crate::phase::random_phases;

//! Monte-Carlo experiments over random user drops.
//!
//! Every drop gets its own seed derived from the master seed and the drop
//! index, so results do not depend on how drops are scheduled across
//! threads. Reported rates are always `log₂|I + HᴴH|` on the true channel;
//! only the upper bound comes from the separated form.

mod calibrate;
mod figures;
mod output;

pub use calibrate::{average_channel_power_db, calibrate_reference_power, calibration_baseline, CalibrationBracket};
pub use figures::{fig2, fig3, fig4, Fig4Row, SweepPoint, FIG2_K, FIG2_N, FIG3_K, FIG3_N, FIG4_K, FIG4_N};
pub use output::{emit_csv, format_sig9, write_fig4_csv, write_records, write_summary_csv};

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{assemble_global, generate_channel_set, ChannelSet};
use crate::config::{Method, ScenarioConfig};
use crate::error::{Error, Result};
use crate::optim::{
    ao_optimize_form, lower_bound_phases, numerical_baseline, quantize_phases, random_phases, upper_bound_form,
    AoTrace, DirectObjective, PhaseObjective, SeparatedObjective,
};
use crate::phase::PhaseVector;
use crate::separation::{separate, sum_rate_direct};

/// Absolute slack, in bits, allowed when checking achievable rates against
/// the upper bound.
pub const BOUND_SLACK: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ index.wrapping_mul(0xd605_bbb5_8c8a_bbfd))
}

// Independent streams inside one drop, so adding a method never changes the
// channel or another method's draws.
const STREAM_CHANNEL: u64 = 0;
const STREAM_RANDOM: u64 = 1;
const STREAM_BASELINE: u64 = 2;

/// One method evaluated on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub drop: usize,
    pub method: Method,
    pub sum_rate_bits: f64,
    pub wall_time_s: f64,
    /// AO sweeps; `None` for other methods.
    pub sweeps: Option<usize>,
    pub seed: u64,
}

/// AO convergence history of one drop, in separated-rate bits per sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AoHistory {
    pub drop: usize,
    pub seed: u64,
    pub trace: AoTrace,
    /// `log₂|Q| + log₂(1 + q)` for each entry of `trace.objective`.
    pub rates: Vec<f64>,
}

/// Mean and standard error of one method over all drops.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Drop-major, methods in configured order.
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<MethodSummary>,
    /// One entry per drop when AO ran.
    pub ao_histories: Vec<AoHistory>,
}

impl ExperimentOutput {
    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    /// Per-drop rates of one method, in drop order.
    pub fn rates(&self, method: Method) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.sum_rate_bits)
            .collect()
    }
}

struct DropOutcome {
    records: Vec<ExperimentRecord>,
    ao: Option<AoHistory>,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64()))
}

fn rate_of(ch: &ChannelSet, x: &PhaseVector) -> Result<f64> {
    Ok(sum_rate_direct(&assemble_global(ch, x)?))
}

/// Runs every configured method on drop `drop`.
fn run_drop(config: &ScenarioConfig, drop: usize) -> Result<DropOutcome> {
    let seed = derive_seed(config.seed, drop as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_CHANNEL));
    let ch = generate_channel_set(&mut rng, config)?;
    let sep = separate(&ch)?;
    let qf = sep.quadratic_form();
    let n = ch.ris_elements();

    let mut records = Vec::with_capacity(config.methods.len());
    let mut ao = None;
    let mut lower_bound: Option<PhaseVector> = None;
    for &method in &config.methods {
        let mut sweeps = None;
        let (rate, wall) = match method {
            Method::Random => timed(|| {
                let mut r = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_RANDOM));
                rate_of(&ch, &random_phases(&mut r, n))
            })?,
            Method::LowerBound | Method::LowerBoundQuantized => timed(|| {
                let lb = match &lower_bound {
                    Some(x) => x.clone(),
                    None => {
                        let x = lower_bound_phases(&sep).phases;
                        lower_bound = Some(x.clone());
                        x
                    }
                };
                let x = if method == Method::LowerBound {
                    lb
                } else {
                    quantize_phases(&lb, config.quantizer_bits)
                };
                rate_of(&ch, &x)
            })?,
            Method::Ao => {
                let ((x, trace), wall) = timed(|| {
                    ao_optimize_form(&qf, config.ao_epsilon, config.ao_max_sweeps, &PhaseVector::ones(n))
                })?;
                let rate = rate_of(&ch, &x)?;
                sweeps = Some(trace.sweeps);
                let rates = trace.objective.iter().map(|q| sep.rate_from_quadratic(*q)).collect();
                ao = Some(AoHistory {
                    drop,
                    seed,
                    trace,
                    rates,
                });
                (rate, wall)
            }
            Method::Numerical => timed(|| {
                let mut r = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_BASELINE));
                let separated = SeparatedObjective { sep: &sep };
                let direct = DirectObjective { ch: &ch };
                // The separated form is exact only for a rank-one H_br.
                let obj: &dyn PhaseObjective = if ch.kappa_br.is_pure_los() { &separated } else { &direct };
                let (x, _) = numerical_baseline(obj, config.baseline_restarts, config.baseline_steps, &mut r);
                rate_of(&ch, &x)
            })?,
            Method::UpperBound => timed(|| Ok(upper_bound_form(&sep, &qf)))?,
        };
        records.push(ExperimentRecord {
            drop,
            method,
            sum_rate_bits: rate,
            wall_time_s: if config.record_timing { wall } else { 0.0 },
            sweeps,
            seed,
        });
    }

    if ch.kappa_br.is_pure_los() {
        if let Some(ub) = records.iter().find(|r| r.method == Method::UpperBound) {
            let bound = ub.sum_rate_bits;
            for r in &records {
                if r.method.is_achievable() && r.sum_rate_bits > bound + BOUND_SLACK {
                    return Err(Error::BoundViolation {
                        drop,
                        seed,
                        method: r.method.name().to_string(),
                        rate: r.sum_rate_bits,
                        bound,
                    });
                }
            }
        }
    }
    Ok(DropOutcome { records, ao })
}

/// Runs `config.trials` drops on the current rayon pool.
pub fn run_experiment(config: &ScenarioConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let outcomes: Vec<Result<DropOutcome>> = (0..config.trials)
        .into_par_iter()
        .map(|d| run_drop(config, d))
        .collect();
    let mut records = Vec::with_capacity(config.trials * config.methods.len());
    let mut ao_histories = Vec::new();
    for outcome in outcomes {
        let o = outcome?;
        records.extend(o.records);
        ao_histories.extend(o.ao);
    }
    let summary = summarize(&records, &config.methods);
    Ok(ExperimentOutput {
        records,
        summary,
        ao_histories,
    })
}

pub fn summarize(records: &[ExperimentRecord], methods: &[Method]) -> Vec<MethodSummary> {
    methods
        .iter()
        .map(|&method| {
            let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.method == method).collect();
            let count = rows.len();
            let n = count as f64;
            let mean = rows.iter().map(|r| r.sum_rate_bits).sum::<f64>() / n;
            let var = if count > 1 {
                rows.iter().map(|r| (r.sum_rate_bits - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            MethodSummary {
                method,
                mean,
                std_err: (var / n).sqrt(),
                count,
                mean_wall_time_s: rows.iter().map(|r| r.wall_time_s).sum::<f64>() / n,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KFactor;

    fn small(trials: usize) -> ScenarioConfig {
        ScenarioConfig {
            trials,
            baseline_steps: 50,
            ..ScenarioConfig::with_sizes(8, 16, 2)
        }
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(derive_seed(7, 3), seeds[3]);
        assert_ne!(derive_seed(8, 3), seeds[3]);
    }

    #[test]
    fn zero_trials_rejected_before_work() {
        assert!(matches!(run_experiment(&small(0)), Err(Error::Config(_))));
    }

    #[test]
    fn records_are_drop_major_in_method_order() {
        let cfg = ScenarioConfig {
            methods: vec![Method::UpperBound, Method::Random, Method::Ao],
            ..small(3)
        };
        let out = run_experiment(&cfg).unwrap();
        let order: Vec<(usize, Method)> = out.records.iter().map(|r| (r.drop, r.method)).collect();
        let want: Vec<(usize, Method)> = (0..3)
            .flat_map(|d| cfg.methods.iter().map(move |m| (d, *m)))
            .collect();
        assert_eq!(order, want);
        assert_eq!(out.ao_histories.len(), 3);
        assert!(out.records.iter().all(|r| r.wall_time_s == 0.0));
        assert!(out.records.iter().all(|r| r.sweeps.is_some() == (r.method == Method::Ao)));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small(8);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_experiment(&cfg)).unwrap();
        let b = four.install(|| run_experiment(&cfg)).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn adding_methods_keeps_other_results() {
        let a = run_experiment(&ScenarioConfig {
            methods: vec![Method::Random],
            ..small(4)
        })
        .unwrap();
        let b = run_experiment(&small(4)).unwrap();
        assert_eq!(a.rates(Method::Random), b.rates(Method::Random));
    }

    #[test]
    fn sandwich_holds_for_pure_los() {
        let out = run_experiment(&small(20)).unwrap();
        let ub = out.rates(Method::UpperBound);
        for m in Method::ALL.iter().filter(|m| m.is_achievable()) {
            for (r, u) in out.rates(*m).iter().zip(&ub) {
                assert!(*r >= 0.0 && r <= &(u + BOUND_SLACK));
            }
        }
    }

    #[test]
    fn scattered_ris_link_runs_direct_baseline() {
        let cfg = ScenarioConfig {
            kappa_br: KFactor::Finite(1.0),
            ..small(4)
        };
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 4 * Method::ALL.len());
        assert!(out.records.iter().all(|r| r.sum_rate_bits.is_finite()));
    }

    #[test]
    fn summary_statistics() {
        let rec = |drop, v| ExperimentRecord {
            drop,
            method: Method::Random,
            sum_rate_bits: v,
            wall_time_s: 0.0,
            sweeps: None,
            seed: 0,
        };
        let s = summarize(&[rec(0, 1.0), rec(1, 2.0), rec(2, 3.0)], &[Method::Random]);
        assert_eq!(s[0].count, 3);
        assert!((s[0].mean - 2.0).abs() < 1e-15);
        assert!((s[0].std_err - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}

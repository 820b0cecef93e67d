//! Parameter sweeps behind the three result figures.

use super::{run_experiment, MethodSummary};
use crate::config::{ArrayGeometry, KFactor, Method, ScenarioConfig};
use crate::error::Result;

pub const FIG2_N: [usize; 5] = [16, 36, 64, 100, 144];
pub const FIG2_K: [usize; 2] = [2, 5];
pub const FIG3_N: [usize; 2] = [64, 144];
pub const FIG3_K: [usize; 5] = [2, 3, 4, 5, 6];
pub const FIG4_N: [usize; 3] = [100, 121, 144];
pub const FIG4_K: [usize; 2] = [2, 4];

/// Summary statistics at one point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub n: usize,
    pub k: usize,
    pub kappa_br: KFactor,
    pub summary: Vec<MethodSummary>,
}

/// AO convergence of one drop, separated-rate bits per sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub n: usize,
    pub k: usize,
    pub drop: usize,
    pub seed: u64,
    pub rates: Vec<f64>,
}

fn at(base: &ScenarioConfig, n: usize, k: usize, kappa_br: KFactor) -> ScenarioConfig {
    ScenarioConfig {
        ris: ArrayGeometry::near_square(n, base.ris.spacing),
        users: k,
        kappa_br,
        ..base.clone()
    }
}

fn sweep(base: &ScenarioConfig, points: impl IntoIterator<Item = (usize, usize, KFactor)>) -> Result<Vec<SweepPoint>> {
    points
        .into_iter()
        .map(|(n, k, kb)| {
            let out = run_experiment(&at(base, n, k, kb))?;
            Ok(SweepPoint {
                n,
                k,
                kappa_br: kb,
                summary: out.summary,
            })
        })
        .collect()
}

/// Rate versus RIS size: `κ_d = κ_ru = 1`, pure-LOS RIS-BS link.
pub fn fig2(base: &ScenarioConfig, n_list: &[usize], k_list: &[usize]) -> Result<Vec<SweepPoint>> {
    let base = ScenarioConfig {
        kappa_d: KFactor::Finite(1.0),
        kappa_ru: KFactor::Finite(1.0),
        ..base.clone()
    };
    let points: Vec<_> = k_list
        .iter()
        .flat_map(|&k| n_list.iter().map(move |&n| (n, k, KFactor::PureLos)))
        .collect();
    sweep(&base, points)
}

/// Rate versus user count for a pure-LOS and a scattered RIS-BS link.
pub fn fig3(base: &ScenarioConfig, n_list: &[usize], k_list: &[usize]) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::new();
    for kb in [KFactor::PureLos, KFactor::Finite(1.0)] {
        for &n in n_list {
            for &k in k_list {
                points.push((n, k, kb));
            }
        }
    }
    sweep(base, points)
}

/// AO convergence histories for every drop at each `(N, K)`.
pub fn fig4(base: &ScenarioConfig, n_list: &[usize], k_list: &[usize]) -> Result<Vec<Fig4Row>> {
    let mut rows = Vec::new();
    for &k in k_list {
        for &n in n_list {
            let cfg = ScenarioConfig {
                methods: vec![Method::Ao],
                ..at(base, n, k, base.kappa_br)
            };
            let out = run_experiment(&cfg)?;
            rows.extend(out.ao_histories.into_iter().map(|h| Fig4Row {
                n,
                k,
                drop: h.drop,
                seed: h.seed,
                rates: h.rates,
            }));
        }
    }
    Ok(rows)
}

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ExperimentRecord, Fig4Row, SweepPoint};
use crate::error::{Error, Result};

/// Plain decimal with 9 significant digits; `0` for zero.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.9999999996 -> 10.0...).
    let all: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = all.trim_start_matches('0').len();
    if digits > 9 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-drop records as CSV text.
pub fn write_records(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("drop,method,sum_rate_bits,wall_time_s,sweeps,seed\n");
    for r in records {
        let sweeps = r.sweeps.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.drop,
            r.method.name(),
            format_sig9(r.sum_rate_bits),
            format_sig9(r.wall_time_s),
            sweeps,
            r.seed
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    write_file(path, &write_records(records))
}

/// One row per (sweep point, method).
pub fn write_summary_csv(points: &[SweepPoint], path: &Path) -> Result<()> {
    let mut out = String::from("n,k,kappa_br,method,mean_bits,std_err_bits,trials,mean_wall_time_s\n");
    for p in points {
        for s in &p.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.n,
                p.k,
                p.kappa_br,
                s.method.name(),
                format_sig9(s.mean),
                format_sig9(s.std_err),
                s.count,
                format_sig9(s.mean_wall_time_s)
            )
            .unwrap();
        }
    }
    write_file(path, &out)
}

/// AO separated rate after each sweep, padded with the final value so all
/// rows have the same width.
pub fn write_fig4_csv(rows: &[Fig4Row], path: &Path) -> Result<()> {
    let width = rows.iter().map(|r| r.rates.len()).max().unwrap_or(1);
    let mut out = String::from("n,k,drop,seed,sweeps");
    for s in 0..width {
        write!(out, ",sweep_{s}").unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{},{},{},{},{}", r.n, r.k, r.drop, r.seed, r.rates.len() - 1).unwrap();
        let last = *r.rates.last().expect("trace holds the start point");
        for s in 0..width {
            write!(out, ",{}", format_sig9(r.rates.get(s).copied().unwrap_or(last))).unwrap();
        }
        out.push('\n');
    }
    write_file(path, &out)
}

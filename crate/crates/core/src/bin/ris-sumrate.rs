use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_sumrate::config::{parse_methods, KFactor, Method, ScenarioConfig};
use ris_sumrate::harness::{
    self, calibrate_reference_power, calibration_baseline, emit_csv, format_sig9, write_fig4_csv, write_summary_csv,
    CalibrationBracket, MethodSummary, SweepPoint,
};
use ris_sumrate::{Error, Result};

/// Sum-rate experiments for a multi-user RIS-aided uplink.
#[derive(Parser)]
#[command(name = "ris-sumrate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate versus RIS size (pure-LOS RIS-BS link).
    Fig2(SweepArgs),
    /// Rate versus number of users, pure-LOS and scattered RIS-BS link.
    Fig3(SweepArgs),
    /// AO convergence per sweep.
    Fig4(SweepArgs),
    /// Run one scenario and write per-drop records.
    Run(Common),
    /// Find the reference power giving a target average channel power.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; omitted keys take the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path. Defaults to <command>.csv in $RIS_SUMRATE_OUT_DIR
    /// (or the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated list, e.g. `random,lower_bound,ao`.
    #[arg(long)]
    methods: Option<String>,
    /// Record measured wall times instead of zeros.
    #[arg(long)]
    timing: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated RIS sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Comma-separated user counts.
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    common: Common,
    /// Target average per-antenna channel power, dB.
    #[arg(long, default_value_t = 0.0)]
    target_db: f64,
    #[arg(long, default_value_t = 0.0)]
    lo_db: f64,
    #[arg(long, default_value_t = 100.0)]
    hi_db: f64,
}

impl Common {
    fn scenario(&self, base: ScenarioConfig) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => base,
        };
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = &self.methods {
            cfg.methods = parse_methods(m)?;
        }
        if self.timing {
            cfg.record_timing = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_path(&self, default_name: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            let dir = std::env::var_os("RIS_SUMRATE_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            dir.join(default_name)
        })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Error::Config("--threads must be >= 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
    }
}

fn print_summary(title: &str, summary: &[MethodSummary]) {
    println!("{title}");
    for s in summary {
        println!(
            "  {:<15} mean {:>12} bits  (s.e. {}, {} drops)",
            s.method.name(),
            format_sig9(s.mean),
            format_sig9(s.std_err),
            s.count
        );
    }
}

fn print_points(points: &[SweepPoint]) {
    for p in points {
        print_summary(&format!("N={} K={} kappa_br={}", p.n, p.k, p.kappa_br), &p.summary);
    }
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.scenario(ScenarioConfig::default())?;
            let out = c.pool()?.install(|| harness::run_experiment(&cfg))?;
            let path = c.out_path("run.csv");
            emit_csv(&out.records, &path)?;
            print_summary(&format!("{} drops, seed {}", cfg.trials, cfg.seed), &out.summary);
            wrote(&path);
        }
        Command::Fig2(a) => {
            let cfg = a.common.scenario(ScenarioConfig::default())?;
            let n = a.n_list.unwrap_or_else(|| harness::FIG2_N.to_vec());
            let k = a.k_list.unwrap_or_else(|| harness::FIG2_K.to_vec());
            let pts = a.common.pool()?.install(|| harness::fig2(&cfg, &n, &k))?;
            let path = a.common.out_path("fig2.csv");
            write_summary_csv(&pts, &path)?;
            print_points(&pts);
            wrote(&path);
        }
        Command::Fig3(a) => {
            let cfg = a.common.scenario(ScenarioConfig::default())?;
            let n = a.n_list.unwrap_or_else(|| harness::FIG3_N.to_vec());
            let k = a.k_list.unwrap_or_else(|| harness::FIG3_K.to_vec());
            let pts = a.common.pool()?.install(|| harness::fig3(&cfg, &n, &k))?;
            let path = a.common.out_path("fig3.csv");
            write_summary_csv(&pts, &path)?;
            print_points(&pts);
            wrote(&path);
        }
        Command::Fig4(a) => {
            let cfg = a.common.scenario(ScenarioConfig {
                methods: vec![Method::Ao],
                ..ScenarioConfig::default()
            })?;
            let n = a.n_list.unwrap_or_else(|| harness::FIG4_N.to_vec());
            let k = a.k_list.unwrap_or_else(|| harness::FIG4_K.to_vec());
            let rows = a.common.pool()?.install(|| harness::fig4(&cfg, &n, &k))?;
            let path = a.common.out_path("fig4.csv");
            write_fig4_csv(&rows, &path)?;
            println!("{} AO traces", rows.len());
            wrote(&path);
        }
        Command::Calibrate(a) => {
            let cfg = a.common.scenario(calibration_baseline())?;
            let bracket = CalibrationBracket {
                lo_db: a.lo_db,
                hi_db: a.hi_db,
            };
            let p = a
                .common
                .pool()?
                .install(|| calibrate_reference_power(&cfg, a.target_db, cfg.trials, bracket))?;
            let kd = |k: KFactor| k.to_string();
            println!(
                "reference power {:.2} dB gives {} dB average channel power \
                 (M={}, N={}, K={}, kappa_d={}, kappa_ru={}, {} drops)",
                p,
                a.target_db,
                cfg.bs.elements(),
                cfg.ris.elements(),
                cfg.users,
                kd(cfg.kappa_d),
                kd(cfg.kappa_ru),
                cfg.trials
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

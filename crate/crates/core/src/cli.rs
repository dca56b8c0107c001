//! Command-line front end: load a config or preset, apply overrides, run
//! every scenario and write the result files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::config::{self, ExperimentConfig, RopSpec};
use crate::error::{Error, Result};
use crate::experiment::{emit_results, run_sweep, BerCurve, CurveSensitivity, Scenario, SensitivityReport};
use crate::shaping::ShapedDistribution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Probabilistically shaped PAM-8 IM/DD link simulator.
#[derive(Debug, Parser)]
#[command(name = "pamshape", version, about)]
pub struct Cli {
    /// TOML experiment description.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration: paper-b2b, paper-5km, desk-scale, desk-scale-5km.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Base seed of the sweep (overrides sweep.seed).
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory (overrides output.dir).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// ROP points in dBm: `a,b,c` or `START:STEP:STOP`.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub rop: Option<String>,
    /// Dotted-path override, e.g. `--set link.pd.bw_ghz=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print the resolved configuration and scenarios without running.
    #[arg(long)]
    pub dry_run: bool,
}

/// Builds the validated configuration from the flags.
pub fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let base = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            config::parse_config_with_overrides(&text, &cli.overrides)?
        }
        (None, Some(name)) => config::preset(name)?.with_overrides(&cli.overrides)?,
        (None, None) => return Err(Error::Config("one of --config or --preset is required".into())),
    };
    let mut cfg = base;
    if let Some(seed) = cli.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(rop) = &cli.rop {
        config::parse_rop(rop)?;
        cfg.sweep.rop = RopSpec::Text(rop.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Everything a run produced, including scenarios that failed.
#[derive(Debug)]
pub struct RunOutcome {
    pub curves: Vec<BerCurve>,
    pub report: SensitivityReport,
    /// Scenarios whose sweep failed, with the reason.
    pub failures: Vec<(String, String)>,
}

impl RunOutcome {
    /// True when every scenario ran and reached the threshold.
    pub fn complete(&self) -> bool {
        self.failures.is_empty() && self.report.curves.iter().all(|c| c.sensitivity_dbm.is_some())
    }
}

/// Sweeps every scenario in order and writes the result files, keeping the
/// curves of scenarios that succeeded when others fail.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let scenarios = cfg.scenarios()?;
    let rops = cfg.rops()?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let echo = dir.join("config.toml");
    fs::write(&echo, cfg.to_toml_string()?).map_err(|e| Error::io(echo, e))?;

    let mut curves = Vec::new();
    let mut failures = Vec::new();
    for s in &scenarios {
        let t = Instant::now();
        match run_sweep(s, &rops, cfg.sweep.n_symbols, cfg.sweep.seed) {
            Ok(c) => {
                log::info!("{}: {} points in {:.1?}", s.label, c.points.len(), t.elapsed());
                curves.push(c);
            }
            Err(e) => {
                log::error!("{}: {e}", s.label);
                failures.push((s.label.clone(), e.to_string()));
            }
        }
    }
    let mut report = SensitivityReport::from_curves(&curves, cfg.sweep.threshold_ber);
    // Failed scenarios still get a summary row.
    for (label, err) in &failures {
        report.curves.push(CurveSensitivity { label: label.clone(), sensitivity_dbm: None, error: Some(err.clone()) });
    }
    emit_results(&curves, &report, dir)?;
    Ok(RunOutcome { curves, report, failures })
}

/// Human-readable table of label, rate point and sensitivity, with the gain
/// over the first uniform scenario.
pub fn summary_table(scenarios: &[Scenario], report: &SensitivityReport) -> String {
    let reference = scenarios.iter().find(|s| s.distribution.is_uniform()).and_then(|s| report.get(&s.label));
    let mut out = String::new();
    let _ =
        writeln!(out, "{:<24} {:>8} {:>8} {:>6} {:>12} {:>9}", "label", "GBd", "H", "alpha", "sens [dBm]", "gain [dB]");
    for c in &report.curves {
        let s = scenarios.iter().find(|s| s.label == c.label);
        let (baud, h, alpha) = match s {
            Some(s) => {
                (format!("{:.2}", s.baud() / 1e9), format!("{:.4}", s.plan.entropy), alpha_text(&s.distribution))
            }
            None => ("-".into(), "-".into(), "-".into()),
        };
        let (sens, gain) = match c.sensitivity_dbm {
            Some(v) => (format!("{v:.2}"), reference.map(|r| format!("{:+.2}", r - v)).unwrap_or_else(|| "-".into())),
            None => ("n/a".into(), "-".into()),
        };
        let _ = writeln!(out, "{:<24} {baud:>8} {h:>8} {alpha:>6} {sens:>12} {gain:>9}", c.label);
    }
    for c in report.curves.iter().filter(|c| c.error.is_some()) {
        let _ = writeln!(out, "  {}: {}", c.label, c.error.as_deref().unwrap_or_default());
    }
    out
}

fn alpha_text(d: &ShapedDistribution) -> String {
    if d.is_uniform() {
        "-".into()
    } else {
        format!("{}", d.alpha())
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if cli.dry_run {
        return match (cfg.to_toml_string(), cfg.scenarios()) {
            (Ok(text), Ok(scenarios)) => {
                print!("{text}");
                for s in scenarios {
                    println!("# {} H={:.4} AWG={} GSa/s", s.label, s.plan.entropy, s.awg_rate_hz / 1e9);
                }
                EXIT_OK
            }
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        };
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    let outcome = match pool.install(|| execute(&cfg)) {
        Ok(o) => o,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let scenarios = cfg.scenarios().unwrap_or_default();
    print!("{}", summary_table(&scenarios, &outcome.report));
    println!("results in {}", cfg.output.dir.display());
    if outcome.complete() {
        EXIT_OK
    } else {
        eprintln!("error: some scenarios failed or never crossed BER {:e}", cfg.sweep.threshold_ber);
        EXIT_RUNTIME
    }
}

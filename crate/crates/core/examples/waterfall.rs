//! Short desk-scale BER waterfall: uniform PAM-8 against cap-shaped PAM-8
//! at the same net rate, with sensitivity at the HD-FEC threshold.
//!
//! cargo run --release --example waterfall [OUT_DIR]

use std::path::PathBuf;

use pamshape::config::preset;
use pamshape::experiment::{emit_results, run_sweep, SensitivityReport};
use pamshape::HD_FEC_THRESHOLD;

pub fn run_in(out: PathBuf) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = preset("desk-scale")?;
    let scenarios = cfg.scenarios()?;
    let rops = [-15.0, -13.0, -11.0, -9.0, -7.0];
    let mut curves = Vec::new();
    for label in ["uniform-14.2GBd-b2b", "cap-17GBd-a5-b2b"] {
        let s = scenarios.iter().find(|s| s.label == label).ok_or("missing scenario")?;
        let curve = run_sweep(s, &rops, 20_000, 3)?;
        for p in &curve.points {
            println!("{label:>22} {:>6.1} dBm  BER {:.3e}", p.rop_dbm, p.ber);
        }
        curves.push(curve);
    }
    let report = SensitivityReport::from_curves(&curves, HD_FEC_THRESHOLD);
    for c in &report.curves {
        match c.sensitivity_dbm {
            Some(v) => println!("{}: {v:.2} dBm", c.label),
            None => println!("{}: {}", c.label, c.error.as_deref().unwrap_or("undefined")),
        }
    }
    if let Ok(gain) = report.delta_db("cap-17GBd-a5-b2b", "uniform-14.2GBd-b2b") {
        println!("shaping gain {gain:.2} dB");
    }
    emit_results(&curves, &report, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_in(std::env::temp_dir().join("pamshape-waterfall"))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    match std::env::args_os().nth(1) {
        Some(dir) => run_in(dir.into()),
        None => run(),
    }
}

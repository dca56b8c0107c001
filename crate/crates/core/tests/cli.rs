//! End-to-end runs of the `pamshape` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pamshape::config::parse_config;

const SMALL: &str = r#"
[rate]
net_rate = 40e9
fec_overhead_percent = 7

[[scenario]]
baud = 14.2e9
mode = "uniform"
awg_rate_gsa = 20

[tx]
drive_rms = 0.36

[link]
awg_bw_ghz = 6.5
tosa_bw_ghz = 8
optical_filter_nm = 0.4

[link.pd]
bw_ghz = 14

[link.ea]
bw_ghz = 14

[link.dso]
rate_gsa = 51.2
bw_ghz = 22.6

[rx]
l1 = 31
l2 = 3
l3 = 3

[sweep]
rop = "-15:3:-6"
n_symbols = 20000
"#;

fn pamshape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamshape")).args(args).env("RUST_LOG", "error").output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn config_errors_exit_1() {
    assert_eq!(pamshape(&[]).status.code(), Some(1));
    assert_eq!(pamshape(&["--preset", "nope"]).status.code(), Some(1));
    assert_eq!(pamshape(&["--config", "/nonexistent/exp.toml"]).status.code(), Some(1));
    let o = pamshape(&["--preset", "desk-scale", "--set", "rate.bogus=1", "--dry-run"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
    let o = pamshape(&["--preset", "desk-scale", "--rop", "x", "--dry-run"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(pamshape(&["--bogus-flag"]).status.code(), Some(1));
}

#[test]
fn dry_run_lists_paper_scenarios() {
    let o = pamshape(&["--preset", "paper-b2b", "--dry-run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let labels: Vec<&str> = out.lines().filter(|l| l.starts_with("# ")).collect();
    assert_eq!(labels.len(), 10);
    assert!(labels[0].starts_with("# uniform-71GBd-b2b"));
    assert!(labels.iter().any(|l| l.starts_with("# cap-90GBd-a5-b2b H=2.4185")));
}

#[test]
fn run_writes_results_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = pamshape(&["--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("uniform-14.2GBd-b2b"));
    for f in ["uniform-14.2GBd-b2b.csv", "summary.csv", "waterfall.svg", "config.toml"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    // The echo is the applied configuration, defaults included.
    let echo = parse_config(&fs::read_to_string(out.join("config.toml")).unwrap()).unwrap();
    assert_eq!(echo.output.dir, out);
    assert_eq!(echo.rx.l1, 31);
    assert_eq!(echo.tx.rolloff, 0.4);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let line = summary.lines().nth(1).unwrap();
    let sens: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((-15.0..-6.0).contains(&sens), "{sens}");
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = pamshape(&["--config", &cfg, "--seed", "1", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["uniform-14.2GBd-b2b.csv", "summary.csv", "waterfall.svg"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn no_crossing_exits_2_and_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = pamshape(&["--config", &cfg, "--rop", "-20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("never crosses"), "{stdout}");
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), "label,sensitivity_dbm\nuniform-14.2GBd-b2b,\n");
    assert!(out.join("uniform-14.2GBd-b2b.csv").exists());
}

#[test]
fn set_matches_text_edit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = pamshape(&["--config", &cfg, "--set", "link.soa.nf_db=6", "--set", "sweep.n_symbols=30000", "--dry-run"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let via_flag = parse_config(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let edited = SMALL.replace("n_symbols = 20000", "n_symbols = 30000") + "\n[link.soa]\nnf_db = 6\n";
    assert_eq!(via_flag, parse_config(&edited).unwrap());
}

//! ROP sweeps, BER waterfall curves, receiver sensitivity at the FEC
//! threshold and result files.

mod plot;
mod point;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::rxdsp::TimingConfig;
use crate::shaping::{RatePlan, ShapedDistribution};
use crate::txdsp::Labeling;

pub use plot::waterfall_svg;
pub use point::{simulate_point, PointResult};

/// Points with fewer errors than this are flagged unreliable.
pub const MIN_RELIABLE_ERRORS: u64 = 10;

/// Transmitter DSP settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxConfig {
    pub rolloff: f64,
    /// RRC span in symbols.
    pub span: usize,
    pub sps: usize,
    /// DAC resolution; 0 disables quantization.
    pub dac_bits: u32,
    /// RMS of the drive waveform relative to the DAC full scale of 1.
    pub drive_rms: f64,
    pub labeling: Labeling,
    /// PRBS register length for uniform sequences.
    pub prbs_order: u32,
    /// AWG rate preset; only `paper-awg` is known.
    pub awg: String,
    /// Explicit AWG rate; overrides the preset when > 0.
    pub awg_rate_gsa: f64,
}

impl Default for TxConfig {
    fn default() -> Self {
        Self {
            rolloff: 0.4,
            span: 64,
            sps: 4,
            dac_bits: 8,
            drive_rms: 0.36,
            labeling: Labeling::Gray,
            prbs_order: 23,
            awg: "paper-awg".into(),
            awg_rate_gsa: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// MAP boundaries using the level probabilities.
    #[default]
    Map,
    /// Midpoints between estimated level means.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    #[default]
    Pooled,
    PerLevel,
}

/// Receiver DSP settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RxConfig {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub training_fraction: f64,
    pub thresholds: ThresholdMode,
    pub sigma: SigmaMode,
    pub loop_bw: f64,
    pub damping: f64,
    pub detector_gain: f64,
    /// Symbols dropped after timing acquisition.
    pub skip_symbols: usize,
}

impl Default for RxConfig {
    fn default() -> Self {
        let t = TimingConfig::default();
        Self {
            l1: 311,
            l2: 11,
            l3: 11,
            training_fraction: 0.2,
            thresholds: ThresholdMode::Map,
            sigma: SigmaMode::Pooled,
            loop_bw: t.loop_bw,
            damping: t.damping,
            detector_gain: t.detector_gain,
            skip_symbols: 2000,
        }
    }
}

impl RxConfig {
    pub fn timing(&self) -> TimingConfig {
        TimingConfig {
            loop_bw: self.loop_bw,
            damping: self.damping,
            detector_gain: self.detector_gain,
            ..TimingConfig::default()
        }
    }
}

/// One fully resolved operating point: everything [`run_sweep`] needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub plan: RatePlan,
    pub distribution: ShapedDistribution,
    pub awg_rate_hz: f64,
    pub tx: TxConfig,
    pub rx: RxConfig,
    pub link: LinkConfig,
}

impl Scenario {
    pub fn baud(&self) -> f64 {
        self.plan.baud
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub rop_dbm: f64,
    pub ber: f64,
    pub n_bits: u64,
    pub n_errors: u64,
}

impl BerPoint {
    pub fn reliable(&self) -> bool {
        self.n_errors >= MIN_RELIABLE_ERRORS
    }
}

/// BER against received optical power, ordered by increasing ROP.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub label: String,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn new(label: impl Into<String>, mut points: Vec<BerPoint>) -> Result<Self> {
        points.sort_by(|a, b| a.rop_dbm.total_cmp(&b.rop_dbm));
        if points.windows(2).any(|w| w[0].rop_dbm == w[1].rop_dbm) {
            return Err(Error::param("duplicate ROP in BER curve"));
        }
        for p in &points {
            if !(0.0..=1.0).contains(&p.ber) || p.n_errors > p.n_bits {
                return Err(Error::param(format!("invalid BER point at {} dBm", p.rop_dbm)));
            }
        }
        Ok(Self { label: label.into(), points })
    }

    /// Whether BER never increases with ROP, ignoring increases where both
    /// points have fewer than [`MIN_RELIABLE_ERRORS`] errors.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].ber <= w[0].ber || (!w[0].reliable() && !w[1].reliable()))
    }
}

/// Sorted, de-duplicated ROP list.
fn normalize_rops(rops: &[f64]) -> Result<Vec<f64>> {
    if rops.is_empty() {
        return Err(Error::param("empty ROP list"));
    }
    if rops.iter().any(|r| !r.is_finite()) {
        return Err(Error::param("ROP values must be finite"));
    }
    let mut v = rops.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sweep point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    splitmix(seed ^ splitmix(index as u64 + 1))
}

/// Runs every ROP point (in parallel) and returns the curve. Each point
/// uses a fresh symbol sequence and noise realization seeded from
/// `(seed, point index)`, so the result does not depend on scheduling.
pub fn run_sweep(scenario: &Scenario, rops: &[f64], n_symbols: usize, seed: u64) -> Result<BerCurve> {
    if n_symbols < 10_000 {
        return Err(Error::param(format!("at least 1e4 symbols per point required, got {n_symbols}")));
    }
    if n_symbols < 100_000 {
        log::warn!("{}: {n_symbols} symbols per point is below 1e5", scenario.label);
    }
    let rops = normalize_rops(rops)?;
    let results: Vec<Result<BerPoint>> = rops
        .par_iter()
        .enumerate()
        .map(|(i, &rop)| {
            simulate_point(scenario, rop, n_symbols, point_seed(seed, i))
                .map(|r| BerPoint { rop_dbm: rop, ber: r.ber.ber, n_bits: r.ber.bits, n_errors: r.ber.errors })
                .map_err(|e| Error::AtRop { rop_dbm: rop, source: Box::new(e) })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    BerCurve::new(scenario.label.clone(), points)
}

/// ROP where the curve reaches `threshold`, by linear interpolation of
/// log10(BER) against ROP between the bracketing pair: the highest-ROP point
/// still above the threshold and its successor. Zero-error points count as
/// half an error. Never extrapolates.
pub fn sensitivity(curve: &BerCurve, threshold: f64) -> Result<f64> {
    let no_crossing = |detail| Error::NoCrossing { label: curve.label.clone(), threshold, detail };
    let pts = &curve.points;
    if pts.is_empty() {
        return Err(no_crossing("empty curve"));
    }
    let floored = |p: &BerPoint| {
        if p.ber > 0.0 {
            p.ber
        } else {
            0.5 / p.n_bits.max(1) as f64
        }
    };
    let Some(i) = pts.iter().rposition(|p| p.ber > threshold) else {
        return pts
            .iter()
            .find(|p| p.ber == threshold)
            .map(|p| p.rop_dbm)
            .ok_or_else(|| no_crossing("every point is below the threshold"));
    };
    if i + 1 == pts.len() {
        return Err(no_crossing("the highest ROP is still above the threshold"));
    }
    let (a, b) = (&pts[i], &pts[i + 1]);
    let (la, lb) = (floored(a).log10(), floored(b).log10());
    let lt = threshold.log10();
    Ok(a.rop_dbm + (lt - la) / (lb - la) * (b.rop_dbm - a.rop_dbm))
}

/// Sensitivity difference `b − a` in dB; positive means `a` reaches the
/// threshold at lower power.
pub fn compare(sensitivity_a: f64, sensitivity_b: f64) -> f64 {
    sensitivity_b - sensitivity_a
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSensitivity {
    pub label: String,
    pub sensitivity_dbm: Option<f64>,
    /// Why the sensitivity is undefined.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub threshold_ber: f64,
    pub curves: Vec<CurveSensitivity>,
}

impl SensitivityReport {
    pub fn from_curves(curves: &[BerCurve], threshold_ber: f64) -> Self {
        let curves = curves
            .iter()
            .map(|c| match sensitivity(c, threshold_ber) {
                Ok(s) => CurveSensitivity { label: c.label.clone(), sensitivity_dbm: Some(s), error: None },
                Err(e) => {
                    CurveSensitivity { label: c.label.clone(), sensitivity_dbm: None, error: Some(e.to_string()) }
                }
            })
            .collect();
        Self { threshold_ber, curves }
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.curves.iter().find(|c| c.label == label).and_then(|c| c.sensitivity_dbm)
    }

    /// `compare(a, b)` for two labelled curves.
    pub fn delta_db(&self, a: &str, b: &str) -> Result<f64> {
        let lookup = |l: &str| self.get(l).ok_or_else(|| Error::param(format!("no sensitivity for curve `{l}`")));
        Ok(compare(lookup(a)?, lookup(b)?))
    }
}

/// File-name-safe version of a curve label.
pub fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' { c } else { '_' }).collect()
}

pub fn curve_csv(curve: &BerCurve) -> String {
    let mut s = String::from("rop_dbm,ber,n_bits,n_errors,reliable\n");
    for p in &curve.points {
        s.push_str(&format!("{:.3},{:.6e},{},{},{}\n", p.rop_dbm, p.ber, p.n_bits, p.n_errors, p.reliable()));
    }
    s
}

pub fn summary_csv(report: &SensitivityReport) -> String {
    let mut s = String::from("label,sensitivity_dbm\n");
    for c in &report.curves {
        match c.sensitivity_dbm {
            Some(v) => s.push_str(&format!("{},{v:.4}\n", c.label)),
            None => s.push_str(&format!("{},\n", c.label)),
        }
    }
    s
}

/// Writes `<label>.csv` per curve, `summary.csv` and `waterfall.svg` into
/// `out_dir` (created if missing).
pub fn emit_results(curves: &[BerCurve], report: &SensitivityReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: String, body: String| {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(path, e))
    };
    for c in curves {
        write(format!("{}.csv", file_stem(&c.label)), curve_csv(c))?;
    }
    write("summary.csv".into(), summary_csv(report))?;
    write("waterfall.svg".into(), waterfall_svg(curves, report.threshold_ber))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(rop: f64, ber: f64) -> BerPoint {
        BerPoint { rop_dbm: rop, ber, n_bits: 1_000_000, n_errors: (ber * 1e6) as u64 }
    }

    fn curve(points: &[(f64, f64)]) -> BerCurve {
        BerCurve::new("c", points.iter().map(|&(r, b)| pt(r, b)).collect()).unwrap()
    }

    #[test]
    fn analytic_curve_crossing() {
        let c = curve(&[(-8.0, 1e-2), (-7.0, 1e-3)]);
        let s = sensitivity(&c, 3.8e-3).unwrap();
        assert!((s - (-10.0 - 3.8e-3f64.log10())).abs() < 1e-3);
        assert!((s + 7.580).abs() < 1e-3);
    }

    #[test]
    fn point_on_threshold() {
        let c = curve(&[(-9.0, 1e-2), (-8.0, 3.8e-3), (-7.0, 1e-4)]);
        assert!((sensitivity(&c, 3.8e-3).unwrap() + 8.0).abs() < 1e-12);
        let c = curve(&[(-8.0, 3.8e-3), (-7.0, 1e-4)]);
        assert_eq!(sensitivity(&c, 3.8e-3).unwrap(), -8.0);
    }

    #[test]
    fn no_crossing_errors() {
        let below = curve(&[(-8.0, 1e-4), (-7.0, 1e-5)]);
        assert!(matches!(sensitivity(&below, 3.8e-3), Err(Error::NoCrossing { .. })));
        let above = curve(&[(-20.0, 0.2), (-19.0, 0.1)]);
        assert!(matches!(sensitivity(&above, 3.8e-3), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn redundant_points_do_not_move_sensitivity() {
        let c = curve(&[(-10.0, 5e-2), (-8.0, 1e-2), (-7.0, 1e-3), (-5.0, 1e-6)]);
        let more = curve(&[(-12.0, 1e-1), (-10.0, 5e-2), (-8.0, 1e-2), (-7.0, 1e-3), (-6.0, 1e-4), (-5.0, 1e-6)]);
        assert_eq!(sensitivity(&c, 3.8e-3).unwrap(), sensitivity(&more, 3.8e-3).unwrap());
    }

    #[test]
    fn zero_ber_point_is_floored() {
        let mut c = curve(&[(-8.0, 1e-2)]);
        c.points.push(BerPoint { rop_dbm: -7.0, ber: 0.0, n_bits: 1000, n_errors: 0 });
        let s = sensitivity(&c, 3.8e-3).unwrap();
        assert!(s > -8.0 && s < -7.0);
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(-6.84, -6.84), 0.0);
        assert!((compare(-6.84, -9.74) + 2.90).abs() < 1e-12);
        assert!((compare(-6.84, -8.30) + 1.46).abs() < 1e-12);
        assert_eq!(compare(-6.84, -9.74), -compare(-9.74, -6.84));
    }

    #[test]
    fn csv_layout() {
        let c = curve(&[(-12.0, 1e-1), (-11.0, 5e-2), (-10.0, 1e-2), (-9.0, 1e-3), (-8.0, 1e-4), (-7.0, 1e-5)]);
        assert_eq!(curve_csv(&c).lines().count(), 7);
        let empty = SensitivityReport::from_curves(&[], 3.8e-3);
        assert_eq!(summary_csv(&empty), "label,sensitivity_dbm\n");
    }

    #[test]
    fn emitted_files_are_deterministic() {
        let c = curve(&[(-10.0, 1e-2), (-9.0, 1e-3)]);
        let r = SensitivityReport::from_curves(std::slice::from_ref(&c), 3.8e-3);
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        emit_results(std::slice::from_ref(&c), &r, d1.path()).unwrap();
        emit_results(std::slice::from_ref(&c), &r, d2.path()).unwrap();
        for f in ["c.csv", "summary.csv", "waterfall.svg"] {
            assert_eq!(fs::read(d1.path().join(f)).unwrap(), fs::read(d2.path().join(f)).unwrap());
        }
    }

    #[test]
    fn monotonicity_check() {
        assert!(curve(&[(-10.0, 1e-2), (-9.0, 1e-3)]).is_monotone());
        assert!(!curve(&[(-10.0, 1e-3), (-9.0, 1e-2)]).is_monotone());
        let mut c = curve(&[(-10.0, 1e-2)]);
        c.points.push(BerPoint { rop_dbm: -9.0, ber: 1e-6, n_bits: 1_000_000, n_errors: 1 });
        c.points.push(BerPoint { rop_dbm: -8.0, ber: 2e-6, n_bits: 1_000_000, n_errors: 2 });
        assert!(c.is_monotone());
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(point_seed(7, 0), point_seed(7, 1));
        assert_eq!(point_seed(7, 3), point_seed(7, 3));
    }
}

//! Experiment configuration: TOML schema, validation, presets and dotted
//! overrides.
//!
//! ```toml
//! [rate]
//! net_rate = 200e9
//! baud = 85e9
//! fec_overhead_percent = 7
//!
//! [shaping]
//! mode = "cap"
//! alpha = 5
//! ```
//!
//! Sections `tx`, `rx`, `link`, `sweep` and `output` are optional. A list
//! of `[[scenario]]` tables replaces the single operating point given by
//! `rate.baud` and `[shaping]`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{DsoConfig, EaConfig, FiberConfig, LinkConfig, PdConfig};
use crate::error::{Error, Result};
use crate::experiment::{RxConfig, Scenario, TxConfig};
use crate::shaping::{
    fec_rate_from_overhead, shaped_for_entropy, LevelAlphabet, RatePlan, ShapedDistribution, RATE_PLAN_TOL,
};
use crate::txdsp::paper_awg_rate_gsa;
use crate::HD_FEC_THRESHOLD;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["paper-b2b", "paper-5km", "desk-scale", "desk-scale-5km"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateSection {
    /// Target net rate, bit/s.
    pub net_rate: f64,
    /// Symbol rate of the single-scenario form, symbol/s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baud: Option<f64>,
    /// Bit-levels per symbol.
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_fec: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fec_overhead_percent: Option<f64>,
    /// Accept a declared entropy that misses the net rate by more than
    /// 0.5 %.
    pub allow_rate_mismatch: bool,
}

impl Default for RateSection {
    fn default() -> Self {
        Self { net_rate: 200e9, baud: None, m: 3, r_fec: None, fec_overhead_percent: None, allow_rate_mismatch: false }
    }
}

impl RateSection {
    /// FEC code rate; 7 % overhead when neither field is given.
    pub fn fec_rate(&self) -> Result<f64> {
        match (self.r_fec, self.fec_overhead_percent) {
            (Some(_), Some(_)) => Err(Error::Config("set only one of rate.r_fec and rate.fec_overhead_percent".into())),
            (Some(r), None) if r > 0.0 && r <= 1.0 => Ok(r),
            (Some(r), None) => Err(Error::Config(format!("rate.r_fec must lie in (0, 1], got {r}"))),
            (None, Some(oh)) => fec_rate_from_overhead(oh).map_err(|e| Error::Config(e.to_string())),
            (None, None) => fec_rate_from_overhead(7.0).map_err(|e| Error::Config(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapingMode {
    #[default]
    Uniform,
    Cap,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapingSection {
    pub mode: ShapingMode,
    /// Gaussian order; required for `cap`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Entropy override; solved from the rate plan when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
}

/// One operating point of a multi-scenario run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub baud: f64,
    pub mode: ShapingMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub awg_rate_gsa: Option<f64>,
    /// RRC roll-off for this point only, e.g. to stay inside the AWG
    /// Nyquist band.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rolloff: Option<f64>,
}

/// ROP points: an explicit list or a `"START:STEP:STOP"` / `"a,b,c"`
/// string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RopSpec {
    List(Vec<f64>),
    Text(String),
}

impl RopSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            RopSpec::List(v) => Ok(v.clone()),
            RopSpec::Text(s) => parse_rop(s),
        }
    }
}

/// Parses `START:STEP:STOP` (inclusive) or a comma-separated list.
pub fn parse_rop(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("invalid ROP value `{s}`")));
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [one] => one.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step == 0.0 || (stop - start) * step < 0.0 {
                return Err(Error::Config(format!("ROP range `{text}` does not reach its end")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > 10_000 {
                return Err(Error::Config(format!("ROP range `{text}` has too many points")));
            }
            (0..n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect()
        }
        _ => return Err(Error::Config(format!("ROP spec `{text}` is neither a list nor START:STEP:STOP"))),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("ROP spec `{text}` has no usable values")));
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub rop: RopSpec,
    pub n_symbols: usize,
    pub seed: u64,
    pub threshold_ber: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { rop: RopSpec::Text("-14:1:-4".into()), n_symbols: 500_000, seed: 1, threshold_ber: HD_FEC_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("results") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rate: RateSection,
    pub shaping: ShapingSection,
    pub tx: TxConfig,
    pub rx: RxConfig,
    pub link: LinkConfig,
    pub sweep: SweepSection,
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub scenario: Vec<ScenarioSection>,
}

fn toml_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

/// Parses and validates a TOML experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(toml_err)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Like [`parse_config`] with `section.key=value` overrides applied to the
/// text before validation.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut value: toml::Value = toml::from_str(text).map_err(toml_err)?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    from_value(value)
}

fn from_value(value: toml::Value) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = value.try_into().map_err(toml_err)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Sets the dotted path `a.b.c` (array elements by index) to a TOML
/// literal, or to a string when the value is not valid TOML.
pub fn apply_override(root: &mut toml::Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("invalid override key `{path}`")));
    }
    let mut node = root;
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        node = match node {
            toml::Value::Table(t) => {
                if last {
                    t.insert(key.to_string(), value);
                    return Ok(());
                }
                t.entry(key.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()))
            }
            toml::Value::Array(a) => {
                let idx: usize =
                    key.parse().map_err(|_| Error::Config(format!("`{key}` in `{path}` is not an array index")))?;
                let len = a.len();
                let slot = a
                    .get_mut(idx)
                    .ok_or_else(|| Error::Config(format!("index {idx} out of range in `{path}` ({len} entries)")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::Config(format!("`{path}` descends into a non-table value"))),
        };
    }
    Ok(())
}

impl ExperimentConfig {
    /// Checks every invariant, including the rate equation of each
    /// scenario.
    pub fn validate(&self) -> Result<()> {
        self.rate.fec_rate()?;
        if !(self.rate.net_rate > 0.0) {
            return Err(Error::Config("rate.net_rate must be > 0".into()));
        }
        if self.rate.m != 3 {
            return Err(Error::Config(format!("only PAM-8 (rate.m = 3) is supported, got {}", self.rate.m)));
        }
        let values = self.sweep.rop.values()?;
        if values.is_empty() {
            return Err(Error::Config("sweep.rop is empty".into()));
        }
        if self.sweep.n_symbols < 10_000 {
            return Err(Error::Config(format!("sweep.n_symbols must be >= 10000, got {}", self.sweep.n_symbols)));
        }
        if !(self.sweep.threshold_ber > 0.0 && self.sweep.threshold_ber < 0.5) {
            return Err(Error::Config("sweep.threshold_ber must lie in (0, 0.5)".into()));
        }
        let tx = &self.tx;
        if !(tx.rolloff > 0.0 && tx.rolloff <= 1.0) || tx.sps < 2 || tx.span == 0 || !(tx.drive_rms > 0.0) {
            return Err(Error::Config("tx: need 0 < rolloff <= 1, sps >= 2, span > 0, drive_rms > 0".into()));
        }
        if tx.dac_bits > 16 {
            return Err(Error::Config(format!("tx.dac_bits must be 0..=16, got {}", tx.dac_bits)));
        }
        if tx.awg != "paper-awg" {
            return Err(Error::Config(format!("unknown tx.awg preset `{}` (known: paper-awg)", tx.awg)));
        }
        let rx = &self.rx;
        if rx.l1 == 0 || rx.l2 > rx.l1 || rx.l3 > rx.l1 {
            return Err(Error::Config(format!(
                "rx memories must satisfy l1 > 0 and l2, l3 <= l1, got ({}, {}, {})",
                rx.l1, rx.l2, rx.l3
            )));
        }
        if !(rx.training_fraction > 0.0 && rx.training_fraction < 1.0) {
            return Err(Error::Config("rx.training_fraction must lie in (0, 1)".into()));
        }
        self.link.validate().map_err(|e| Error::Config(format!("link: {e}")))?;
        self.scenarios().map(|_| ())
    }

    fn scenario_sections(&self) -> Result<Vec<ScenarioSection>> {
        if !self.scenario.is_empty() {
            return Ok(self.scenario.clone());
        }
        let baud = self.rate.baud.ok_or_else(|| Error::Config("set rate.baud or list [[scenario]] entries".into()))?;
        Ok(vec![ScenarioSection {
            label: None,
            baud,
            mode: self.shaping.mode,
            alpha: self.shaping.alpha,
            entropy: self.shaping.entropy,
            awg_rate_gsa: None,
            rolloff: None,
        }])
    }

    /// Resolves every operating point: rate plan, distribution, AWG rate
    /// and label.
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let r_fec = self.rate.fec_rate()?;
        let m = self.rate.m;
        let alphabet = LevelAlphabet::pam8();
        let mut out: Vec<Scenario> = Vec::new();
        for (i, sc) in self.scenario_sections()?.iter().enumerate() {
            let ctx = |msg: String| Error::Config(format!("scenario {i}: {msg}"));
            if !(sc.baud > 0.0) {
                return Err(ctx(format!("baud must be > 0, got {}", sc.baud)));
            }
            let (plan, dist) = match sc.mode {
                ShapingMode::Uniform => {
                    if sc.alpha.is_some() || sc.entropy.is_some() {
                        return Err(ctx("alpha/entropy only apply to cap shaping".into()));
                    }
                    let plan = RatePlan { net_rate: self.rate.net_rate, ..RatePlan::uniform(sc.baud, m, r_fec) };
                    (plan, ShapedDistribution::uniform(alphabet.clone()))
                }
                ShapingMode::Cap => {
                    let alpha = sc.alpha.ok_or_else(|| ctx("cap shaping requires alpha".into()))?;
                    if !(alpha > 0.0) {
                        return Err(ctx(format!("alpha must be > 0, got {alpha}")));
                    }
                    let plan = match sc.entropy {
                        Some(h) => RatePlan { net_rate: self.rate.net_rate, baud: sc.baud, m, r_fec, entropy: h },
                        None => {
                            RatePlan::solve(self.rate.net_rate, sc.baud, m, r_fec).map_err(|e| ctx(e.to_string()))?
                        }
                    };
                    let dist = shaped_for_entropy(&alphabet, alpha, plan.entropy).map_err(|e| ctx(e.to_string()))?;
                    (plan, dist)
                }
            };
            if plan.rate_mismatch() > RATE_PLAN_TOL && !self.rate.allow_rate_mismatch {
                return Err(ctx(format!(
                    "rate equation net = baud·(H − m·(1 − r_fec)) gives {:.4} Gb/s for baud {:.3} GBd and H = {:.4}, \
                     {:.2} % away from the declared {:.4} Gb/s (limit {:.1} %); set rate.allow_rate_mismatch to accept",
                    plan.achieved_net_rate() / 1e9,
                    sc.baud / 1e9,
                    plan.entropy,
                    100.0 * plan.rate_mismatch(),
                    self.rate.net_rate / 1e9,
                    100.0 * RATE_PLAN_TOL
                )));
            }
            let awg_gsa = match sc.awg_rate_gsa {
                Some(r) => r,
                None if self.tx.awg_rate_gsa > 0.0 => self.tx.awg_rate_gsa,
                None => paper_awg_rate_gsa(sc.baud / 1e9).ok_or_else(|| {
                    ctx(format!("{:.3} GBd is not in the paper-awg table; set awg_rate_gsa", sc.baud / 1e9))
                })?,
            };
            if !(awg_gsa * 1e9 >= sc.baud) {
                return Err(ctx(format!("AWG rate {awg_gsa} GSa/s is below one sample per symbol")));
            }
            let mut tx = self.tx.clone();
            if let Some(b) = sc.rolloff {
                if !(b > 0.0 && b <= 1.0) {
                    return Err(ctx(format!("rolloff must lie in (0, 1], got {b}")));
                }
                tx.rolloff = b;
            }
            let label = sc.label.clone().unwrap_or_else(|| self.default_label(sc));
            if out.iter().any(|s| s.label == label) {
                return Err(ctx(format!("duplicate label `{label}`")));
            }
            out.push(Scenario {
                label,
                plan,
                distribution: dist,
                awg_rate_hz: awg_gsa * 1e9,
                tx,
                rx: self.rx.clone(),
                link: self.link.clone(),
            });
        }
        Ok(out)
    }

    fn default_label(&self, sc: &ScenarioSection) -> String {
        let dist = if self.link.fiber.length_km > 0.0 {
            format!("{}km", fmt_num(self.link.fiber.length_km))
        } else {
            "b2b".into()
        };
        let baud = fmt_num(sc.baud / 1e9);
        match sc.mode {
            ShapingMode::Uniform => format!("uniform-{baud}GBd-{dist}"),
            ShapingMode::Cap => format!("cap-{baud}GBd-a{}-{dist}", fmt_num(sc.alpha.unwrap_or(0.0))),
        }
    }

    pub fn rops(&self) -> Result<Vec<f64>> {
        self.sweep.rop.values()
    }

    /// The validated configuration with all defaults filled in, as TOML.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(toml_err)
    }

    /// Applies `section.key=value` overrides to this configuration as if the
    /// text had been edited.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut value = toml::Value::try_from(self).map_err(toml_err)?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        from_value(value)
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn paper_scenarios(bauds: [f64; 4], awg: Option<[f64; 4]>) -> Vec<ScenarioSection> {
    let awg_at = |i: usize| awg.map(|a| a[i]);
    let mut v = vec![ScenarioSection {
        baud: bauds[0],
        mode: ShapingMode::Uniform,
        awg_rate_gsa: awg_at(0),
        ..Default::default()
    }];
    for (i, &baud) in bauds.iter().enumerate().skip(1) {
        for alpha in [2.0, 3.5, 5.0] {
            v.push(ScenarioSection {
                baud,
                mode: ShapingMode::Cap,
                alpha: Some(alpha),
                awg_rate_gsa: awg_at(i),
                ..Default::default()
            });
        }
    }
    v
}

/// Behavioural link shared by the presets at full rate; `scale` divides
/// every rate and bandwidth.
fn preset_link(scale: f64) -> LinkConfig {
    let mut link = LinkConfig {
        awg_bw_ghz: 32.5 / scale,
        tosa_bw_ghz: 40.0 / scale,
        optical_filter_nm: 2.0 / scale,
        pd: PdConfig { bw_ghz: 70.0 / scale, ..PdConfig::default() },
        ea: EaConfig { bw_ghz: 70.0 / scale, ..EaConfig::default() },
        dso: DsoConfig { rate_gsa: 256.0 / scale, bw_ghz: 113.0 / scale, bits: 8 },
        ..LinkConfig::default()
    };
    link.eml.driver_saturation = 0.5;
    link
}

/// Built-in configurations.
///
/// * `paper-b2b`: 200 Gb/s net, uniform 71 GBd and cap shaping at 80, 85
///   and 90 GBd with α ∈ {2, 3.5, 5}, AWG rates from the `paper-awg` table.
/// * `paper-5km`: the same over 5 km of O-band fiber.
/// * `desk-scale`: every rate and bandwidth divided by 5 (40 Gb/s net,
///   14.2–18 GBd), 2·10⁵ symbols per point and a shorter equalizer.
/// * `desk-scale-5km`: desk scale with the dispersion multiplied by 25 so
///   that the dispersive phase per symbol matches 5 km at full rate.
///
/// The link noise and nonlinearity are behavioural defaults, not a
/// calibration of any testbed.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let paper = |km: f64| {
        let mut link = preset_link(1.0);
        link.fiber = FiberConfig { length_km: km, ..FiberConfig::default() };
        ExperimentConfig {
            rate: RateSection { fec_overhead_percent: Some(7.0), ..RateSection::default() },
            link,
            scenario: paper_scenarios([71e9, 80e9, 85e9, 90e9], None),
            output: OutputSection { dir: PathBuf::from(format!("results/{name}")) },
            ..ExperimentConfig::default()
        }
    };
    let desk = |km: f64| {
        let mut link = preset_link(5.0);
        link.fiber = FiberConfig { length_km: km, dispersion_ps_nm_km: -2.0 * 25.0, ..FiberConfig::default() };
        ExperimentConfig {
            rate: RateSection { net_rate: 40e9, fec_overhead_percent: Some(7.0), ..RateSection::default() },
            rx: RxConfig { l1: 61, l2: 7, l3: 5, ..RxConfig::default() },
            link,
            sweep: SweepSection {
                rop: RopSpec::Text("-16:1:-7".into()),
                n_symbols: 200_000,
                ..SweepSection::default()
            },
            scenario: paper_scenarios([14.2e9, 16e9, 17e9, 18e9], Some([20.0, 21.4, 22.6, 24.0])),
            output: OutputSection { dir: PathBuf::from(format!("results/{name}")) },
            ..ExperimentConfig::default()
        }
    };
    let cfg = match name {
        "paper-b2b" => paper(0.0),
        "paper-5km" => paper(5.0),
        "desk-scale" => desk(0.0),
        "desk-scale-5km" => desk(5.0),
        _ => return Err(Error::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))),
    };
    cfg.validate()?;
    Ok(cfg)
}

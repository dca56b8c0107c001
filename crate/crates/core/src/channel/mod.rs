//! Behavioural model of the IM/DD optical path: AWG and TOSA bandwidth,
//! EML, fiber dispersion, VOA, SOA with ASE and optical filtering, PIN
//! photodiode, electrical amplifier and oscilloscope.

mod adc;
mod filters;
mod optical;

use serde::{Deserialize, Serialize};

pub use adc::adc_capture;
pub use filters::{lowpass, lowpass_or_bypass, lowpass_response, FilterShape, Sampled};
pub use optical::{
    ase_noise_bandwidth, ase_psd, attenuate_to_rop, beta2, dbm_to_mw, eml_modulate, fiber_propagate, filter_width_hz,
    mw_to_dbm, photodetect, soa_amplify, EmlConfig, OpticalField, SoaConfig, LIGHT_SPEED, PLANCK,
};

use crate::error::{Error, Result};
use crate::txdsp::{resample, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberConfig {
    pub length_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub wavelength_nm: f64,
}

impl Default for FiberConfig {
    fn default() -> Self {
        Self { length_km: 0.0, dispersion_ps_nm_km: -2.0, wavelength_nm: 1310.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdConfig {
    pub responsivity_a_w: f64,
    /// One-sided thermal current noise PSD in A²/Hz.
    pub thermal_noise_psd: f64,
    pub bw_ghz: f64,
}

impl Default for PdConfig {
    fn default() -> Self {
        Self { responsivity_a_w: 0.7, thermal_noise_psd: 1e-22, bw_ghz: 70.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EaConfig {
    pub gain_db: f64,
    pub bw_ghz: f64,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self { gain_db: 11.0, bw_ghz: 70.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DsoConfig {
    pub rate_gsa: f64,
    pub bw_ghz: f64,
    /// Vertical resolution; 0 disables quantization.
    pub bits: u32,
}

impl Default for DsoConfig {
    fn default() -> Self {
        Self { rate_gsa: 256.0, bw_ghz: 113.0, bits: 8 }
    }
}

/// Synthetic electrical echo `y[n] += amplitude · y[n - delay]`, standing in
/// for connector and cable reflections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoConfig {
    pub delay_ps: f64,
    pub amplitude: f64,
}

/// Every parameter of the optical link. Bandwidths at or above the Nyquist
/// frequency of the simulation grid (including `inf`) make that stage
/// transparent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub awg_bw_ghz: f64,
    pub tosa_bw_ghz: f64,
    pub filter_shape: FilterShape,
    pub eml: EmlConfig,
    pub tx_power_dbm: f64,
    pub fiber: FiberConfig,
    pub soa: SoaConfig,
    pub optical_filter_nm: f64,
    pub pd: PdConfig,
    pub ea: EaConfig,
    pub dso: DsoConfig,
    /// Analog simulation grid; 0 uses the oscilloscope rate.
    pub sim_rate_gsa: f64,
    pub echo: Option<EchoConfig>,
    pub seed: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            awg_bw_ghz: 25.0,
            tosa_bw_ghz: 40.0,
            filter_shape: FilterShape::Gaussian,
            eml: EmlConfig::default(),
            tx_power_dbm: -3.8,
            fiber: FiberConfig::default(),
            soa: SoaConfig::default(),
            optical_filter_nm: 2.0,
            pd: PdConfig::default(),
            ea: EaConfig::default(),
            dso: DsoConfig::default(),
            sim_rate_gsa: 0.0,
            echo: None,
            seed: 1,
        }
    }
}

impl LinkConfig {
    /// Noise-free, distortion-free, infinitely wide link sampled at
    /// `rate_hz`: the output is an affine image of the drive.
    pub fn transparent(rate_hz: f64) -> Self {
        Self {
            awg_bw_ghz: f64::INFINITY,
            tosa_bw_ghz: f64::INFINITY,
            eml: EmlConfig {
                extinction_ratio_db: f64::INFINITY,
                clip: f64::INFINITY,
                poly: vec![],
                driver_saturation: 0.0,
            },
            fiber: FiberConfig { length_km: 0.0, ..FiberConfig::default() },
            soa: SoaConfig { ase: false, ..SoaConfig::default() },
            optical_filter_nm: f64::INFINITY,
            pd: PdConfig { thermal_noise_psd: 0.0, bw_ghz: f64::INFINITY, ..PdConfig::default() },
            ea: EaConfig { bw_ghz: f64::INFINITY, ..EaConfig::default() },
            dso: DsoConfig { rate_gsa: rate_hz / 1e9, bw_ghz: f64::INFINITY, bits: 0 },
            sim_rate_gsa: rate_hz / 1e9,
            ..Self::default()
        }
    }

    /// Turns off ASE and thermal noise, keeping every deterministic
    /// impairment.
    pub fn noiseless(mut self) -> Self {
        self.soa.ase = false;
        self.pd.thermal_noise_psd = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("awg_bw_ghz", self.awg_bw_ghz),
            ("tosa_bw_ghz", self.tosa_bw_ghz),
            ("optical_filter_nm", self.optical_filter_nm),
            ("pd.bw_ghz", self.pd.bw_ghz),
            ("ea.bw_ghz", self.ea.bw_ghz),
            ("dso.bw_ghz", self.dso.bw_ghz),
            ("fiber.length_km", self.fiber.length_km),
            ("sim_rate_gsa", self.sim_rate_gsa),
            ("pd.thermal_noise_psd", self.pd.thermal_noise_psd),
        ];
        for (name, v) in nonneg {
            if v.is_nan() || v < 0.0 {
                return Err(Error::Config(format!("link.{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("awg_bw_ghz", self.awg_bw_ghz), ("tosa_bw_ghz", self.tosa_bw_ghz)] {
            if v == 0.0 {
                return Err(Error::Config(format!("link.{name} must be > 0 (use inf for an ideal stage)")));
            }
        }
        if !(self.dso.rate_gsa > 0.0 && self.dso.rate_gsa.is_finite()) {
            return Err(Error::Config(format!("link.dso.rate_gsa must be > 0, got {}", self.dso.rate_gsa)));
        }
        if self.dso.bits > 16 {
            return Err(Error::Config(format!("link.dso.bits must be <= 16, got {}", self.dso.bits)));
        }
        if self.soa.gain_db < 0.0 {
            return Err(Error::Config("link.soa.gain_db must be >= 0".into()));
        }
        if self.soa.gain_db > 0.0 && self.soa.nf_db < 3.0 {
            return Err(Error::Config(format!(
                "link.soa.nf_db must be >= 3 dB for a gain above unity, got {}",
                self.soa.nf_db
            )));
        }
        if !(self.fiber.wavelength_nm > 0.0) {
            return Err(Error::Config("link.fiber.wavelength_nm must be > 0".into()));
        }
        if self.eml.extinction_ratio_db.is_nan() || self.eml.extinction_ratio_db <= 0.0 {
            return Err(Error::Config("link.eml.extinction_ratio_db must be > 0".into()));
        }
        Ok(())
    }

    pub fn sim_rate_hz(&self) -> f64 {
        if self.sim_rate_gsa > 0.0 {
            self.sim_rate_gsa * 1e9
        } else {
            self.dso.rate_gsa * 1e9
        }
    }

    /// Seed of the ASE stream for a given base seed.
    fn ase_seed(seed: u64) -> u64 {
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xA5E
    }

    fn thermal_seed(seed: u64) -> u64 {
        seed.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ 0x7E2
    }
}

fn apply_echo(wf: &mut Waveform, echo: &EchoConfig) {
    let delay = (echo.delay_ps * 1e-12 * wf.sample_rate).round() as usize;
    if delay == 0 || delay >= wf.len() {
        return;
    }
    let src = wf.samples.clone();
    for n in delay..wf.samples.len() {
        wf.samples[n] += echo.amplitude * src[n - delay];
    }
}

/// Full link: AWG/TOSA bandwidth → EML → fiber → VOA → SOA + optical
/// filter → photodiode → PD/EA bandwidth → oscilloscope. The result depends
/// only on `(tx, cfg, rop_dbm)`, with `cfg.seed` driving all noise.
pub fn run_link(tx: &Waveform, cfg: &LinkConfig, rop_dbm: f64) -> Result<Waveform> {
    cfg.validate()?;
    let shape = cfg.filter_shape;
    let drive = resample(tx, cfg.sim_rate_hz())?;
    let drive = lowpass_or_bypass(&drive, cfg.awg_bw_ghz * 1e9, shape)?;
    let drive = lowpass_or_bypass(&drive, cfg.tosa_bw_ghz * 1e9, shape)?;
    let field = eml_modulate(&drive, &cfg.eml, cfg.tx_power_dbm, cfg.fiber.wavelength_nm);
    let field = fiber_propagate(&field, cfg.fiber.length_km, cfg.fiber.dispersion_ps_nm_km);
    let field = attenuate_to_rop(&field, rop_dbm)?;
    let field = soa_amplify(&field, &cfg.soa, cfg.optical_filter_nm, LinkConfig::ase_seed(cfg.seed))?;
    let current =
        photodetect(&field, cfg.pd.responsivity_a_w, cfg.pd.thermal_noise_psd, LinkConfig::thermal_seed(cfg.seed));
    let current = lowpass_or_bypass(&current, cfg.pd.bw_ghz * 1e9, shape)?;
    let gain = 10f64.powf(cfg.ea.gain_db / 20.0);
    let mut amplified = Waveform { samples: current.samples.iter().map(|x| x * gain).collect(), ..current };
    amplified = lowpass_or_bypass(&amplified, cfg.ea.bw_ghz * 1e9, shape)?;
    if let Some(echo) = &cfg.echo {
        apply_echo(&mut amplified, echo);
    }
    adc_capture(&amplified, cfg.dso.rate_gsa * 1e9, cfg.dso.bits, cfg.dso.bw_ghz * 1e9, shape)
}

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::filter_complex;
use crate::txdsp::Waveform;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Complex baseband optical envelope in √mW: `mean |e|²` is the optical
/// power in mW.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalField {
    pub envelope: Vec<Complex64>,
    pub sample_rate: f64,
    pub wavelength_nm: f64,
}

impl OpticalField {
    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envelope.is_empty()
    }

    /// Mean optical power in mW.
    pub fn mean_power(&self) -> f64 {
        if self.envelope.is_empty() {
            return 0.0;
        }
        self.envelope.iter().map(|e| e.norm_sqr()).sum::<f64>() / self.envelope.len() as f64
    }

    pub fn energy(&self) -> f64 {
        self.envelope.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn carrier_frequency(&self) -> f64 {
        LIGHT_SPEED / (self.wavelength_nm * 1e-9)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Static electro-absorption modulated laser model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmlConfig {
    /// Ratio of the optical power at drive +1 to drive -1, in dB;
    /// `inf` gives full extinction.
    pub extinction_ratio_db: f64,
    /// Drive clip points `±clip` applied before the transfer function.
    pub clip: f64,
    /// Memoryless drive polynomial `d + Σ c_k · d^(k+2)`; empty is linear.
    pub poly: Vec<f64>,
    /// Driver amplifier saturation: the drive becomes `s·tanh(d/s)` before
    /// clipping. 0 disables it.
    pub driver_saturation: f64,
}

impl Default for EmlConfig {
    fn default() -> Self {
        Self { extinction_ratio_db: 8.0, clip: 1.0, poly: Vec::new(), driver_saturation: 0.0 }
    }
}

impl EmlConfig {
    /// Modulation index `m = (ER - 1)/(ER + 1)`, so that
    /// `P = P_mid · (1 + m·d)`.
    pub fn modulation_index(&self) -> f64 {
        if self.extinction_ratio_db.is_infinite() {
            return 1.0;
        }
        let er = 10f64.powf(self.extinction_ratio_db / 10.0);
        (er - 1.0) / (er + 1.0)
    }

    fn shape_drive(&self, d: f64) -> f64 {
        let s = self.driver_saturation;
        let d = if s > 0.0 { s * (d / s).tanh() } else { d };
        let d = d.clamp(-self.clip, self.clip);
        let mut acc = d;
        let mut pow = d * d;
        for c in &self.poly {
            acc += c * pow;
            pow *= d;
        }
        acc
    }
}

/// Maps a normalized drive onto optical power `P_mid · (1 + m·f(d))`,
/// clipped at zero, with a chirp-free envelope `√P`. `P_mid` is the power
/// at mid-scale drive, set by `tx_power_dbm`.
pub fn eml_modulate(drive: &Waveform, cfg: &EmlConfig, tx_power_dbm: f64, wavelength_nm: f64) -> OpticalField {
    let p_mid = dbm_to_mw(tx_power_dbm);
    let m = cfg.modulation_index();
    let envelope = drive
        .samples
        .iter()
        .map(|&d| {
            let p = (p_mid * (1.0 + m * cfg.shape_drive(d))).max(0.0);
            Complex64::new(p.sqrt(), 0.0)
        })
        .collect();
    OpticalField { envelope, sample_rate: drive.sample_rate, wavelength_nm }
}

/// Group-velocity dispersion `β₂` in s²/m for dispersion `D` in ps/(nm·km).
pub fn beta2(dispersion_ps_nm_km: f64, wavelength_nm: f64) -> f64 {
    let d = dispersion_ps_nm_km * 1e-6;
    let lambda = wavelength_nm * 1e-9;
    -d * lambda * lambda / (2.0 * PI * LIGHT_SPEED)
}

/// Linear dispersive propagation: all-pass phase `exp(j·β₂/2·ω²·L)`.
pub fn fiber_propagate(field: &OpticalField, length_km: f64, dispersion_ps_nm_km: f64) -> OpticalField {
    if length_km == 0.0 || dispersion_ps_nm_km == 0.0 {
        return field.clone();
    }
    let b2 = beta2(dispersion_ps_nm_km, field.wavelength_nm);
    let l = length_km * 1e3;
    let envelope = filter_complex(&field.envelope, field.sample_rate, |f| {
        let w = 2.0 * PI * f;
        Complex64::from_polar(1.0, 0.5 * b2 * w * w * l)
    });
    OpticalField { envelope, ..field.clone() }
}

/// Variable optical attenuator: scales the field to a mean power of
/// `rop_dbm`.
pub fn attenuate_to_rop(field: &OpticalField, rop_dbm: f64) -> Result<OpticalField> {
    let p = field.mean_power();
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param("cannot set received power of a zero-power field"));
    }
    let k = (dbm_to_mw(rop_dbm) / p).sqrt();
    Ok(OpticalField { envelope: field.envelope.iter().map(|e| e * k).collect(), ..field.clone() })
}

/// Semiconductor optical amplifier with single-polarization ASE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SoaConfig {
    pub gain_db: f64,
    pub nf_db: f64,
    /// Adds ASE noise when set; clear for a noiseless amplifier.
    pub ase: bool,
}

impl Default for SoaConfig {
    fn default() -> Self {
        Self { gain_db: 15.0, nf_db: 7.0, ase: true }
    }
}

/// ASE power spectral density in W/Hz per polarization,
/// `(G - 1)·n_sp·hν` with `NF = 2·n_sp·(G - 1)/G`.
pub fn ase_psd(gain_db: f64, nf_db: f64, wavelength_nm: f64) -> f64 {
    let g = 10f64.powf(gain_db / 10.0);
    if g <= 1.0 {
        return 0.0;
    }
    let nf = 10f64.powf(nf_db / 10.0);
    let n_sp = nf * g / (2.0 * (g - 1.0));
    let nu = LIGHT_SPEED / (wavelength_nm * 1e-9);
    (g - 1.0) * n_sp * PLANCK * nu
}

/// Optical filter width in Hz for a width in nm at `wavelength_nm`.
pub fn filter_width_hz(filter_nm: f64, wavelength_nm: f64) -> f64 {
    let l = wavelength_nm * 1e-9;
    LIGHT_SPEED * filter_nm * 1e-9 / (l * l)
}

/// Noise bandwidth (Hz) of the optical filter on this sampling grid.
pub fn ase_noise_bandwidth(filter_nm: f64, wavelength_nm: f64, sample_rate: f64) -> f64 {
    filter_width_hz(filter_nm, wavelength_nm).min(sample_rate)
}

fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Amplifies by `G`, adds circular white ASE and applies a rectangular
/// optical bandpass of `filter_nm` around the carrier.
pub fn soa_amplify(field: &OpticalField, cfg: &SoaConfig, filter_nm: f64, seed: u64) -> Result<OpticalField> {
    if cfg.gain_db < 0.0 {
        return Err(Error::param(format!("SOA gain must be >= 0 dB, got {}", cfg.gain_db)));
    }
    let g = 10f64.powf(cfg.gain_db / 10.0);
    let amp = g.sqrt();
    let mut env: Vec<Complex64> = field.envelope.iter().map(|e| e * amp).collect();
    let psd_w = if cfg.ase { ase_psd(cfg.gain_db, cfg.nf_db, field.wavelength_nm) } else { 0.0 };
    if psd_w > 0.0 {
        // mW per complex sample over the full simulation bandwidth.
        let var = psd_w * 1e3 * field.sample_rate;
        let sd = (0.5 * var).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for e in env.iter_mut() {
            let (a, b) = normal_pair(&mut rng);
            *e += Complex64::new(sd * a, sd * b);
        }
    }
    let width = filter_width_hz(filter_nm, field.wavelength_nm);
    if width < field.sample_rate {
        let half = 0.5 * width;
        env = filter_complex(&env, field.sample_rate, |f| {
            if f.abs() <= half {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
    }
    Ok(OpticalField { envelope: env, ..field.clone() })
}

/// PIN photodiode: `i = R·|e|²` plus white thermal noise of one-sided PSD
/// `thermal_psd` (A²/Hz) over the grid's Nyquist band.
pub fn photodetect(field: &OpticalField, responsivity: f64, thermal_psd: f64, seed: u64) -> Waveform {
    let mut samples: Vec<f64> = field.envelope.iter().map(|e| responsivity * e.norm_sqr() * 1e-3).collect();
    if thermal_psd > 0.0 {
        let sd = (thermal_psd * 0.5 * field.sample_rate).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in samples.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *s += sd * z;
        }
    }
    Waveform { samples, sample_rate: field.sample_rate, occupied_bw: None }
}

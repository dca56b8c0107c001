use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optical::OpticalField;
use crate::error::{Error, Result};
use crate::spectrum::filter_complex;
use crate::txdsp::Waveform;

/// Magnitude shape of the analog lowpass models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterShape {
    /// `|H(f)| = exp(-ln2/2 · (f/f3)²)`, zero phase.
    #[default]
    Gaussian,
    /// Fourth-order Bessel-Thomson response with its DC group delay removed.
    Bessel,
    /// Ideal rectangular passband, zero phase.
    Brickwall,
}

/// Anything sampled that a frequency-domain filter can act on.
pub trait Sampled: Sized {
    fn sample_rate(&self) -> f64;
    fn to_complex(&self) -> Vec<Complex64>;
    fn with_complex(&self, data: Vec<Complex64>) -> Self;
}

impl Sampled for Waveform {
    fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    fn to_complex(&self) -> Vec<Complex64> {
        self.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn with_complex(&self, data: Vec<Complex64>) -> Self {
        Waveform {
            samples: data.into_iter().map(|c| c.re).collect(),
            sample_rate: self.sample_rate,
            occupied_bw: self.occupied_bw,
        }
    }
}

impl Sampled for OpticalField {
    fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    fn to_complex(&self) -> Vec<Complex64> {
        self.envelope.clone()
    }

    fn with_complex(&self, data: Vec<Complex64>) -> Self {
        OpticalField { envelope: data, sample_rate: self.sample_rate, wavelength_nm: self.wavelength_nm }
    }
}

// Bessel-Thomson order 4, unit DC group delay: 105 / (s⁴ + 10s³ + 45s² + 105s + 105).
fn bessel4(w: f64) -> Complex64 {
    let s = Complex64::new(0.0, w);
    let den = s.powi(4) + 10.0 * s.powi(3) + 45.0 * s.powi(2) + 105.0 * s + 105.0;
    Complex64::new(105.0, 0.0) / den
}

fn bessel4_3db() -> f64 {
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let (mut lo, mut hi) = (1.0, 4.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel4(mid).norm() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Frequency response of a lowpass with 3-dB corner `f3db` (Hz).
pub fn lowpass_response(shape: FilterShape, f3db: f64) -> impl Fn(f64) -> Complex64 {
    let w3 = bessel4_3db();
    move |f: f64| {
        let x = f.abs() / f3db;
        match shape {
            FilterShape::Gaussian => Complex64::new((-0.5 * std::f64::consts::LN_2 * x * x).exp(), 0.0),
            FilterShape::Brickwall => {
                let m = if x < 1.0 {
                    1.0
                } else if x == 1.0 {
                    std::f64::consts::FRAC_1_SQRT_2
                } else {
                    0.0
                };
                Complex64::new(m, 0.0)
            }
            FilterShape::Bessel => {
                let w = w3 * f / f3db;
                bessel4(w) * Complex64::from_polar(1.0, w)
            }
        }
    }
}

/// Frequency-domain lowpass with unit DC gain. The corner must lie below
/// the Nyquist frequency of the sampling grid.
pub fn lowpass<S: Sampled>(sig: &S, f3db: f64, shape: FilterShape) -> Result<S> {
    let nyq = 0.5 * sig.sample_rate();
    if !(f3db > 0.0 && f3db < nyq) {
        return Err(Error::param(format!(
            "lowpass corner {:.4} GHz must lie in (0, Nyquist = {:.4} GHz)",
            f3db / 1e9,
            nyq / 1e9
        )));
    }
    let data = sig.to_complex();
    Ok(sig.with_complex(filter_complex(&data, sig.sample_rate(), lowpass_response(shape, f3db))))
}

/// [`lowpass`] that passes the signal through untouched when the corner is
/// at or above Nyquist (including infinite bandwidth).
pub fn lowpass_or_bypass<S: Sampled + Clone>(sig: &S, f3db: f64, shape: FilterShape) -> Result<S> {
    if f3db >= 0.5 * sig.sample_rate() {
        return Ok(sig.clone());
    }
    lowpass(sig, f3db, shape)
}

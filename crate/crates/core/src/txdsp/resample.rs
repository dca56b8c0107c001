use num_complex::Complex64;

use super::waveform::Waveform;
use crate::error::{Error, Result};
use crate::spectrum::fourier_resample;

/// Occupied band exceeds the Nyquist frequency of a resampling target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasingWarning {
    pub occupied_bw: f64,
    pub target_nyquist: f64,
}

impl std::fmt::Display for AliasingWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "occupied bandwidth {:.3} GHz exceeds target Nyquist {:.3} GHz; content above it is discarded",
            self.occupied_bw / 1e9,
            self.target_nyquist / 1e9
        )
    }
}

/// Compares the declared occupied bandwidth against the target Nyquist
/// frequency. Waveforms without a declared band are not checked.
pub fn aliasing_check(wf: &Waveform, target_rate: f64) -> Option<AliasingWarning> {
    let bw = wf.occupied_bw?;
    let nyq = 0.5 * target_rate;
    (bw > nyq * (1.0 + 1e-12)).then_some(AliasingWarning { occupied_bw: bw, target_nyquist: nyq })
}

/// Band-limited resampling in the frequency domain. The output keeps the
/// duration of the input to within one output sample. Occupied bandwidth
/// above the target Nyquist frequency is removed and reported through
/// `log::warn!`.
pub fn resample(wf: &Waveform, target_rate: f64) -> Result<Waveform> {
    if !(target_rate.is_finite() && target_rate > 0.0) {
        return Err(Error::param(format!("target rate must be > 0, got {target_rate}")));
    }
    if target_rate == wf.sample_rate {
        return Ok(wf.clone());
    }
    if let Some(w) = aliasing_check(wf, target_rate) {
        log::warn!("resampling to {:.3} GSa/s: {w}", target_rate / 1e9);
    }
    let out_len = (wf.len() as f64 * target_rate / wf.sample_rate).round() as usize;
    let buf: Vec<Complex64> = wf.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let samples = fourier_resample(&buf, out_len).into_iter().map(|c| c.re).collect();
    let occupied_bw = wf.occupied_bw.map(|b| b.min(0.5 * target_rate));
    Ok(Waveform { samples, sample_rate: target_rate, occupied_bw })
}

use super::filters::{lowpass_or_bypass, FilterShape};
use crate::error::Result;
use crate::txdsp::{quantize_midrise, resample, Waveform};

/// Oscilloscope capture: front-end lowpass at `bw_hz`, resampling to
/// `rate_hz`, then mid-rise quantization to `bits` over an auto-ranged full
/// scale equal to the largest magnitude. `bits = 0` skips quantization.
pub fn adc_capture(wf: &Waveform, rate_hz: f64, bits: u32, bw_hz: f64, shape: FilterShape) -> Result<Waveform> {
    let filtered = lowpass_or_bypass(wf, bw_hz, shape)?;
    let mut out = resample(&filtered, rate_hz)?;
    if bits > 0 {
        let fs = out.peak();
        if fs > 0.0 {
            out.samples = quantize_midrise(&out.samples, fs, bits);
        }
    }
    Ok(out)
}

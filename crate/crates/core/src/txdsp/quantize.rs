use super::waveform::Waveform;
use crate::error::{Error, Result};

/// Mid-rise uniform quantizer with `2^bits` codes over `[-full_scale,
/// full_scale]`; out-of-range values clip to the end codes.
pub fn quantize_midrise(samples: &[f64], full_scale: f64, bits: u32) -> Vec<f64> {
    let codes = (1u64 << bits) as f64;
    let step = 2.0 * full_scale / codes;
    let lo = -codes / 2.0;
    let hi = codes / 2.0 - 1.0;
    samples.iter().map(|&x| ((x / step).floor().clamp(lo, hi) + 0.5) * step).collect()
}

/// DAC model: mid-rise quantizer over the normalized range `[-1, 1]`.
pub fn dac_quantize(wf: &Waveform, bits: u32) -> Result<Waveform> {
    if !(1..=16).contains(&bits) {
        return Err(Error::param(format!("DAC resolution must be 1..=16 bits, got {bits}")));
    }
    Ok(Waveform { samples: quantize_midrise(&wf.samples, 1.0, bits), ..wf.clone() })
}

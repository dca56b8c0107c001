//! Transmitter DSP: PRBS generation, PAM mapping, shaped symbol sampling,
//! RRC pulse shaping, band-limited resampling and DAC quantization.

mod mapping;
mod prbs;
mod pulse;
mod quantize;
mod resample;
mod waveform;

pub use mapping::{map_uniform, map_uniform_pam8, sample_shaped_symbols, Labeling, SymbolSequence};
pub use prbs::{prbs, Prbs};
pub use pulse::{matched_filter, pulse_shape, rrc_taps, AffineScale};
pub use quantize::{dac_quantize, quantize_midrise};
pub use resample::{aliasing_check, resample, AliasingWarning};
pub use waveform::{read_raw, write_raw, Waveform};

/// AWG sample rate (GSa/s) for each full-rate symbol rate (GBd).
pub const PAPER_AWG_TABLE: [(f64, f64); 4] = [(71.0, 100.0), (80.0, 107.0), (85.0, 113.0), (90.0, 120.0)];

/// Looks up the `paper-awg` preset; symbol rates are matched within 0.5 GBd.
pub fn paper_awg_rate_gsa(baud_gbd: f64) -> Option<f64> {
    PAPER_AWG_TABLE.iter().find(|(b, _)| (b - baud_gbd).abs() < 0.5).map(|&(_, r)| r)
}

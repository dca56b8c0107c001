//! Transmit DSP: shaped symbols, RRC pulse shaping, AWG resampling and an
//! 8-bit DAC.
//!
//! cargo run --example transmitter

use pamshape::shaping::{shaped_for_entropy, LevelAlphabet};
use pamshape::txdsp::{
    dac_quantize, paper_awg_rate_gsa, pulse_shape, resample, rrc_taps, sample_shaped_symbols, AffineScale,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let baud = 85e9;
    let dist = shaped_for_entropy(&LevelAlphabet::pam8(), 5.0, 2.5492)?;
    let seq = sample_shaped_symbols(&dist, 50_000, 11)?;
    let freq: Vec<String> = seq.level_frequencies().iter().map(|p| format!("{p:.3}")).collect();
    let want: Vec<String> = dist.probs().iter().map(|p| format!("{p:.3}")).collect();
    println!("level frequencies {}", freq.join(" "));
    println!("target            {}", want.join(" "));

    let (rolloff, sps) = (0.4, 4);
    let taps = rrc_taps(rolloff, 64, sps)?;
    let scale = AffineScale::rms(&dist, 0.36, sps);
    let wf = pulse_shape(&seq, &taps, sps, baud, scale)?.with_occupied_bw(0.5 * baud * (1.0 + rolloff));
    let awg = paper_awg_rate_gsa(baud / 1e9).ok_or("no AWG rate")? * 1e9;
    let at_awg = resample(&wf, awg)?;
    let dac = dac_quantize(&at_awg, 8)?;
    println!(
        "{} samples at {:.0} GSa/s -> {} at {:.0} GSa/s",
        wf.len(),
        wf.sample_rate / 1e9,
        dac.len(),
        dac.sample_rate / 1e9
    );
    println!("drive rms {:.3}, peak {:.3} (DAC full scale 1)", dac.mean_power().sqrt(), dac.peak());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

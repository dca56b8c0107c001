//! Gardner timing recovery on a PAM-8 RRC signal sampled with a 50 ppm
//! clock offset.
//!
//! cargo run --example timing_recovery

use pamshape::rxdsp::{downsample_to_1sps, timing_recover};
use pamshape::shaping::{LevelAlphabet, ShapedDistribution};
use pamshape::txdsp::{
    map_uniform_pam8, matched_filter, prbs, pulse_shape, resample, rrc_taps, AffineScale, Labeling, Waveform,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let baud = 17e9;
    let ppm = 50.0;
    let seq = map_uniform_pam8(&prbs(15, 3, 3 * 40_000)?, Labeling::Gray)?;
    let dist = ShapedDistribution::uniform(LevelAlphabet::pam8());
    let taps = rrc_taps(0.4, 64, 4)?;
    let tx = pulse_shape(&seq, &taps, 4, baud, AffineScale::rms(&dist, 0.3, 4))?;

    // Sample at a rate `ppm` fast but label it nominal: the receiver sees a
    // clock offset.
    let fast = resample(&tx, 2.0 * baud * (1.0 + ppm * 1e-6))?;
    let rx = Waveform::new(fast.samples, 2.0 * baud)?;
    let mf = matched_filter(&rx, &rrc_taps(0.4, 64, 2)?);
    let rec = timing_recover(&mf, baud)?;
    println!("estimated clock offset {:.1} ppm (true {ppm})", rec.freq_offset * 1e6);

    let (symbols, _) = downsample_to_1sps(&rec.waveform);
    let tail = &symbols[symbols.len() / 2..];
    // Eight clusters after convergence: print the spread around each.
    let mut sorted = tail.to_vec();
    sorted.sort_by(f64::total_cmp);
    let per = sorted.len() / 8;
    for (k, chunk) in sorted.chunks(per).take(8).enumerate() {
        let c = &chunk[per / 10..per - per / 10];
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let sd = (c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / c.len() as f64).sqrt();
        println!("level {k}: {mean:+.3} ± {sd:.3}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

//! Behavioural optical link: how the received electrical signal degrades as
//! the VOA lowers the received optical power.
//!
//! cargo run --example optical_link

use pamshape::channel::{run_link, LinkConfig};
use pamshape::shaping::{LevelAlphabet, ShapedDistribution};
use pamshape::txdsp::{map_uniform_pam8, prbs, pulse_shape, rrc_taps, AffineScale, Labeling};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let baud = 17e9;
    let seq = map_uniform_pam8(&prbs(15, 1, 3 * 20_000)?, Labeling::Gray)?;
    let dist = ShapedDistribution::uniform(LevelAlphabet::pam8());
    let taps = rrc_taps(0.4, 64, 4)?;
    let tx = pulse_shape(&seq, &taps, 4, baud, AffineScale::rms(&dist, 0.36, 4))?;

    let mut link = LinkConfig { awg_bw_ghz: 6.5, tosa_bw_ghz: 8.0, optical_filter_nm: 0.4, ..LinkConfig::default() };
    link.pd.bw_ghz = 14.0;
    link.ea.bw_ghz = 14.0;
    link.dso.rate_gsa = 51.2;
    link.dso.bw_ghz = 22.6;
    link.eml.driver_saturation = 0.5;
    link.validate()?;

    // A noise-free run gives the signal; the difference to a noisy run with
    // the same seed is the noise.
    let clean = link.clone().noiseless();
    println!("{:>9} {:>12} {:>10}", "ROP dBm", "signal mA", "SNR dB");
    for rop in [-16.0, -12.0, -8.0, -4.0] {
        let noisy = run_link(&tx, &link, rop)?;
        let reference = run_link(&tx, &clean, rop)?;
        let mean = reference.mean();
        let sig: f64 = reference.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / reference.len() as f64;
        let noise: f64 = noisy.samples.iter().zip(&reference.samples).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            / noisy.len() as f64;
        println!("{rop:>9.1} {:>12.4} {:>10.2}", 1e3 * sig.sqrt(), 10.0 * (sig / noise).log10());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

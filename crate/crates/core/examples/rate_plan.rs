//! Entropy needed to carry a fixed net rate at each symbol rate, with 7 %
//! overhead hard-decision FEC.
//!
//! cargo run --example rate_plan

use pamshape::shaping::{fec_rate_from_overhead, RatePlan};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let r_fec = fec_rate_from_overhead(7.0)?;
    for (net, bauds) in [(200e9, [71e9, 80e9, 85e9, 90e9]), (40e9, [14.2e9, 16e9, 17e9, 18e9])] {
        println!("net {} Gb/s, r_fec = {r_fec:.5}", net / 1e9);
        println!("{:>8} {:>8} {:>8} {:>10} {:>9}", "GBd", "H", "SE", "m - H", "net Gb/s");
        for baud in bauds {
            // The lowest baud is the uniform reference and runs slightly
            // above the net rate.
            let plan = match RatePlan::solve(net, baud, 3, r_fec) {
                Ok(p) => p,
                Err(_) => RatePlan::uniform(baud, 3, r_fec),
            };
            println!(
                "{:>8.1} {:>8.4} {:>8.4} {:>10.4} {:>9.2}",
                baud / 1e9,
                plan.entropy,
                plan.spectral_efficiency(),
                plan.ps_overhead(),
                plan.achieved_net_rate() / 1e9
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

//! Midpoint against MAP decision thresholds for shaped PAM-8 in Gaussian
//! noise.
//!
//! cargo run --example map_decisions

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pamshape::rxdsp::{decide, map_thresholds};
use pamshape::shaping::{shaped_for_entropy, LevelAlphabet};
use pamshape::txdsp::sample_shaped_symbols;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let alphabet = LevelAlphabet::pam8();
    let dist = shaped_for_entropy(&alphabet, 2.0, 2.4185)?;
    let seq = sample_shaped_symbols(&dist, 400_000, 2)?;
    let means = alphabet.levels().to_vec();
    let uniform = vec![1.0 / 8.0; 8];
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    println!("{:>6} {:>12} {:>12}", "sigma", "SER midpoint", "SER MAP");
    for sigma in [0.15, 0.2, 0.25] {
        let rx: Vec<f64> = seq.amplitudes().iter().map(|a| a + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
        let mid = map_thresholds(&means, sigma, &uniform)?;
        let map = map_thresholds(&means, sigma, dist.probs())?;
        let ser = |d: Vec<u8>| d.iter().zip(&seq.indices).filter(|(a, b)| a != b).count() as f64 / d.len() as f64;
        println!("{sigma:>6} {:>12.4e} {:>12.4e}", ser(decide(&rx, &mid)), ser(decide(&rx, &map)));
    }
    let rule = map_thresholds(&means, 0.25, dist.probs())?;
    let t: Vec<String> = rule.thresholds.iter().map(|t| format!("{t:.3}")).collect();
    println!("MAP thresholds at sigma 0.25: {}", t.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

//! Super-Gaussian Maxwell-Boltzmann distributions on PAM-8 at one entropy
//! for several Gaussian orders.
//!
//! cargo run --example shaping_family

use pamshape::shaping::{shaped_for_entropy, LevelAlphabet};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let alphabet = LevelAlphabet::pam8();
    let h = 2.5492;
    println!("PAM-8 at H = {h} bit/symbol");
    println!("{:>5} {:>9}  P(0) .. P(7)", "alpha", "v");
    for alpha in [1.0, 2.0, 3.5, 5.0, 8.0] {
        let d = shaped_for_entropy(&alphabet, alpha, h)?;
        let probs: Vec<String> = d.probs().iter().map(|p| format!("{p:.4}")).collect();
        println!("{alpha:>5} {:>9.5}  {}", d.nu(), probs.join(" "));
        assert!((d.entropy() - h).abs() < 1e-6);
    }
    // Higher order flattens the inner levels and starves the outer ones.
    let a2 = shaped_for_entropy(&alphabet, 2.0, h)?;
    let a5 = shaped_for_entropy(&alphabet, 5.0, h)?;
    println!(
        "outer-level probability: alpha 2 -> {:.4}, alpha 5 -> {:.4}",
        a2.outer_probability(),
        a5.outer_probability()
    );
    println!("variance: alpha 2 -> {:.3}, alpha 5 -> {:.3}", a2.variance(), a5.variance());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

//! Linear FFE against a third-order Volterra equalizer on a channel with
//! ISI and a square-law distortion.
//!
//! cargo run --example volterra_equalizer

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pamshape::rxdsp::{equalize, feature_count, train_volterra, TrainSpec};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 60_000;
    let x: Vec<f64> = (0..n).map(|_| (rng.random_range(0..8) as f64 - 3.5) / 3.5).collect();
    // One precursor, main tap, two postcursors.
    let isi = [0.15, 1.0, 0.3, -0.1];
    let mut y = vec![0.0; n];
    for (i, yi) in y.iter_mut().enumerate() {
        let mut z = 0.0;
        for (k, h) in isi.iter().enumerate() {
            if let Some(&xv) = (i + 1).checked_sub(k).and_then(|j| x.get(j)) {
                z += h * xv;
            }
        }
        *yi = z + 0.15 * z * z + 0.01 * rng.sample::<f64, _>(StandardNormal);
    }

    println!("{:>14} {:>8} {:>12} {:>12}", "memory", "coeffs", "train MSE", "held-out MSE");
    for (l1, l2, l3) in [(15, 0, 0), (15, 5, 0), (15, 5, 3), (311, 11, 11)] {
        if l1 > 100 {
            // The full-size kernel: just the coefficient count.
            println!("{:>14} {:>8}", format!("({l1},{l2},{l3})"), feature_count(l1, l2, l3));
            continue;
        }
        let t = train_volterra(&y, &x, &TrainSpec::least_squares(l1, l2, l3))?;
        println!(
            "{:>14} {:>8} {:>12.3e} {:>12.3e}",
            format!("({l1},{l2},{l3})"),
            t.model.len(),
            t.training_mse,
            t.heldout_mse
        );
        if l2 > 0 {
            println!("{:>14} nonlinear/linear energy {:.3}", "", t.model.nonlinear_energy() / t.model.linear_energy());
        }
    }
    let t = train_volterra(&y, &x, &TrainSpec::least_squares(15, 5, 3))?;
    let eq = equalize(&y, &t.model);
    println!("equalized {} of {} symbols", eq.valid.len(), eq.values.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Raised-cosine pulse with unit symbol period.
pub fn rc_pulse(t: f64, beta: f64) -> f64 {
    let sinc = |x: f64| if x.abs() < 1e-12 { 1.0 } else { (PI * x).sin() / (PI * x) };
    let d = 1.0 - (2.0 * beta * t).powi(2);
    if d.abs() < 1e-9 {
        PI / 4.0 * sinc(1.0 / (2.0 * beta))
    } else {
        sinc(t) * (PI * beta * t).cos() / d
    }
}

/// Random PAM-8 amplitudes in `[-3.5, 3.5]`.
pub fn pam8_symbols(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..8) as f64 - 3.5).collect()
}

/// Samples of `Σ a_k g(t − k − delay)` at `t = n / (2 (1 + sfo))`, i.e. a
/// matched-filtered RRC signal seen by a receiver whose clock runs `sfo`
/// fast relative to two samples per symbol. `delay` is in UI.
pub fn rc_signal(symbols: &[f64], beta: f64, delay: f64, sfo: f64) -> Vec<f64> {
    let span = 40isize;
    let n_samples = ((symbols.len() as f64) * 2.0 * (1.0 + sfo)) as usize;
    (0..n_samples)
        .map(|n| {
            let t = n as f64 / (2.0 * (1.0 + sfo));
            let k0 = (t - delay).round() as isize;
            let mut acc = 0.0;
            for k in (k0 - span).max(0)..(k0 + span).min(symbols.len() as isize) {
                acc += symbols[k as usize] * rc_pulse(t - k as f64 - delay, beta);
            }
            acc
        })
        .collect()
}

/// Distance in UI of each strobe (in samples of the 2-sps grid) from the
/// nearest symbol peak for a signal produced by [`rc_signal`].
pub fn strobe_errors(strobes: &[f64], delay: f64, sfo: f64) -> Vec<f64> {
    strobes
        .iter()
        .map(|s| {
            let t = s / (2.0 * (1.0 + sfo)) - delay;
            t - t.round()
        })
        .collect()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

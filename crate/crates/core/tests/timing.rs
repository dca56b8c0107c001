mod common;

use common::{pam8_symbols, rc_signal, rms, strobe_errors};
use pamshape::rxdsp::{downsample_to_1sps, gardner_error, timing_recover, timing_recover_with, TimingConfig};
use pamshape::shaping::{LevelAlphabet, ShapedDistribution};
use pamshape::txdsp::{
    map_uniform_pam8, matched_filter, prbs, pulse_shape, resample, rrc_taps, AffineScale, Labeling, Waveform,
};

const BETA: f64 = 0.4;

/// Mean Gardner output at a fixed sampling delay (UI), unit-RMS input.
fn s_curve(delay: f64) -> f64 {
    let x = rc_signal(&pam8_symbols(6000, 1), BETA, delay, 0.0);
    let r = rms(&x);
    let x: Vec<f64> = x.iter().map(|v| v / r).collect();
    let (mut acc, mut n) = (0.0, 0);
    let mut k = 100;
    while k + 2 < x.len() - 100 {
        acc += gardner_error(x[k], x[k + 1], x[k + 2]);
        n += 1;
        k += 2;
    }
    acc / n as f64
}

fn residual(delay: f64, sfo: f64) -> (f64, f64) {
    let x = rc_signal(&pam8_symbols(40_000, 2), BETA, delay, sfo);
    let wf = Waveform::new(x, 2.0).unwrap();
    let tr = timing_recover(&wf, 1.0).unwrap();
    let e = strobe_errors(&tr.strobes, delay, sfo);
    (rms(&e[e.len() / 2..]), tr.freq_offset)
}

#[test]
fn s_curve_is_odd_with_single_zero() {
    let delays: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05).collect();
    let s: Vec<f64> = delays.iter().map(|&d| s_curve(d)).collect();
    let peak = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..delays.len() {
        assert!((s[i] + s[delays.len() - 1 - i]).abs() < 0.02 * peak, "not odd at {}", delays[i]);
    }
    // Sampling late (peaks earlier than the strobes, negative delay) gives a
    // positive error.
    for (d, v) in delays.iter().zip(&s) {
        if *d < -0.01 && *d > -0.49 {
            assert!(*v > 0.0, "{d}: {v}");
        }
    }
    let inner: Vec<f64> = delays.iter().zip(&s).filter(|(d, _)| d.abs() <= 0.3).map(|(_, v)| *v).collect();
    let sign_changes = inner
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum() && w[1].abs() > 1e-3 * peak && w[0].abs() > 1e-3 * peak)
        .count();
    assert!(sign_changes <= 1);
    assert!(s_curve(0.0).abs() < 1e-3, "timed detector mean {}", s_curve(0.0));
}

#[test]
fn default_detector_gain_matches_measured_slope() {
    // Slope per sample at 2 samples/symbol: one sample is half a UI.
    let slope = (s_curve(-0.02) - s_curve(0.02)) / 0.04 * 0.5;
    let g = TimingConfig::default().detector_gain;
    assert!((slope / g - 1.0).abs() < 0.1, "slope {slope} vs {g}");
}

#[test]
fn static_offset_converges() {
    let (r, _) = residual(0.1, 0.0);
    assert!(r < 0.01, "{r}");
}

#[test]
fn frequency_and_phase_offsets_are_tracked() {
    for delay in [-0.3, 0.0, 0.3] {
        let (r, fo) = residual(delay, 50e-6);
        assert!(r < 0.02, "delay {delay}: residual {r} UI");
        assert!((fo - 50e-6).abs() < 1e-6, "delay {delay}: clock estimate {fo}");
    }
}

#[test]
fn wider_loop_still_locks() {
    let x = rc_signal(&pam8_symbols(20_000, 3), BETA, 0.25, 100e-6);
    let wf = Waveform::new(x, 2.0).unwrap();
    let cfg = TimingConfig { loop_bw: 0.005, ..TimingConfig::default() };
    let tr = timing_recover_with(&wf, 1.0, &cfg).unwrap();
    let e = strobe_errors(&tr.strobes, 0.25, 100e-6);
    let r = rms(&e[e.len() / 2..]);
    assert!(r < 0.02, "{r} {}", tr.freq_offset);
}

fn rrc_loopback(extra_delay: usize) -> (Waveform, Vec<u8>) {
    let bits = prbs(15, 1, 3 * 8000).unwrap();
    let seq = map_uniform_pam8(&bits, Labeling::Gray).unwrap();
    let dist = ShapedDistribution::uniform(LevelAlphabet::pam8());
    let taps = rrc_taps(BETA, 64, 4).unwrap();
    let wf = pulse_shape(&seq, &taps, 4, 1.0, AffineScale::rms(&dist, 0.3, 4)).unwrap();
    let two = resample(&wf, 2.0).unwrap();
    let mut samples = vec![0.0; extra_delay];
    samples.extend_from_slice(&two.samples);
    let delayed = Waveform::new(samples, 2.0).unwrap();
    (matched_filter(&delayed, &rrc_taps(BETA, 64, 2).unwrap()), seq.indices)
}

#[test]
fn matched_filter_phase_follows_delay_parity() {
    // Symbol k peaks at sample 2k + 64 (+ extra delay) after decimation.
    assert_eq!(downsample_to_1sps(&rrc_loopback(0).0).1, 0);
    assert_eq!(downsample_to_1sps(&rrc_loopback(1).0).1, 1);
}

#[test]
fn rrc_loopback_recovers_symbols_after_timing() {
    let (mf, idx) = rrc_loopback(1);
    let tr = timing_recover(&mf, 1.0).unwrap();
    let (obs, phase) = downsample_to_1sps(&tr.waveform);
    assert_eq!(phase, 1);
    // Strobes settle on odd input samples: 2k + 65.
    let tail = &tr.strobes[tr.strobes.len() / 2..];
    let err: Vec<f64> = tail.iter().map(|s| (s - 65.0) / 2.0 - ((s - 65.0) / 2.0).round()).collect();
    assert!(rms(&err) < 0.01, "{}", rms(&err));
    let k0 = ((tail[0] - 65.0) / 2.0).round() as usize;
    let j0 = tr.strobes.len() / 2;
    let lo = obs[j0..].iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = obs[j0..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let step = (hi - lo) / 7.0;
    for (j, v) in obs[j0..obs.len() - 40].iter().enumerate() {
        let level = ((v - lo) / step).round() as u8;
        assert_eq!(level, idx[k0 + j], "symbol {}", k0 + j);
    }
}

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::txdsp::{resample, Waveform};

const INTERP_HALF: usize = 8;
const INTERP_PHASES: usize = 512;

/// Windowed-sinc fractional-delay interpolator with a precomputed phase
/// table (16 taps, Blackman window, 512 phases).
#[derive(Debug, Clone)]
pub struct Interpolator {
    table: Vec<[f64; 2 * INTERP_HALF]>,
}

impl Default for Interpolator {
    fn default() -> Self {
        Self::new()
    }
}

impl Interpolator {
    pub fn new() -> Self {
        let taps = 2 * INTERP_HALF;
        let table = (0..=INTERP_PHASES)
            .map(|p| {
                let mu = p as f64 / INTERP_PHASES as f64;
                let mut row = [0.0; 2 * INTERP_HALF];
                for (k, h) in row.iter_mut().enumerate() {
                    // Tap k sits at offset (k - HALF + 1) from the base sample.
                    let x = k as f64 - (INTERP_HALF as f64 - 1.0) - mu;
                    let sinc = if x.abs() < 1e-12 { 1.0 } else { (PI * x).sin() / (PI * x) };
                    let wpos = (x + INTERP_HALF as f64) / taps as f64;
                    let w = 0.42 - 0.5 * (2.0 * PI * wpos).cos() + 0.08 * (4.0 * PI * wpos).cos();
                    *h = sinc * w;
                }
                let sum: f64 = row.iter().sum();
                for h in row.iter_mut() {
                    *h /= sum;
                }
                row
            })
            .collect();
        Self { table }
    }

    /// Band-limited value of `x` at fractional index `t`; samples outside
    /// the buffer count as zero.
    pub fn at(&self, x: &[f64], t: f64) -> f64 {
        let base = t.floor();
        let mu = t - base;
        let row = &self.table[(mu * INTERP_PHASES as f64).round() as usize];
        let first = base as isize - (INTERP_HALF as isize - 1);
        let mut acc = 0.0;
        for (k, h) in row.iter().enumerate() {
            let i = first + k as isize;
            if i >= 0 && (i as usize) < x.len() {
                acc += h * x[i as usize];
            }
        }
        acc
    }
}

/// Gardner timing error `mid · (cur - prev)`: positive when the strobes
/// are late.
pub fn gardner_error(prev: f64, mid: f64, cur: f64) -> f64 {
    mid * (cur - prev)
}

/// Second-order (proportional-integral) loop parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig {
    /// Loop noise bandwidth normalized to the symbol rate.
    pub loop_bw: f64,
    pub damping: f64,
    /// Detector slope for unit-power input, per sample of timing error at
    /// 2 samples/symbol. The default is the measured S-curve slope for
    /// PAM-8 through a β = 0.4 raised-cosine channel.
    pub detector_gain: f64,
    /// Largest tolerated relative clock offset before the loop is declared
    /// diverged.
    pub max_freq_offset: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self { loop_bw: 0.002, damping: 1.0, detector_gain: 0.68, max_freq_offset: 0.01 }
    }
}

impl TimingConfig {
    fn gains(&self) -> (f64, f64) {
        let z = self.damping;
        let theta = self.loop_bw / (z + 0.25 / z);
        let d = 1.0 + 2.0 * z * theta + theta * theta;
        let kp = 4.0 * z * theta / (d * self.detector_gain);
        let ki = 4.0 * theta * theta / (d * self.detector_gain);
        (kp, ki)
    }
}

/// Output of [`timing_recover`].
#[derive(Debug, Clone)]
pub struct TimingRecovery {
    /// Two samples per symbol, `[mid, on-time]` per symbol, zero mean and
    /// unit RMS.
    pub waveform: Waveform,
    /// On-time strobe positions in samples of the nominal 2 sps input grid.
    pub strobes: Vec<f64>,
    /// Detector output per symbol.
    pub ted: Vec<f64>,
    /// Relative clock-rate offset (input samples per symbol / 2 − 1),
    /// averaged over the second half of the strobes.
    pub freq_offset: f64,
}

/// Gardner timing recovery with default loop parameters.
pub fn timing_recover(wf: &Waveform, baud: f64) -> Result<TimingRecovery> {
    timing_recover_with(wf, baud, &TimingConfig::default())
}

/// Resamples to nominal 2 samples/symbol, removes the mean, normalizes to
/// unit RMS and runs a Gardner-driven PI loop that steers a fractional-delay
/// interpolator.
pub fn timing_recover_with(wf: &Waveform, baud: f64, cfg: &TimingConfig) -> Result<TimingRecovery> {
    if !(baud > 0.0) {
        return Err(Error::param("baud must be > 0"));
    }
    if wf.sample_rate < 2.0 * baud * (1.0 - 1e-9) {
        return Err(Error::param(format!(
            "timing recovery needs >= 2 samples/symbol, got {:.4}",
            wf.sample_rate / baud
        )));
    }
    let two_sps = resample(wf, 2.0 * baud)?;
    let mean = two_sps.mean();
    let mut x: Vec<f64> = two_sps.samples.iter().map(|v| v - mean).collect();
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt();
    if !(rms > 0.0) {
        return Err(Error::Convergence("input has no signal energy".into()));
    }
    for v in x.iter_mut() {
        *v /= rms;
    }

    let interp = Interpolator::new();
    let (kp, ki) = cfg.gains();
    let nominal = 2.0;
    let mut integ = 0.0;
    let mut tau = nominal;
    let mut prev = interp.at(&x, tau - nominal);
    let end = x.len() as f64 - 1.0;

    let n_est = x.len() / 2 + 2;
    let mut out = Vec::with_capacity(2 * n_est);
    let mut strobes = Vec::with_capacity(n_est);
    let mut ted = Vec::with_capacity(n_est);
    while tau <= end {
        let period = nominal + integ;
        let mid = interp.at(&x, tau - 0.5 * period);
        let cur = interp.at(&x, tau);
        let e = gardner_error(prev, mid, cur);
        out.push(mid);
        out.push(cur);
        strobes.push(tau);
        ted.push(e);
        integ -= ki * e;
        if integ.abs() > cfg.max_freq_offset * nominal {
            return Err(Error::Convergence(format!(
                "clock offset estimate {:.3e} left the pull-in range",
                integ / nominal
            )));
        }
        tau += nominal + integ - kp * e;
        prev = cur;
    }

    let q = ted.len() / 4;
    if q >= 16 {
        let var = |s: &[f64]| {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / s.len() as f64
        };
        let first = var(&ted[..q]);
        let last = var(&ted[ted.len() - q..]);
        if last > 2.0 * first {
            return Err(Error::Convergence(format!("detector variance grew from {first:.3e} to {last:.3e}")));
        }
    }

    let freq_offset = if strobes.len() >= 4 {
        let h = strobes.len() / 2;
        (strobes[strobes.len() - 1] - strobes[h]) / ((strobes.len() - 1 - h) as f64 * nominal) - 1.0
    } else {
        integ / nominal
    };
    Ok(TimingRecovery {
        waveform: Waveform { samples: out, sample_rate: 2.0 * baud, occupied_bw: two_sps.occupied_bw },
        strobes,
        ted,
        freq_offset,
    })
}

/// Keeps one of the two phases of a 2 samples/symbol stream: the one with
/// the larger mean square. Equal energy selects phase 0.
pub fn downsample_to_1sps(wf: &Waveform) -> (Vec<f64>, usize) {
    let mut energy = [0.0f64; 2];
    for (i, v) in wf.samples.iter().enumerate() {
        energy[i % 2] += v * v;
    }
    let n0 = wf.samples.len().div_ceil(2).max(1) as f64;
    let n1 = (wf.samples.len() / 2).max(1) as f64;
    let phase = usize::from(energy[1] / n1 > energy[0] / n0);
    (wf.samples.iter().skip(phase).step_by(2).copied().collect(), phase)
}

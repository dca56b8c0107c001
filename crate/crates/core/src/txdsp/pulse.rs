use std::f64::consts::PI;

use super::mapping::SymbolSequence;
use super::waveform::Waveform;
use crate::error::{Error, Result};
use crate::shaping::{LevelAlphabet, ShapedDistribution};

/// Root-raised-cosine taps, `span · sps + 1` long, symmetric, unit energy.
///
/// The closed form is singular at `t = 0` and `t = ±T/(4β)`; both points use
/// their analytic limits.
pub fn rrc_taps(rolloff: f64, span: usize, sps: usize) -> Result<Vec<f64>> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::param(format!("roll-off must lie in (0, 1], got {rolloff}")));
    }
    if span == 0 || !span.is_multiple_of(2) {
        return Err(Error::param(format!("RRC span must be even and > 0, got {span}")));
    }
    if sps < 2 {
        return Err(Error::param(format!("samples per symbol must be >= 2, got {sps}")));
    }
    let b = rolloff;
    let len = span * sps + 1;
    let mid = (len - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let t = (i as f64 - mid) / sps as f64;
            if t.abs() < 1e-12 {
                1.0 - b + 4.0 * b / PI
            } else if (t.abs() - 1.0 / (4.0 * b)).abs() < 1e-9 {
                b / 2f64.sqrt()
                    * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin() + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
                let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
                num / den
            }
        })
        .collect();
    let energy: f64 = taps.iter().map(|x| x * x).sum();
    let norm = energy.sqrt();
    for t in &mut taps {
        *t /= norm;
    }
    Ok(taps)
}

/// Affine map from nominal level amplitudes to drive amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineScale {
    pub gain: f64,
    pub offset: f64,
}

impl AffineScale {
    pub const IDENTITY: AffineScale = AffineScale { gain: 1.0, offset: 0.0 };

    pub fn apply(&self, x: f64) -> f64 {
        self.gain * x + self.offset
    }

    /// Outermost levels land on `±peak`.
    pub fn peak(alphabet: &LevelAlphabet, peak: f64) -> Self {
        let half_range = 0.5 * (alphabet.levels()[alphabet.len() - 1] - alphabet.levels()[0]);
        let gain = peak / half_range;
        Self { gain, offset: -gain * alphabet.center() }
    }

    /// Gain chosen so that a unit-energy pulse-shaped waveform at `sps`
    /// samples/symbol has RMS `rms` for symbols drawn from `dist`. The
    /// center level maps to zero.
    pub fn rms(dist: &ShapedDistribution, rms: f64, sps: usize) -> Self {
        let gain = rms * (sps as f64).sqrt() / dist.variance().sqrt();
        Self { gain, offset: -gain * dist.alphabet().center() }
    }
}

/// Zero-stuffs the mapped symbols by `sps` and convolves with `taps`.
/// Output length is `len·sps + taps.len() - 1`; the pulse of symbol `k`
/// peaks at sample `k·sps + (taps.len() - 1)/2`.
pub fn pulse_shape(seq: &SymbolSequence, taps: &[f64], sps: usize, baud: f64, scale: AffineScale) -> Result<Waveform> {
    if sps < 2 {
        return Err(Error::param(format!("samples per symbol must be >= 2, got {sps}")));
    }
    if taps.is_empty() {
        return Err(Error::param("empty pulse"));
    }
    let amps = seq.amplitudes();
    let mut out = vec![0.0; amps.len() * sps + taps.len() - 1];
    for (k, a) in amps.iter().enumerate() {
        let a = scale.apply(*a);
        if a == 0.0 {
            continue;
        }
        for (o, t) in out[k * sps..].iter_mut().zip(taps) {
            *o += a * t;
        }
    }
    Waveform::new(out, baud * sps as f64)
}

/// Delay-compensated FIR filtering: output sample `n` is aligned with input
/// sample `n` (taps must be odd-length and symmetric about their center).
pub fn matched_filter(wf: &Waveform, taps: &[f64]) -> Waveform {
    let n = wf.len();
    let half = taps.len() / 2;
    let x = &wf.samples;
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = (i + half).saturating_sub(n - 1);
        let hi = (i + half).min(taps.len() - 1);
        let mut acc = 0.0;
        for j in lo..=hi {
            acc += taps[j] * x[i + half - j];
        }
        *o = acc;
    }
    Waveform { samples: out, sample_rate: wf.sample_rate, occupied_bw: wf.occupied_bw }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shaping::LevelAlphabet;
    use crate::txdsp::mapping::sample_shaped_symbols;

    fn seq(indices: Vec<u8>) -> SymbolSequence {
        SymbolSequence { indices, alphabet: LevelAlphabet::pam8(), source_bits: vec![], seed: 0 }
    }

    #[test]
    fn taps_symmetric_unit_energy() {
        for b in [0.1, 0.25, 0.4, 1.0] {
            let t = rrc_taps(b, 64, 4).unwrap();
            assert_eq!(t.len(), 257);
            for k in 0..t.len() {
                assert!((t[k] - t[t.len() - 1 - k]).abs() < 1e-15);
            }
            assert!((t.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(t.iter().all(|x| x.is_finite()));
        }
        // β = 0.25 with sps = 4 hits t = ±T/(4β) exactly.
        let t = rrc_taps(0.25, 8, 4).unwrap();
        assert!(t.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(rrc_taps(0.0, 64, 4).is_err());
        assert!(rrc_taps(1.1, 64, 4).is_err());
        assert!(rrc_taps(0.4, 63, 4).is_err());
        assert!(rrc_taps(0.4, 64, 1).is_err());
    }

    #[test]
    fn self_convolution_is_nyquist() {
        let sps = 4;
        let t = rrc_taps(0.4, 32, sps).unwrap();
        let n = t.len();
        let g: Vec<f64> = (0..2 * n - 1)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    if i >= j && i - j < n {
                        acc += t[j] * t[i - j];
                    }
                }
                acc
            })
            .collect();
        let c = n - 1;
        for k in 1..(c / sps) {
            assert!((g[c + k * sps] / g[c]).abs() < 1e-3, "k={k}");
            assert!((g[c - k * sps] / g[c]).abs() < 1e-3);
        }
    }

    #[test]
    fn impulse_response_and_dc() {
        let t = rrc_taps(0.4, 16, 4).unwrap();
        let wf = pulse_shape(&seq(vec![1]), &t, 4, 1.0, AffineScale::IDENTITY).unwrap();
        assert_eq!(wf.samples.len(), t.len() + 3);
        assert_eq!(wf.samples[..t.len()], t[..]);
        assert!(wf.samples[t.len()..].iter().all(|&x| x == 0.0));
        let wf0 = pulse_shape(&seq(vec![0]), &t, 4, 1.0, AffineScale::IDENTITY).unwrap();
        assert!(wf0.samples.iter().all(|&x| x == 0.0));
        let scaled = pulse_shape(&seq(vec![0]), &t, 4, 1.0, AffineScale { gain: 1.0, offset: 2.0 }).unwrap();
        for (a, b) in scaled.samples.iter().zip(&t) {
            assert!((a - 2.0 * b).abs() < 1e-15);
        }

        // Constant symbols give a flat waveform up to truncation ripple.
        let t = rrc_taps(0.4, 64, 4).unwrap();
        let n = 400;
        let wf = pulse_shape(&seq(vec![5; n]), &t, 4, 1.0, AffineScale::IDENTITY).unwrap();
        let steady = &wf.samples[t.len()..n * 4 - t.len()];
        let lo = steady.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = steady.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo < 1e-3 * hi.abs(), "{lo} {hi}");
        assert_eq!(wf.len(), n * 4 + t.len() - 1);
    }

    #[test]
    fn matched_filter_loopback_recovers_amplitudes() {
        let sps = 4;
        let t = rrc_taps(0.4, 64, sps).unwrap();
        let dist = crate::shaping::ShapedDistribution::uniform(LevelAlphabet::pam8());
        let s = sample_shaped_symbols(&dist, 2000, 5).unwrap();
        let scale = AffineScale::peak(&LevelAlphabet::pam8(), 1.0);
        let wf = pulse_shape(&s, &t, sps, 1.0, scale).unwrap();
        let mf = matched_filter(&wf, &t);
        let delay = (t.len() - 1) / 2;
        for (k, a) in s.amplitudes().iter().enumerate().skip(40).take(1900) {
            let got = mf.samples[k * sps + delay];
            assert!((got - scale.apply(*a)).abs() < 1e-3, "k={k}: {got}");
        }
    }

    #[test]
    fn power_matches_symbol_power() {
        let sps = 4;
        let t = rrc_taps(0.4, 64, sps).unwrap();
        let dist = crate::shaping::shaped_for_entropy(&LevelAlphabet::pam8(), 2.0, 2.5492).unwrap();
        let s = sample_shaped_symbols(&dist, 100_000, 1).unwrap();
        let scale = AffineScale::rms(&dist, 0.3, sps);
        let wf = pulse_shape(&s, &t, sps, 1.0, scale).unwrap();
        let p = wf.mean_power();
        assert!((p.sqrt() - 0.3).abs() < 0.3 * 0.01, "{}", p.sqrt());
    }
}

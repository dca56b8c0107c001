use crate::channel::{run_link, LinkConfig};
use crate::error::{Error, Result};
use crate::rxdsp::{
    count_ber, decide_and_demap, downsample_to_1sps, equalize, estimate_level_stats, map_thresholds_with,
    timing_recover_with, train_volterra, BerCount, TrainMethod, TrainSpec,
};
use crate::txdsp::{
    dac_quantize, map_uniform, matched_filter, prbs, pulse_shape, resample, rrc_taps, sample_shaped_symbols,
    AffineScale, SymbolSequence, Waveform,
};

use super::{Scenario, SigmaMode, ThresholdMode};

/// Largest transmit/receive symbol offset searched during alignment.
const MAX_LAG: usize = 256;
const PROBE_LEN: usize = 4096;

/// Outcome and diagnostics of one simulated capture.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub ber: BerCount,
    /// Received symbol `j` corresponds to transmitted symbol `j + lag`.
    pub lag: isize,
    pub training_mse: f64,
    pub heldout_mse: f64,
    pub freq_offset: f64,
    pub thresholds: Vec<f64>,
}

/// Symbols of one capture: PRBS-mapped for uniform, i.i.d. draws otherwise.
pub(crate) fn make_symbols(s: &Scenario, n: usize, seed: u64) -> Result<SymbolSequence> {
    let alphabet = s.distribution.alphabet().clone();
    if s.distribution.is_uniform() {
        let m = alphabet.len().trailing_zeros() as usize;
        let order = s.tx.prbs_order;
        let mask = (1u64 << order) - 1;
        let state = ((seed & mask) as u32).max(1);
        let bits = prbs(order, state, n * m)?;
        map_uniform(&bits, &alphabet, s.tx.labeling, seed)
    } else {
        sample_shaped_symbols(&s.distribution, n, seed)
    }
}

/// Transmit DSP: RRC shaping, AWG resampling and DAC quantization.
pub(crate) fn transmit(s: &Scenario, seq: &SymbolSequence) -> Result<Waveform> {
    let tx = &s.tx;
    let taps = rrc_taps(tx.rolloff, tx.span, tx.sps)?;
    let scale = AffineScale::rms(&s.distribution, tx.drive_rms, tx.sps);
    let wf = pulse_shape(seq, &taps, tx.sps, s.baud(), scale)?.with_occupied_bw(0.5 * s.baud() * (1.0 + tx.rolloff));
    let wf = resample(&wf, s.awg_rate_hz)?;
    if tx.dac_bits == 0 {
        Ok(wf)
    } else {
        dac_quantize(&wf, tx.dac_bits)
    }
}

/// Offset maximizing the correlation between received and transmitted
/// amplitudes over a probe window.
fn align(obs: &[f64], amps: &[f64], start: usize) -> Result<isize> {
    let mean_t = amps.iter().sum::<f64>() / amps.len() as f64;
    let end = (start + PROBE_LEN).min(obs.len());
    if end <= start + 64 {
        return Err(Error::Length("capture too short to align".into()));
    }
    let mut best = (f64::NEG_INFINITY, 0isize);
    for lag in -(MAX_LAG as isize)..=MAX_LAG as isize {
        let mut acc = 0.0;
        for (j, o) in obs.iter().enumerate().take(end).skip(start) {
            let k = j as isize + lag;
            if k >= 0 && (k as usize) < amps.len() {
                acc += o * (amps[k as usize] - mean_t);
            }
        }
        if acc > best.0 {
            best = (acc, lag);
        }
    }
    Ok(best.1)
}

/// Simulates one ROP point: symbols → transmitter → link → timing
/// recovery → Volterra equalizer → thresholds → BER on the held-out part.
pub fn simulate_point(s: &Scenario, rop_dbm: f64, n_symbols: usize, seed: u64) -> Result<PointResult> {
    let seq = make_symbols(s, n_symbols, seed)?;
    let tx_wf = transmit(s, &seq)?;
    let link = LinkConfig { seed, ..s.link.clone() };
    let rx_wf = run_link(&tx_wf, &link, rop_dbm)?;
    receive(s, &seq, &rx_wf)
}

pub(crate) fn receive(s: &Scenario, seq: &SymbolSequence, rx_wf: &Waveform) -> Result<PointResult> {
    let baud = s.baud();
    let rx = &s.rx;
    let two_sps = resample(rx_wf, 2.0 * baud)?;
    let mf = matched_filter(&two_sps, &rrc_taps(s.tx.rolloff, s.tx.span, 2)?);
    let tr = timing_recover_with(&mf, baud, &rx.timing())?;
    let (obs, _) = downsample_to_1sps(&tr.waveform);

    let levels = seq.alphabet.levels().to_vec();
    let amps = seq.amplitudes();
    let skip = rx.skip_symbols.min(obs.len() / 10);
    let lag = align(&obs, &amps, skip)?;

    // Pair received symbol j with transmitted symbol j + lag.
    let first = skip.max((-lag).max(0) as usize);
    let last = obs.len().min((amps.len() as isize - lag).max(0) as usize);
    if last <= first {
        return Err(Error::Length("no overlap between transmitted and received symbols".into()));
    }
    let obs = &obs[first..last];
    let idx: Vec<u8> = (first..last).map(|j| seq.indices[(j as isize + lag) as usize]).collect();
    let reference: Vec<f64> = idx.iter().map(|&i| levels[i as usize]).collect();

    let spec = TrainSpec {
        l1: rx.l1,
        l2: rx.l2,
        l3: rx.l3,
        method: TrainMethod::LeastSquares,
        training_fraction: rx.training_fraction,
    };
    let trained = train_volterra(obs, &reference, &spec)?;
    let eq = equalize(obs, &trained.model);

    let train = trained.training.clone();
    let stats = estimate_level_stats(&eq.values[train.clone()], &idx[train], levels.len())?;
    let means = if stats.means.windows(2).all(|w| w[1] > w[0]) {
        stats.means.clone()
    } else {
        log::warn!("{}: estimated level means not increasing; using nominal levels", s.label);
        levels.clone()
    };
    let priors = match rx.thresholds {
        ThresholdMode::Map => s.distribution.probs().to_vec(),
        ThresholdMode::Midpoint => vec![1.0 / levels.len() as f64; levels.len()],
    };
    let rule = map_thresholds_with(&means, &stats.sigma_model(rx.sigma == SigmaMode::Pooled), &priors)?;

    let held = trained.heldout.clone();
    let (_, rx_bits) = decide_and_demap(&eq.values[held.clone()], &rule, s.tx.labeling);
    let m = levels.len().trailing_zeros() as usize;
    let tx_bits = s.tx.labeling.demap(&idx[held], m);
    let ber = count_ber(&tx_bits, &rx_bits)?;
    Ok(PointResult {
        ber,
        lag,
        training_mse: trained.training_mse,
        heldout_mse: trained.heldout_mse,
        freq_offset: tr.freq_offset,
        thresholds: rule.thresholds,
    })
}

//! Prior-aware symbol decisions, demapping and bit-error counting.

use crate::error::{Error, Result};
use crate::txdsp::Labeling;

/// Noise model used when placing thresholds.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaModel {
    /// One standard deviation shared by every level.
    Pooled(f64),
    /// One standard deviation per level.
    PerLevel(Vec<f64>),
}

/// Decision thresholds together with the statistics they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRule {
    pub level_means: Vec<f64>,
    pub sigma: SigmaModel,
    /// `level_means.len() - 1` strictly increasing boundaries.
    pub thresholds: Vec<f64>,
    pub priors: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Equal-variance Gaussian MAP thresholds.
///
/// The boundary between adjacent levels `a < b` is
/// `(μa + μb)/2 + σ² ln(pa/pb) / (μb − μa)`.
pub fn map_thresholds(level_means: &[f64], sigma: f64, priors: &[f64]) -> Result<DecisionRule> {
    map_thresholds_with(level_means, &SigmaModel::Pooled(sigma), priors)
}

/// MAP thresholds under either noise model. With per-level deviations the
/// boundary is the point between the two means where the weighted
/// likelihoods cross.
pub fn map_thresholds_with(level_means: &[f64], sigma: &SigmaModel, priors: &[f64]) -> Result<DecisionRule> {
    let n = level_means.len();
    if n < 2 {
        return Err(Error::param("need at least two levels"));
    }
    if priors.len() != n {
        return Err(Error::Length(format!("{} priors for {n} levels", priors.len())));
    }
    if level_means.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("level means must be strictly increasing"));
    }
    if priors.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::param("priors must be positive"));
    }
    match sigma {
        SigmaModel::Pooled(s) if !(*s > 0.0) => return Err(Error::param("sigma must be > 0")),
        SigmaModel::PerLevel(v) if v.len() != n => {
            return Err(Error::Length(format!("{} sigmas for {n} levels", v.len())))
        }
        SigmaModel::PerLevel(v) if v.iter().any(|s| !(*s > 0.0)) => return Err(Error::param("sigma must be > 0")),
        _ => {}
    }

    let mut thresholds: Vec<f64> = (0..n - 1)
        .map(|i| {
            let (ma, mb) = (level_means[i], level_means[i + 1]);
            let (pa, pb) = (priors[i], priors[i + 1]);
            match sigma {
                SigmaModel::Pooled(s) => 0.5 * (ma + mb) + s * s * (pa / pb).ln() / (mb - ma),
                SigmaModel::PerLevel(v) => crossing(ma, mb, v[i], v[i + 1], pa, pb),
            }
        })
        .collect();

    let mut warnings = Vec::new();
    let min_gap = 1e-9 * (level_means[n - 1] - level_means[0]);
    for i in 1..thresholds.len() {
        if thresholds[i] <= thresholds[i - 1] {
            warnings.push(format!(
                "threshold {i} ({:.4}) not above threshold {} ({:.4}); clamped",
                thresholds[i],
                i - 1,
                thresholds[i - 1]
            ));
            thresholds[i] = thresholds[i - 1] + min_gap;
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(DecisionRule {
        level_means: level_means.to_vec(),
        sigma: sigma.clone(),
        thresholds,
        priors: priors.to_vec(),
        warnings,
    })
}

/// Point in `[ma, mb]` where `pa·N(x; ma, sa)` meets `pb·N(x; mb, sb)`;
/// the interval end nearer the dominant level when they never meet.
fn crossing(ma: f64, mb: f64, sa: f64, sb: f64, pa: f64, pb: f64) -> f64 {
    let g = |x: f64| {
        (pa.ln() - sa.ln() - 0.5 * ((x - ma) / sa).powi(2)) - (pb.ln() - sb.ln() - 0.5 * ((x - mb) / sb).powi(2))
    };
    let (mut lo, mut hi) = (ma, mb);
    let (glo, ghi) = (g(lo), g(hi));
    if glo <= 0.0 {
        return lo;
    }
    if ghi >= 0.0 {
        return hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Level index of every estimate. An estimate exactly on a threshold goes
/// to the lower level.
pub fn decide(estimates: &[f64], rule: &DecisionRule) -> Vec<u8> {
    estimates.iter().map(|&x| rule.thresholds.partition_point(|&t| t < x) as u8).collect()
}

/// Decisions and their demapped bits (`log2 M` per symbol).
pub fn decide_and_demap(estimates: &[f64], rule: &DecisionRule, labeling: Labeling) -> (Vec<u8>, Vec<bool>) {
    let levels = decide(estimates, rule);
    let m = rule.level_means.len().next_power_of_two().trailing_zeros() as usize;
    let bits = labeling.demap(&levels, m);
    (levels, bits)
}

/// Per-level sample statistics of equalizer output on known symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub means: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub counts: Vec<usize>,
    /// Root of the count-weighted mean variance.
    pub pooled_sigma: f64,
}

impl LevelStats {
    pub fn sigma_model(&self, pooled: bool) -> SigmaModel {
        if pooled {
            SigmaModel::Pooled(self.pooled_sigma)
        } else {
            SigmaModel::PerLevel(self.sigmas.clone())
        }
    }
}

/// Level means and deviations of `values` grouped by the known `indices`.
///
/// Levels with fewer than two samples (rare outer levels under strong
/// shaping) get a mean from a straight-line fit through the others and the
/// pooled deviation.
pub fn estimate_level_stats(values: &[f64], indices: &[u8], n_levels: usize) -> Result<LevelStats> {
    if values.len() != indices.len() {
        return Err(Error::Length(format!("{} values for {} indices", values.len(), indices.len())));
    }
    let mut sum = vec![0.0; n_levels];
    let mut sum2 = vec![0.0; n_levels];
    let mut counts = vec![0usize; n_levels];
    for (&v, &i) in values.iter().zip(indices) {
        let i = i as usize;
        if i >= n_levels {
            return Err(Error::param(format!("level index {i} out of range")));
        }
        sum[i] += v;
        sum2[i] += v * v;
        counts[i] += 1;
    }
    let seen: Vec<usize> = (0..n_levels).filter(|&i| counts[i] >= 2).collect();
    if seen.len() < 2 {
        return Err(Error::param("fewer than two levels observed"));
    }
    let mut means = vec![f64::NAN; n_levels];
    let mut vars = vec![f64::NAN; n_levels];
    let (mut pooled_num, mut pooled_den) = (0.0, 0.0);
    for &i in &seen {
        let c = counts[i] as f64;
        let m = sum[i] / c;
        let var = ((sum2[i] - c * m * m) / (c - 1.0)).max(0.0);
        means[i] = m;
        vars[i] = var;
        pooled_num += var * (c - 1.0);
        pooled_den += c - 1.0;
    }
    let pooled_sigma = (pooled_num / pooled_den).sqrt();
    if seen.len() < n_levels {
        let k = seen.len() as f64;
        let xm = seen.iter().map(|&i| i as f64).sum::<f64>() / k;
        let ym = seen.iter().map(|&i| means[i]).sum::<f64>() / k;
        let sxy: f64 = seen.iter().map(|&i| (i as f64 - xm) * (means[i] - ym)).sum();
        let sxx: f64 = seen.iter().map(|&i| (i as f64 - xm).powi(2)).sum();
        let slope = sxy / sxx;
        for i in 0..n_levels {
            if counts[i] < 2 {
                means[i] = ym + slope * (i as f64 - xm);
                vars[i] = pooled_sigma * pooled_sigma;
            }
        }
    }
    let floor = 1e-6 * pooled_sigma.max(f64::MIN_POSITIVE);
    let sigmas = vars.iter().map(|v| v.sqrt().max(floor)).collect();
    Ok(LevelStats { means, sigmas, counts, pooled_sigma })
}

/// Bit-error tally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerCount {
    pub ber: f64,
    pub errors: u64,
    pub bits: u64,
}

/// Hamming distance between two equal-length bit streams.
pub fn count_ber(tx_bits: &[bool], rx_bits: &[bool]) -> Result<BerCount> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::Length(format!(
            "transmitted ({}) and received ({}) bit counts differ",
            tx_bits.len(),
            rx_bits.len()
        )));
    }
    if tx_bits.is_empty() {
        return Err(Error::Length("no bits to compare".into()));
    }
    let errors = tx_bits.iter().zip(rx_bits).filter(|(a, b)| a != b).count() as u64;
    let bits = tx_bits.len() as u64;
    Ok(BerCount { ber: errors as f64 / bits as f64, errors, bits })
}

//! Super-Gaussian Maxwell-Boltzmann shaping on PAM alphabets and rate
//! planning.
//!
//! Level probabilities follow `P(x) ∝ exp(-v·|x - c|^α)` where `c` is the
//! alphabet center. `α = 2` is the classic Maxwell-Boltzmann distribution;
//! larger orders flatten the inner levels and cut the outer ones harder.
//! Measuring the exponent argument from the center makes every member of
//! the family a "cap": peaked at mid intensity, with the fewest symbols on
//! the outermost levels.

use crate::error::{Error, Result};

/// Default entropy tolerance of [`solve_v_for_entropy`], in bit/symbol.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-9;

const SOLVER_MAX_ITER: usize = 200;
const NU_BRACKET_LIMIT: f64 = 1e15;
const NORM_TOL: f64 = 1e-12;

/// Uniformly spaced, strictly increasing PAM amplitude alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelAlphabet {
    levels: Vec<f64>,
}

impl LevelAlphabet {
    /// Nominal alphabet `0, 1, ..., size-1`.
    pub fn pam(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| i as f64).collect())
    }

    /// Nominal PAM-8 alphabet `0..=7`.
    pub fn pam8() -> Self {
        Self::pam(8).expect("8 levels is a valid alphabet")
    }

    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::param("alphabet needs at least 2 levels"));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::param("alphabet levels must be finite"));
        }
        let step = levels[1] - levels[0];
        if step <= 0.0 {
            return Err(Error::param("alphabet levels must be strictly increasing"));
        }
        for w in levels.windows(2) {
            let d = w[1] - w[0];
            if d <= 0.0 {
                return Err(Error::param("alphabet levels must be strictly increasing"));
            }
            if (d - step).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::param("alphabet levels must be uniformly spaced"));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.levels[0] + self.levels[self.levels.len() - 1])
    }

    pub fn spacing(&self) -> f64 {
        self.levels[1] - self.levels[0]
    }

    /// Bits per symbol of the uniform alphabet, `log2 M`.
    pub fn max_entropy(&self) -> f64 {
        (self.len() as f64).log2()
    }

    /// Entropy approached as `v → ∞`: uniform over the levels closest to the
    /// center (two levels for even `M`, one for odd `M`).
    pub fn min_cap_entropy(&self) -> f64 {
        if self.len().is_multiple_of(2) {
            1.0
        } else {
            0.0
        }
    }
}

/// One member of the super-Gaussian family on an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedDistribution {
    alphabet: LevelAlphabet,
    probs: Vec<f64>,
    nu: f64,
    alpha: f64,
}

impl ShapedDistribution {
    /// Equiprobable distribution (`v = 0`).
    pub fn uniform(alphabet: LevelAlphabet) -> Self {
        mb_distribution(&alphabet, 0.0, 2.0).expect("v = 0 is always valid")
    }

    pub fn alphabet(&self) -> &LevelAlphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_uniform(&self) -> bool {
        self.nu == 0.0
    }

    /// Probability of the two outermost levels (each).
    pub fn outer_probability(&self) -> f64 {
        self.probs[0]
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Mean amplitude under the distribution.
    pub fn mean(&self) -> f64 {
        self.alphabet.levels().iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    /// Amplitude variance under the distribution.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.alphabet.levels().iter().zip(&self.probs).map(|(x, p)| p * (x - mean).powi(2)).sum()
    }

    /// Cumulative distribution, last entry forced to exactly 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        cdf
    }
}

/// Builds `P(x) ∝ exp(-nu·|x - c|^alpha)` over the alphabet.
pub fn mb_distribution(alphabet: &LevelAlphabet, nu: f64, alpha: f64) -> Result<ShapedDistribution> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::param(format!("shaping parameter v must be finite and >= 0, got {nu}")));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::param(format!("Gaussian order must be finite and > 0, got {alpha}")));
    }
    let c = alphabet.center();
    // Log domain keeps very large v from underflowing every weight to zero.
    let log_w: Vec<f64> = alphabet.levels().iter().map(|x| -nu * (x - c).abs().powf(alpha)).collect();
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|x| x / total).collect();
    // Mirror-average so the symmetry invariant holds to rounding.
    let m = probs.len();
    for i in 0..m / 2 {
        let avg = 0.5 * (probs[i] + probs[m - 1 - i]);
        probs[i] = avg;
        probs[m - 1 - i] = avg;
    }
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < NORM_TOL);
    Ok(ShapedDistribution { alphabet: alphabet.clone(), probs, nu, alpha })
}

/// Shannon entropy `-Σ p·log2 p` in bit/symbol, with `0·log 0 = 0`.
pub fn entropy(dist: &ShapedDistribution) -> f64 {
    entropy_of(dist.probs())
}

/// Entropy of a raw probability vector.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>().max(0.0)
}

/// Finds `v` such that the family member of order `alpha` has entropy
/// `target_h` within `tol`.
///
/// Entropy decreases strictly in `v`, so the root is bracketed by growing
/// an upper bound and then bisected.
pub fn solve_v_for_entropy(alphabet: &LevelAlphabet, alpha: f64, target_h: f64, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::param(format!("entropy tolerance must be > 0, got {tol}")));
    }
    let (min, max) = (alphabet.min_cap_entropy(), alphabet.max_entropy());
    if !target_h.is_finite() || target_h <= min || target_h > max + tol {
        return Err(Error::EntropyRange { target: target_h, min, max });
    }
    let h_at = |nu: f64| -> Result<f64> { Ok(entropy(&mb_distribution(alphabet, nu, alpha)?)) };

    if max - target_h <= tol {
        return Ok(0.0);
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    while h_at(hi)? > target_h {
        lo = hi;
        hi *= 2.0;
        if hi > NU_BRACKET_LIMIT {
            return Err(Error::EntropyRange { target: target_h, min, max });
        }
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..SOLVER_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let h = h_at(mid)?;
        if (h - target_h).abs() <= tol {
            return Ok(mid);
        }
        if h > target_h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(mid)
}

/// Shaped distribution of order `alpha` at the requested entropy.
pub fn shaped_for_entropy(alphabet: &LevelAlphabet, alpha: f64, target_h: f64) -> Result<ShapedDistribution> {
    let nu = solve_v_for_entropy(alphabet, alpha, target_h, DEFAULT_ENTROPY_TOL)?;
    mb_distribution(alphabet, nu, alpha)
}

/// Net rate, symbol rate, FEC rate and entropy tied together by
/// `net = baud · (H - m·(1 - r_fec))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePlan {
    /// Net information rate, bit/s.
    pub net_rate: f64,
    /// Symbol rate, symbol/s.
    pub baud: f64,
    /// Bit-levels per symbol (3 for PAM-8).
    pub m: u32,
    /// FEC code rate in (0, 1].
    pub r_fec: f64,
    /// Source entropy, bit/symbol.
    pub entropy: f64,
}

/// Relative tolerance for a plan's net rate consistency check.
pub const RATE_PLAN_TOL: f64 = 0.005;

impl RatePlan {
    /// Plan whose entropy is solved from the net rate.
    pub fn solve(net_rate: f64, baud: f64, m: u32, r_fec: f64) -> Result<Self> {
        let entropy = required_entropy(net_rate, baud, m, r_fec)?;
        Ok(Self { net_rate, baud, m, r_fec, entropy })
    }

    /// Plan at full entropy `m` (uniform signalling); the net rate follows
    /// from the baud and is not checked against a target.
    pub fn uniform(baud: f64, m: u32, r_fec: f64) -> Self {
        let entropy = m as f64;
        let mut plan = Self { net_rate: 0.0, baud, m, r_fec, entropy };
        plan.net_rate = plan.achieved_net_rate();
        plan
    }

    pub fn spectral_efficiency(&self) -> f64 {
        spectral_efficiency(self)
    }

    /// `baud · SE`.
    pub fn achieved_net_rate(&self) -> f64 {
        self.baud * self.spectral_efficiency()
    }

    /// Shaping overhead `m - H` in bits.
    pub fn ps_overhead(&self) -> f64 {
        self.m as f64 - self.entropy
    }

    /// Relative mismatch between the declared and the achieved net rate.
    pub fn rate_mismatch(&self) -> f64 {
        (self.achieved_net_rate() - self.net_rate).abs() / self.net_rate.abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_consistent(&self) -> bool {
        self.rate_mismatch() <= RATE_PLAN_TOL && self.entropy > 1.0 && self.entropy <= self.m as f64
    }
}

/// Entropy needed to carry `net_rate` at `baud` with `m` bit-levels and FEC
/// rate `r_fec`: `H = net/baud + m·(1 - r_fec)`.
pub fn required_entropy(net_rate: f64, baud: f64, m: u32, r_fec: f64) -> Result<f64> {
    if !(net_rate.is_finite() && net_rate > 0.0) {
        return Err(Error::param(format!("net rate must be > 0, got {net_rate}")));
    }
    if !(baud.is_finite() && baud > 0.0) {
        return Err(Error::param(format!("baud must be > 0, got {baud}")));
    }
    if m == 0 {
        return Err(Error::param("bit-levels m must be > 0"));
    }
    if !(r_fec > 0.0 && r_fec <= 1.0) {
        return Err(Error::param(format!("FEC rate must lie in (0, 1], got {r_fec}")));
    }
    let h = net_rate / baud + m as f64 * (1.0 - r_fec);
    if h <= 0.0 {
        return Err(Error::param(format!("required entropy {h} is not positive")));
    }
    if h > m as f64 + 1e-12 {
        return Err(Error::InfeasiblePlan { required: h, max: m as f64 });
    }
    Ok(h)
}

/// `SE = H - m·(1 - r_fec)` in bit/symbol.
pub fn spectral_efficiency(plan: &RatePlan) -> f64 {
    plan.entropy - plan.m as f64 * (1.0 - plan.r_fec)
}

/// FEC code rate for an overhead given in percent, `1 / (1 + OH/100)`.
pub fn fec_rate_from_overhead(overhead_percent: f64) -> Result<f64> {
    if !(overhead_percent.is_finite() && overhead_percent >= 0.0) {
        return Err(Error::param(format!("FEC overhead must be >= 0 %, got {overhead_percent}")));
    }
    Ok(1.0 / (1.0 + overhead_percent / 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::HD_FEC_RATE;
    use proptest::prelude::*;

    fn direct_oracle(nu: f64, alpha: f64) -> Vec<f64> {
        let w: Vec<f64> = (0..8).map(|i| (-nu * (i as f64 - 3.5).abs().powf(alpha)).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    #[test]
    fn zero_nu_is_uniform() {
        let d = mb_distribution(&LevelAlphabet::pam8(), 0.0, 2.0).unwrap();
        for p in d.probs() {
            assert!((p - 0.125).abs() < 1e-15);
        }
        assert!((entropy(&d) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn huge_nu_concentrates_on_center_pair() {
        let d = mb_distribution(&LevelAlphabet::pam8(), 1e6, 2.0).unwrap();
        let expect = [0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0];
        for (p, e) in d.probs().iter().zip(expect) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!((entropy(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solved_alpha5_matches_direct_evaluation() {
        let a = LevelAlphabet::pam8();
        let nu = solve_v_for_entropy(&a, 5.0, 2.5492, DEFAULT_ENTROPY_TOL).unwrap();
        let d = mb_distribution(&a, nu, 5.0).unwrap();
        let oracle = direct_oracle(nu, 5.0);
        for (p, o) in d.probs().iter().zip(&oracle) {
            assert!((p - o).abs() < 1e-14);
        }
        assert!((d.outer_probability() - oracle[7]).abs() < 1e-14);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_of(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 1.0);
        assert_eq!(entropy_of(&[0.125; 8]), 3.0);
    }

    #[test]
    fn solver_round_trip_and_edges() {
        let a = LevelAlphabet::pam8();
        assert_eq!(solve_v_for_entropy(&a, 2.0, 3.0, 1e-9).unwrap(), 0.0);
        let nu = solve_v_for_entropy(&a, 2.0, 2.6963, 1e-9).unwrap();
        let h = entropy(&mb_distribution(&a, nu, 2.0).unwrap());
        assert!((h - 2.6963).abs() < 1e-6);
        assert!(matches!(solve_v_for_entropy(&a, 2.0, 0.5, 1e-9), Err(Error::EntropyRange { .. })));
        assert!(solve_v_for_entropy(&a, 2.0, 3.2, 1e-9).is_err());
        assert!(solve_v_for_entropy(&a, 2.0, 2.5, 0.0).is_err());
    }

    #[test]
    fn bad_parameters_rejected() {
        let a = LevelAlphabet::pam8();
        assert!(mb_distribution(&a, -1.0, 2.0).is_err());
        assert!(mb_distribution(&a, f64::NAN, 2.0).is_err());
        assert!(mb_distribution(&a, 1.0, 0.0).is_err());
        assert!(mb_distribution(&a, 1.0, f64::INFINITY).is_err());
        assert!(LevelAlphabet::new(vec![0.0]).is_err());
        assert!(LevelAlphabet::new(vec![0.0, 1.0, 3.0]).is_err());
        assert!(LevelAlphabet::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn required_entropy_operating_points() {
        let h80 = required_entropy(200e9, 80e9, 3, HD_FEC_RATE).unwrap();
        let h85 = required_entropy(200e9, 85e9, 3, HD_FEC_RATE).unwrap();
        let h90 = required_entropy(200e9, 90e9, 3, HD_FEC_RATE).unwrap();
        assert!((h80 - 2.6963).abs() < 1e-4);
        assert!((h85 - 2.5492).abs() < 1e-4);
        assert!((h90 - 2.4185).abs() < 1e-4);
        assert!(required_entropy(200e9, 60e9, 3, HD_FEC_RATE).is_err());
        assert!(matches!(required_entropy(200e9, 60e9, 3, HD_FEC_RATE), Err(Error::InfeasiblePlan { .. })));
        assert!(required_entropy(200e9, 80e9, 3, 1.5).is_err());
        assert!(required_entropy(-1.0, 80e9, 3, 1.0).is_err());
    }

    #[test]
    fn spectral_efficiency_examples() {
        let u = RatePlan::uniform(71e9, 3, HD_FEC_RATE);
        assert!((u.spectral_efficiency() - 2.8037).abs() < 1e-4);
        assert!((u.achieved_net_rate() - 199.07e9).abs() < 0.01e9);
        let zero_oh = RatePlan { net_rate: 0.0, baud: 1.0, m: 3, r_fec: 1.0, entropy: 3.0 };
        assert_eq!(spectral_efficiency(&zero_oh), 3.0);
        let p = RatePlan { net_rate: 200e9, baud: 85e9, m: 3, r_fec: HD_FEC_RATE, entropy: 2.5492 };
        assert!((spectral_efficiency(&p) - 2.3529).abs() < 1e-4);
        assert!(p.is_consistent());
        let uniform = RatePlan { net_rate: 200e9, ..u };
        assert!(uniform.is_consistent());
    }

    #[test]
    fn outer_probability_ordering_on_operating_points() {
        let a = LevelAlphabet::pam8();
        for h in [2.6963, 2.5492, 2.4185] {
            let outer: Vec<f64> =
                [2.0, 3.5, 5.0].iter().map(|&al| shaped_for_entropy(&a, al, h).unwrap().outer_probability()).collect();
            assert!(outer[0] >= outer[1] && outer[1] >= outer[2], "H={h}: {outer:?}");
        }
    }

    #[test]
    fn fec_overhead_conversion() {
        assert!((fec_rate_from_overhead(7.0).unwrap() - HD_FEC_RATE).abs() < 1e-15);
        assert!(fec_rate_from_overhead(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn family_invariants(nu in 0.0f64..50.0, alpha in 0.3f64..8.0) {
            let d = mb_distribution(&LevelAlphabet::pam8(), nu, alpha).unwrap();
            let p = d.probs();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..8 {
                prop_assert!(p[i] >= 0.0);
                prop_assert!((p[i] - p[7 - i]).abs() < 1e-12);
            }
            for i in 0..3 {
                prop_assert!(p[i] <= p[i + 1]);
                if nu > 0.0 && p[i + 1] > 1e-300 {
                    prop_assert!(p[i] < p[i + 1]);
                }
            }
        }

        #[test]
        fn entropy_decreases_in_nu(a in 0.0f64..3.0, b in 0.0f64..3.0, alpha in 0.5f64..5.0) {
            prop_assume!((a - b).abs() > 1e-3);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let al = LevelAlphabet::pam8();
            let h_lo = entropy(&mb_distribution(&al, lo, alpha).unwrap());
            let h_hi = entropy(&mb_distribution(&al, hi, alpha).unwrap());
            prop_assert!(h_hi < h_lo);
        }

        #[test]
        fn rate_plan_closure(baud in 67e9f64..120e9, oh in 0.0f64..20.0) {
            let r = fec_rate_from_overhead(oh).unwrap();
            if let Ok(h) = required_entropy(200e9, baud, 3, r) {
                let plan = RatePlan { net_rate: 200e9, baud, m: 3, r_fec: r, entropy: h };
                prop_assert!((plan.achieved_net_rate() - 200e9).abs() / 200e9 < 1e-12);
            }
        }
    }
}

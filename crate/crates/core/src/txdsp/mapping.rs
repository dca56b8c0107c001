use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shaping::{LevelAlphabet, ShapedDistribution};

/// Bit labeling of PAM level indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    /// Binary reflected Gray code: adjacent levels differ in one bit.
    #[default]
    Gray,
    Natural,
}

impl Labeling {
    /// Codeword carried by level `index`.
    pub fn codeword(self, index: usize) -> usize {
        match self {
            Labeling::Gray => index ^ (index >> 1),
            Labeling::Natural => index,
        }
    }

    /// Level index carrying `codeword`.
    pub fn index(self, codeword: usize) -> usize {
        match self {
            Labeling::Gray => {
                let mut idx = codeword;
                let mut shift = codeword >> 1;
                while shift != 0 {
                    idx ^= shift;
                    shift >>= 1;
                }
                idx
            }
            Labeling::Natural => codeword,
        }
    }

    /// Appends the `m` bits (MSB first) labeling `index`.
    pub fn push_bits(self, index: usize, m: usize, out: &mut Vec<bool>) {
        let cw = self.codeword(index);
        for b in (0..m).rev() {
            out.push((cw >> b) & 1 == 1);
        }
    }

    /// Bit stream for a sequence of level indices.
    pub fn demap(self, indices: &[u8], m: usize) -> Vec<bool> {
        let mut out = Vec::with_capacity(indices.len() * m);
        for &i in indices {
            self.push_bits(i as usize, m, &mut out);
        }
        out
    }
}

/// Stream of PAM level indices with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSequence {
    pub indices: Vec<u8>,
    pub alphabet: LevelAlphabet,
    /// Bits the indices were mapped from; empty for randomly drawn shaped
    /// sequences.
    pub source_bits: Vec<bool>,
    pub seed: u64,
}

impl SymbolSequence {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Nominal amplitude of every symbol.
    pub fn amplitudes(&self) -> Vec<f64> {
        let levels = self.alphabet.levels();
        self.indices.iter().map(|&i| levels[i as usize]).collect()
    }

    /// Empirical level histogram normalized to probabilities.
    pub fn level_frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.alphabet.len()];
        for &i in &self.indices {
            counts[i as usize] += 1;
        }
        let n = self.indices.len().max(1) as f64;
        counts.into_iter().map(|c| c as f64 / n).collect()
    }
}

fn bits_per_symbol(alphabet: &LevelAlphabet) -> Result<usize> {
    let m = alphabet.len();
    if !m.is_power_of_two() {
        return Err(Error::param(format!("bit mapping needs a power-of-two alphabet, got {m} levels")));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Maps consecutive `log2 M`-bit groups (MSB first) onto level indices.
pub fn map_uniform(bits: &[bool], alphabet: &LevelAlphabet, labeling: Labeling, seed: u64) -> Result<SymbolSequence> {
    let m = bits_per_symbol(alphabet)?;
    if !bits.len().is_multiple_of(m) {
        return Err(Error::Length(format!("{} bits is not a multiple of {m}", bits.len())));
    }
    let indices = bits
        .chunks_exact(m)
        .map(|group| {
            let cw = group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            labeling.index(cw) as u8
        })
        .collect();
    Ok(SymbolSequence { indices, alphabet: alphabet.clone(), source_bits: bits.to_vec(), seed })
}

/// PAM-8 mapping of 3-bit groups.
pub fn map_uniform_pam8(bits: &[bool], labeling: Labeling) -> Result<SymbolSequence> {
    map_uniform(bits, &LevelAlphabet::pam8(), labeling, 0)
}

/// Draws `n` i.i.d. symbols from `dist` by inverse-CDF sampling on a seeded
/// ChaCha8 stream.
pub fn sample_shaped_symbols(dist: &ShapedDistribution, n: usize, seed: u64) -> Result<SymbolSequence> {
    if n == 0 {
        return Err(Error::param("symbol count must be > 0"));
    }
    let cdf = dist.cdf();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u8
        })
        .collect();
    Ok(SymbolSequence { indices, alphabet: dist.alphabet().clone(), source_bits: Vec::new(), seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shaping::{entropy_of, shaped_for_entropy};

    fn bits_of(word: usize) -> Vec<bool> {
        (0..3).rev().map(|b| (word >> b) & 1 == 1).collect()
    }

    #[test]
    fn gray_anchor_and_adjacency() {
        let s = map_uniform_pam8(&[false, false, false], Labeling::Gray).unwrap();
        assert_eq!(s.indices, vec![0]);
        let all: Vec<bool> = (0..8).flat_map(bits_of).collect();
        let s = map_uniform_pam8(&all, Labeling::Gray).unwrap();
        let mut by_level = [0usize; 8];
        for (word, &idx) in s.indices.iter().enumerate() {
            by_level[idx as usize] = word;
        }
        for w in by_level.windows(2) {
            assert_eq!((w[0] ^ w[1]).count_ones(), 1);
        }
    }

    #[test]
    fn labeling_inverts() {
        for lab in [Labeling::Gray, Labeling::Natural] {
            for i in 0..8 {
                assert_eq!(lab.index(lab.codeword(i)), i);
            }
        }
        let bits: Vec<bool> = (0..24).map(|i| (i * 7 + 3) % 5 < 2).collect();
        let s = map_uniform_pam8(&bits, Labeling::Gray).unwrap();
        assert_eq!(Labeling::Gray.demap(&s.indices, 3), bits);
    }

    #[test]
    fn rejects_partial_groups() {
        assert!(matches!(map_uniform_pam8(&[true; 7], Labeling::Gray), Err(Error::Length(_))));
    }

    #[test]
    fn uniform_frequencies_within_binomial_bound() {
        let d = ShapedDistribution::uniform(LevelAlphabet::pam8());
        let n = 800_000;
        let s = sample_shaped_symbols(&d, n, 3).unwrap();
        let sigma = (0.125f64 * 0.875 / n as f64).sqrt();
        for f in s.level_frequencies() {
            assert!((f - 0.125).abs() < 4.0 * sigma, "{f}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = shaped_for_entropy(&LevelAlphabet::pam8(), 3.5, 2.6963).unwrap();
        let a = sample_shaped_symbols(&d, 10_000, 42).unwrap();
        let b = sample_shaped_symbols(&d, 10_000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_shaped_symbols(&d, 10_000, 43).unwrap();
        assert_ne!(a.indices, c.indices);
        assert!(sample_shaped_symbols(&d, 0, 1).is_err());
    }

    #[test]
    fn empirical_entropy_tracks_target() {
        let d = shaped_for_entropy(&LevelAlphabet::pam8(), 5.0, 2.5492).unwrap();
        let s = sample_shaped_symbols(&d, 500_000, 9).unwrap();
        assert!((entropy_of(&s.level_frequencies()) - 2.5492).abs() < 0.01);
    }
}

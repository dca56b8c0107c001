use crate::error::{Error, Result};

/// Fibonacci LFSR producing a maximal-length PRBS.
#[derive(Debug, Clone)]
pub struct Prbs {
    state: u32,
    order: u32,
    tap: u32,
    mask: u32,
}

impl Prbs {
    /// Generator for `x^order + x^tap + 1` (ITU-T O.150 polynomials).
    pub fn new(order: u32, seed: u32) -> Result<Self> {
        let tap = match order {
            7 => 6,
            9 => 5,
            11 => 9,
            15 => 14,
            23 => 18,
            31 => 28,
            _ => return Err(Error::param(format!("unsupported PRBS order {order}"))),
        };
        let mask = (1u32 << order) - 1;
        let state = seed & mask;
        if state == 0 {
            return Err(Error::param("PRBS seed must be non-zero (all-zero state locks the register)"));
        }
        Ok(Self { state, order, tap, mask })
    }

    pub fn period(&self) -> u64 {
        (1u64 << self.order) - 1
    }
}

impl Iterator for Prbs {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        let bit = ((self.state >> (self.order - 1)) ^ (self.state >> (self.tap - 1))) & 1;
        self.state = ((self.state << 1) | bit) & self.mask;
        Some(bit == 1)
    }
}

/// First `n_bits` of the PRBS of the given register length.
pub fn prbs(register_len: u32, seed: u32, n_bits: usize) -> Result<Vec<bool>> {
    Ok(Prbs::new(register_len, seed)?.take(n_bits).collect())
}

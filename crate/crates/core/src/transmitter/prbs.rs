//! Maximal-length pseudo-random bit sequences from a Fibonacci LFSR.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Feedback taps `(m, k)` for the primitive trinomials `x^m + x^k + 1`.
const TAPS: [(u32, u32); 6] = [(7, 6), (9, 5), (11, 9), (15, 14), (23, 18), (31, 28)];

pub fn supported_orders() -> impl Iterator<Item = u32> {
    TAPS.iter().map(|&(m, _)| m)
}

fn tap_for(order: u32) -> Result<u32> {
    TAPS.iter().find(|&&(m, _)| m == order).map(|&(_, k)| k).ok_or(Error::PrbsOrder(order))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSequence(Vec<bool>);

impl BitSequence {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::invalid("bits", "sequence must not be empty"));
        }
        Ok(BitSequence(bits))
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> bool) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Bit `i` taken cyclically.
    pub fn cyclic(&self, i: isize) -> bool {
        self.0[i.rem_euclid(self.0.len() as isize) as usize]
    }
}

/// LFSR state for `x^order + x^tap + 1`. The register holds the last `order`
/// output bits, newest in bit 0.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u64,
    order: u32,
    tap: u32,
    mask: u64,
}

impl Lfsr {
    pub fn new(order: u32, seed: u64) -> Result<Self> {
        let tap = tap_for(order)?;
        let mask = (1u64 << order) - 1;
        if seed > mask {
            return Err(Error::invalid("prbs_seed", "wider than the shift register"));
        }
        if seed == 0 {
            return Err(Error::PrbsZeroSeed);
        }
        Ok(Lfsr { state: seed, order, tap, mask })
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_bit(&mut self) -> bool {
        let bit = ((self.state >> (self.order - 1)) ^ (self.state >> (self.tap - 1))) & 1;
        self.state = ((self.state << 1) | bit) & self.mask;
        bit == 1
    }
}

/// `n_bits` of the LFSR output stream; the pattern repeats every
/// `2^order − 1` bits.
pub fn prbs_generate(order: u32, seed: u64, n_bits: usize) -> Result<BitSequence> {
    let mut lfsr = Lfsr::new(order, seed)?;
    BitSequence::new((0..n_bits).map(|_| lfsr.next_bit()).collect())
}

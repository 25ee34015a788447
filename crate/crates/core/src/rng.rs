//! Deterministic noise streams keyed by where the noise is injected, so the
//! realization never depends on execution order or thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// What a stream is used for; part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    AmplifierNoise,
    ReceiverNoise,
    Test,
    Custom(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::AmplifierNoise => 1,
            Purpose::ReceiverNoise => 2,
            Purpose::Test => 3,
            Purpose::Custom(t) => 0x1_0000_0000 | u64::from(t),
        }
    }
}

/// Identifies the injection point of a noise process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamContext {
    pub scenario: u64,
    pub channel: u32,
    pub span: u32,
    pub purpose: Purpose,
}

impl StreamContext {
    pub fn new(scenario: u64, channel: u32, span: u32, purpose: Purpose) -> Self {
        StreamContext { scenario, channel, span, purpose }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub context: StreamContext,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit mix of a sequence of words.
pub fn mix_seed(words: &[u64]) -> u64 {
    words.iter().fold(0x6A09_E667_F3BC_C908, |h, &w| splitmix64(h ^ splitmix64(w)))
}

impl RngStream {
    pub fn new(master_seed: u64, context: StreamContext) -> Self {
        RngStream { master_seed, context }
    }

    pub fn derived_seed(&self) -> u64 {
        let c = &self.context;
        mix_seed(&[self.master_seed, c.scenario, (u64::from(c.channel) << 32) | u64::from(c.span), c.purpose.tag()])
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn source(&self) -> NoiseSource {
        NoiseSource { rng: ChaCha8Rng::seed_from_u64(self.derived_seed()) }
    }
}

pub struct NoiseSource {
    rng: ChaCha8Rng,
}

impl NoiseSource {
    /// Standard normal deviate.
    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circular complex Gaussian with `E|n|² = variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = num_traits::Float::sqrt(variance / 2.0);
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(s * re, s * im)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

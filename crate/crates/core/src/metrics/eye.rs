use alloc::vec::Vec;

use num_traits::Float;

use crate::receiver::{eye_half_span, windowed_rail_gap, DecisionResult, ElectricalWaveform};
use crate::transmitter::BitSequence;
use crate::{Error, Result};

pub const EYE_AMPLITUDE_BINS: usize = 64;
const MIN_EYE_BITS: usize = 64;

/// Two-bit-wide eye folded about the decision instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeData {
    /// `histogram[phase_bin][amplitude_bin]`; `2 × samples_per_bit` phase bins.
    pub histogram: Vec<Vec<u32>>,
    /// Current at the lower edge of amplitude bin 0 and the upper edge of the last.
    pub amplitude_range: (f64, f64),
    /// Worst rail gap within ±10% of a bit around the decision instant, floored at 0 A.
    pub eye_opening: f64,
    /// Decision instant as a fraction of the bit period.
    pub optimal_phase: f64,
}

impl EyeData {
    pub fn total_counts(&self) -> u64 {
        self.histogram.iter().flatten().map(|&c| u64::from(c)).sum()
    }
}

/// Folds the waveform into a two-bit window whose bit centres are the
/// decision instants, and measures the opening against the reference bits.
pub fn eye_diagram(wave: &ElectricalWaveform, bits: &BitSequence, decision: &DecisionResult) -> Result<EyeData> {
    let spb = wave.grid().samples_per_bit();
    let s = wave.samples();
    let n_bits = bits.len();
    if n_bits < MIN_EYE_BITS {
        return Err(Error::TooFewBits(n_bits));
    }
    if s.len() != n_bits * spb {
        return Err(Error::WaveformLength { len: s.len(), bits: n_bits, samples_per_bit: spb });
    }
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { hi - lo } else { 1.0 };
    let mut histogram = alloc::vec![alloc::vec![0u32; EYE_AMPLITUDE_BINS]; 2 * spb];
    let window = 2 * spb;
    // Decision instants land at spb/2 and 3·spb/2 within the window.
    let shift = window + spb / 2 - decision.phase % spb;
    for (n, &x) in s.iter().enumerate() {
        let phase_bin = (n + shift) % window;
        let amp = (((x - lo) / width) * EYE_AMPLITUDE_BINS as f64) as usize;
        histogram[phase_bin][amp.min(EYE_AMPLITUDE_BINS - 1)] += 1;
    }

    let opening = windowed_rail_gap(wave, bits, spb, decision.phase, decision.bit_offset, eye_half_span(spb));
    Ok(EyeData {
        histogram,
        amplitude_range: (lo, lo + width),
        eye_opening: opening.max(0.0),
        optimal_phase: decision.phase as f64 / spb as f64,
    })
}

use num_traits::Float;

use crate::receiver::{aligned_samples, level_statistics, DecisionResult, ElectricalWaveform};
use crate::transmitter::BitSequence;
use crate::{Error, Result};

/// Fewer counted errors than this are reported as not countable.
pub const MIN_COUNTED_ERRORS: usize = 10;
const MIN_LEVEL_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QberResult {
    pub q_linear: f64,
    pub q_db: f64,
    pub ber_estimated: f64,
    /// `None` when fewer than [`MIN_COUNTED_ERRORS`] errors were observed.
    pub ber_counted: Option<f64>,
    pub errors: usize,
    pub n_bits: usize,
    pub mean_one: f64,
    pub mean_zero: f64,
    pub std_one: f64,
    pub std_zero: f64,
}

/// Gaussian-approximation bit error ratio `0.5·erfc(Q/√2)`.
pub fn ber_from_q(q: f64) -> f64 {
    if q == f64::INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(q.max(0.0) / core::f64::consts::SQRT_2)
    }
}

/// Q and BER from mark/space statistics at the decision's sampling instant.
pub fn q_and_ber(wave: &ElectricalWaveform, bits: &BitSequence, decision: &DecisionResult) -> Result<QberResult> {
    let spb = wave.grid().samples_per_bit();
    if wave.samples().len() != bits.len() * spb {
        return Err(Error::WaveformLength { len: wave.samples().len(), bits: bits.len(), samples_per_bit: spb });
    }
    let samples = aligned_samples(wave, spb, decision.phase, decision.bit_offset);
    let stats = level_statistics(&samples, bits);
    if stats.n_ones < MIN_LEVEL_SAMPLES || stats.n_zeros < MIN_LEVEL_SAMPLES {
        return Err(Error::TooFewLevels { marks: stats.n_ones, spaces: stats.n_zeros });
    }
    let q = stats.q();
    Ok(QberResult {
        q_linear: q,
        q_db: 20.0 * q.log10(),
        ber_estimated: ber_from_q(q),
        ber_counted: (decision.errors >= MIN_COUNTED_ERRORS).then(|| decision.errors as f64 / bits.len() as f64),
        errors: decision.errors,
        n_bits: bits.len(),
        mean_one: stats.mean_one,
        mean_zero: stats.mean_zero,
        std_one: stats.std_one,
        std_zero: stats.std_zero,
    })
}

/// First abscissa at which `log10(ber)` crosses `log10(target)`, linearly
/// interpolated between neighbouring points. Zero BER is clamped to 1e-300.
pub fn threshold_crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let lg = |b: f64| b.max(1e-300).log10();
    let t = lg(target);
    points.windows(2).find_map(|w| {
        let (x0, y0) = (w[0].0, lg(w[0].1) - t);
        let (x1, y1) = (w[1].0, lg(w[1].1) - t);
        if y0 == 0.0 {
            Some(x0)
        } else if (y0 < 0.0) != (y1 < 0.0) || y1 == 0.0 {
            Some(x0 + (x1 - x0) * y0 / (y0 - y1))
        } else {
            None
        }
    })
}

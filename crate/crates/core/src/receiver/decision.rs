use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::ElectricalWaveform;
use crate::fft::Fft;
use crate::transmitter::BitSequence;
use crate::{Error, Result};

/// Mark and space sample statistics at one sampling instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub mean_one: f64,
    pub mean_zero: f64,
    pub std_one: f64,
    pub std_zero: f64,
    pub n_ones: usize,
    pub n_zeros: usize,
    /// Lowest mark minus highest space.
    pub rail_gap: f64,
}

impl LevelStats {
    /// `(μ1 − μ0)/(σ1 + σ0)`, infinite for a noiseless open eye.
    pub fn q(&self) -> f64 {
        let spread = self.std_one + self.std_zero;
        let gap = self.mean_one - self.mean_zero;
        if spread > 0.0 {
            (gap / spread).max(0.0)
        } else if gap > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    pub fn optimal_threshold(&self) -> f64 {
        let spread = self.std_one + self.std_zero;
        if spread > 0.0 {
            (self.std_zero * self.mean_one + self.std_one * self.mean_zero) / spread
        } else {
            0.5 * (self.mean_one + self.mean_zero)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionResult {
    /// Sample index within the bit.
    pub phase: usize,
    /// Received bit `i` carries reference bit `i − bit_offset`.
    pub bit_offset: usize,
    pub threshold: f64,
    /// Decisions aligned to the reference sequence.
    pub decisions: BitSequence,
    pub errors: usize,
    pub correlation: f64,
    pub stats: LevelStats,
}

impl DecisionResult {
    pub fn q(&self) -> f64 {
        self.stats.q()
    }
}

fn check_length(wave: &ElectricalWaveform, bits: &BitSequence, spb: usize) -> Result<()> {
    let len = wave.samples().len();
    if spb == 0 || len != bits.len() * spb {
        return Err(Error::WaveformLength { len, bits: bits.len(), samples_per_bit: spb });
    }
    Ok(())
}

/// One sample per bit at `phase`, rotated so entry `i` belongs to reference bit `i`.
pub fn aligned_samples(wave: &ElectricalWaveform, spb: usize, phase: usize, bit_offset: usize) -> Vec<f64> {
    let s = wave.samples();
    let n_bits = s.len() / spb;
    (0..n_bits).map(|i| s[((i + bit_offset) % n_bits) * spb + phase]).collect()
}

pub fn level_statistics(samples: &[f64], bits: &BitSequence) -> LevelStats {
    let (mut n1, mut n0, mut s1, mut s0) = (0usize, 0usize, 0.0, 0.0);
    let (mut min1, mut max0) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&x, &b) in samples.iter().zip(bits.as_slice()) {
        if b {
            n1 += 1;
            s1 += x;
            min1 = min1.min(x);
        } else {
            n0 += 1;
            s0 += x;
            max0 = max0.max(x);
        }
    }
    let m1 = if n1 > 0 { s1 / n1 as f64 } else { 0.0 };
    let m0 = if n0 > 0 { s0 / n0 as f64 } else { 0.0 };
    let (mut v1, mut v0) = (0.0, 0.0);
    for (&x, &b) in samples.iter().zip(bits.as_slice()) {
        if b {
            v1 += (x - m1) * (x - m1);
        } else {
            v0 += (x - m0) * (x - m0);
        }
    }
    // Spreads below floating-point resolution of the levels are round-off.
    let resolution = 1e-12 * m1.abs().max(m0.abs());
    let spread = |v: f64, n: usize| {
        let s = if n > 0 { (v / n as f64).sqrt() } else { 0.0 };
        if s < resolution {
            0.0
        } else {
            s
        }
    };
    LevelStats {
        mean_one: m1,
        mean_zero: m0,
        std_one: spread(v1, n1),
        std_zero: spread(v0, n0),
        n_ones: n1,
        n_zeros: n0,
        rail_gap: min1 - max0,
    }
}

/// Pearson correlation of `samples[(i + d) mod n]` with `reference[i]` for every `d`.
fn cyclic_correlation(samples: &[f64], reference: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let centre = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = v.iter().map(|x| x - m).collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        (c, norm)
    };
    let (s, ns) = centre(samples);
    let (r, nr) = centre(reference);
    if ns == 0.0 || nr == 0.0 {
        return alloc::vec![0.0; n];
    }
    let raw: Vec<f64> = if n.is_power_of_two() {
        let fft = Fft::new(n);
        let mut a: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut b: Vec<Complex64> = r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft.forward(&mut a);
        fft.forward(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y.conj();
        }
        fft.inverse(&mut a);
        a.iter().map(|c| c.re).collect()
    } else {
        (0..n).map(|d| (0..n).map(|i| s[(i + d) % n] * r[i]).sum()).collect()
    };
    raw.into_iter().map(|c| c / (ns * nr)).collect()
}

fn evaluate(
    wave: &ElectricalWaveform,
    bits: &BitSequence,
    spb: usize,
    phase: usize,
    offset: usize,
    correlation: f64,
) -> DecisionResult {
    let samples = aligned_samples(wave, spb, phase, offset);
    let stats = level_statistics(&samples, bits);
    let threshold = stats.optimal_threshold();
    let decided: Vec<bool> = samples.iter().map(|&x| x > threshold).collect();
    let errors = decided.iter().zip(bits.as_slice()).filter(|(a, b)| a != b).count();
    DecisionResult {
        phase,
        bit_offset: offset,
        threshold,
        decisions: BitSequence::new(decided).expect("non-empty"),
        errors,
        correlation,
        stats,
    }
}

/// Worst rail gap (lowest mark minus highest space) over sampling instants
/// within `half_span` samples of `phase`.
pub fn windowed_rail_gap(
    wave: &ElectricalWaveform,
    bits: &BitSequence,
    spb: usize,
    phase: usize,
    bit_offset: usize,
    half_span: usize,
) -> f64 {
    let s = wave.samples();
    let total = s.len() as isize;
    let half = half_span as isize;
    let mut gap = f64::INFINITY;
    for delta in -half..=half {
        let (mut min1, mut max0) = (f64::INFINITY, f64::NEG_INFINITY);
        for (i, &b) in bits.as_slice().iter().enumerate() {
            let idx = (((i + bit_offset) * spb + phase) as isize + delta).rem_euclid(total);
            let x = s[idx as usize];
            if b {
                min1 = min1.min(x);
            } else {
                max0 = max0.max(x);
            }
        }
        gap = gap.min(min1 - max0);
    }
    gap
}

/// Half-width of the central eye window: 10% of a bit.
pub fn eye_half_span(spb: usize) -> usize {
    (0.1 * spb as f64).round() as usize
}

fn best_offset(wave: &ElectricalWaveform, reference: &[f64], spb: usize, phase: usize) -> (usize, f64) {
    let samples = aligned_samples(wave, spb, phase, 0);
    let corr = cyclic_correlation(&samples, reference);
    let mut best = (0, f64::NEG_INFINITY);
    for (d, &c) in corr.iter().enumerate() {
        if c > best.1 {
            best = (d, c);
        }
    }
    best
}

fn reference_levels(bits: &BitSequence) -> Result<Vec<f64>> {
    let ones = bits.ones();
    if ones == 0 || ones == bits.len() {
        return Err(Error::TooFewLevels { marks: ones, spaces: bits.len() - ones });
    }
    Ok(bits.as_slice().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
}

/// Decision at a fixed sampling phase with the bit offset searched.
pub fn decide_at_phase(
    wave: &ElectricalWaveform,
    bits: &BitSequence,
    spb: usize,
    phase: usize,
) -> Result<DecisionResult> {
    check_length(wave, bits, spb)?;
    if phase >= spb {
        return Err(Error::invalid("phase", "must be below samples per bit"));
    }
    let reference = reference_levels(bits)?;
    let (offset, corr) = best_offset(wave, &reference, spb, phase);
    if !(corr >= 0.5) {
        return Err(Error::Alignment(corr));
    }
    Ok(evaluate(wave, bits, spb, phase, offset, corr))
}

/// Searches every sampling phase and cyclic bit offset and keeps the
/// instant with the highest Q, deciding with the Gaussian-optimal threshold
/// there. Ties (a noiseless open eye has infinite Q at many phases) go to
/// the phase whose neighbourhood keeps the widest rail gap.
pub fn decide(wave: &ElectricalWaveform, bits: &BitSequence, spb: usize) -> Result<DecisionResult> {
    check_length(wave, bits, spb)?;
    let reference = reference_levels(bits)?;
    let mut best: Option<(DecisionResult, f64)> = None;
    let mut best_corr = f64::NEG_INFINITY;
    for phase in 0..spb {
        let (offset, corr) = best_offset(wave, &reference, spb, phase);
        best_corr = best_corr.max(corr);
        if !(corr >= 0.5) {
            continue;
        }
        let candidate = evaluate(wave, bits, spb, phase, offset, corr);
        let better = match &best {
            None => true,
            Some((b, _)) => candidate.q() > b.q(),
        };
        let tied = best.as_ref().is_some_and(|(b, _)| candidate.q() == b.q());
        if better || tied {
            let gap = windowed_rail_gap(wave, bits, spb, phase, offset, eye_half_span(spb));
            if better || best.as_ref().is_some_and(|(_, g)| gap > *g) {
                best = Some((candidate, gap));
            }
        }
    }
    best.map(|(d, _)| d).ok_or(Error::Alignment(if best_corr.is_finite() { best_corr } else { 0.0 }))
}

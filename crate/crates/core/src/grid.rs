//! The sampling lattice shared by every field and waveform.

use alloc::vec::Vec;

use crate::units::wavelength_to_frequency;
use crate::{Error, Result};

/// Uniform, periodic time lattice with its matching FFT frequency axis.
///
/// Fields are periodic over `time_window`, so the bit pattern wraps from the
/// last bit back to the first.
/// Required ratio of sample rate to occupied bandwidth.
pub const BANDWIDTH_GUARD: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalGrid {
    n_samples: usize,
    sample_interval: f64,
    samples_per_bit: usize,
    bit_rate: f64,
    center_wavelength: f64,
}

/// Builds the single-channel lattice: `n_samples / samples_per_bit` bits at
/// `bit_rate`, sampled `samples_per_bit` times each.
pub fn make_grid(
    n_samples: usize,
    bit_rate: f64,
    samples_per_bit: usize,
    center_wavelength: f64,
) -> Result<SignalGrid> {
    if n_samples < 64 || !n_samples.is_power_of_two() {
        return Err(Error::GridSize(n_samples));
    }
    if samples_per_bit < 4 || !n_samples.is_multiple_of(samples_per_bit) {
        return Err(Error::SamplesPerBit { n_samples, samples_per_bit });
    }
    if !(bit_rate > 0.0) || !bit_rate.is_finite() {
        return Err(Error::invalid("bit_rate", "must be positive"));
    }
    if !(center_wavelength > 0.0) {
        return Err(Error::invalid("center_wavelength", "must be positive"));
    }
    Ok(SignalGrid {
        n_samples,
        sample_interval: 1.0 / (bit_rate * samples_per_bit as f64),
        samples_per_bit,
        bit_rate,
        center_wavelength,
    })
}

impl SignalGrid {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn samples_per_bit(&self) -> usize {
        self.samples_per_bit
    }

    pub fn bit_rate(&self) -> f64 {
        self.bit_rate
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn center_frequency(&self) -> f64 {
        // Validated positive at construction.
        wavelength_to_frequency(self.center_wavelength).unwrap_or(0.0)
    }

    pub fn n_bits(&self) -> usize {
        self.n_samples / self.samples_per_bit
    }

    pub fn time_window(&self) -> f64 {
        self.n_samples as f64 * self.sample_interval
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.sample_interval
    }

    /// FFT bin spacing, `1 / time_window`.
    pub fn frequency_step(&self) -> f64 {
        1.0 / self.time_window()
    }

    /// Baseband frequency of FFT bin `k` (standard FFT ordering, negative
    /// frequencies in the upper half).
    pub fn bin_frequency(&self, k: usize) -> f64 {
        let n = self.n_samples as isize;
        let k = k as isize;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 * self.frequency_step()
    }

    /// Baseband frequency of every FFT bin, in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.bin_frequency(k)).collect()
    }

    /// FFT bin nearest to baseband frequency `f` (wrapped into the grid).
    pub fn nearest_bin(&self, f: f64) -> usize {
        let n = self.n_samples as i64;
        let k = libm::round(f / self.frequency_step()) as i64;
        k.rem_euclid(n) as usize
    }

    /// Fails unless the sample rate covers `bandwidth` with a 25% guard.
    pub fn check_bandwidth(&self, bandwidth: f64) -> Result<()> {
        let required = BANDWIDTH_GUARD * bandwidth;
        if self.sample_rate() + 1e-6 * required < required {
            return Err(Error::GridBandwidth { sample_rate: self.sample_rate(), required });
        }
        Ok(())
    }

    /// Highest baseband frequency a field may occupy, `fs / (2·guard)`.
    pub fn usable_half_band(&self) -> f64 {
        self.sample_rate() / 2.0 / BANDWIDTH_GUARD
    }

    /// Same time window, `factor` times more samples; used for the aggregate
    /// multiplexed band.
    pub fn oversampled(&self, factor: usize, center_wavelength: f64) -> Result<SignalGrid> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::invalid("oversampling", "must be a power of two"));
        }
        make_grid(self.n_samples * factor, self.bit_rate, self.samples_per_bit * factor, center_wavelength)
    }

    /// Same lattice referenced to a different carrier.
    pub fn with_center_wavelength(&self, center_wavelength: f64) -> Result<SignalGrid> {
        make_grid(self.n_samples, self.bit_rate, self.samples_per_bit, center_wavelength)
    }

    pub fn same_lattice(&self, other: &SignalGrid) -> bool {
        self.n_samples == other.n_samples && self.sample_interval == other.sample_interval
    }
}

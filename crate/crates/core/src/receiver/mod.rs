//! Direct-detection receiver: square-law photodiode with shot, thermal and
//! dark-current noise, an electrical low-pass filter and a decision circuit
//! that searches sampling phase, bit alignment and threshold.

mod decision;
mod filter;

use alloc::vec::Vec;

use num_traits::Float;

use crate::field::OpticalField;
use crate::grid::SignalGrid;
use crate::rng::RngStream;
use crate::units::ELECTRON_CHARGE;
use crate::{Error, Result};

pub use decision::{
    aligned_samples, decide, decide_at_phase, eye_half_span, level_statistics, windowed_rail_gap, DecisionResult,
    LevelStats,
};
pub use filter::{electrical_filter, BesselLowpass, ElectricalResponse};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElectricalFilterKind {
    Bessel(u32),
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverSpec {
    /// A/W.
    pub responsivity: f64,
    /// A/√Hz.
    pub thermal_noise_density: f64,
    /// A.
    pub dark_current: f64,
    /// 3 dB bandwidth in Hz. `None` means 0.75 × bit rate.
    pub electrical_bandwidth: Option<f64>,
    pub electrical_filter: ElectricalFilterKind,
    pub shot_noise: bool,
}

impl Default for ReceiverSpec {
    fn default() -> Self {
        ReceiverSpec {
            responsivity: 1.0,
            thermal_noise_density: 10e-12,
            dark_current: 10e-9,
            electrical_bandwidth: None,
            electrical_filter: ElectricalFilterKind::Bessel(4),
            shot_noise: true,
        }
    }
}

impl ReceiverSpec {
    /// Same detector and filter with every noise source switched off.
    pub fn noiseless() -> Self {
        ReceiverSpec { thermal_noise_density: 0.0, dark_current: 0.0, shot_noise: false, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.responsivity > 0.0 && self.responsivity <= 1.5) {
            return Err(Error::invalid("responsivity", "must lie in (0, 1.5] A/W"));
        }
        if !(self.thermal_noise_density >= 0.0) || !self.thermal_noise_density.is_finite() {
            return Err(Error::invalid("thermal_noise_density", "must be finite and non-negative"));
        }
        if !(self.dark_current >= 0.0) || !self.dark_current.is_finite() {
            return Err(Error::invalid("dark_current", "must be finite and non-negative"));
        }
        if let Some(b) = self.electrical_bandwidth {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::invalid("electrical_bandwidth", "must be positive"));
            }
        }
        if let ElectricalFilterKind::Bessel(n) = self.electrical_filter {
            if !(1..=10).contains(&n) {
                return Err(Error::invalid("bessel order", "must lie in [1, 10]"));
            }
        }
        Ok(())
    }

    pub fn bandwidth_for(&self, grid: &SignalGrid) -> f64 {
        self.electrical_bandwidth.unwrap_or(0.75 * grid.bit_rate())
    }
}

/// Photocurrent samples in amperes on the grid they were detected on.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectricalWaveform {
    samples: Vec<f64>,
    grid: SignalGrid,
}

impl ElectricalWaveform {
    pub fn new(grid: SignalGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n_samples() {
            return Err(Error::GridMismatch);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("electrical waveform"));
        }
        Ok(ElectricalWaveform { samples, grid })
    }

    pub fn grid(&self) -> &SignalGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / self.samples.len() as f64
    }
}

/// Square-law detection. Each sample receives independent Gaussian noise of
/// variance `2q(R·P + I_d)·B_e + i_th²·B_e`, with `B_e` the receiver's
/// electrical bandwidth.
pub fn photodetect(field: &OpticalField, spec: &ReceiverSpec, rng: &RngStream) -> Result<ElectricalWaveform> {
    spec.validate()?;
    let grid = *field.grid();
    let be = spec.bandwidth_for(&grid);
    let thermal_var = spec.thermal_noise_density * spec.thermal_noise_density * be;
    let noisy = spec.shot_noise || thermal_var > 0.0;
    let mut source = rng.source();
    let samples = field
        .samples()
        .iter()
        .map(|a| {
            let signal = spec.responsivity * a.norm_sqr();
            let mean = signal + spec.dark_current;
            if !noisy {
                return mean;
            }
            let shot_var = if spec.shot_noise { 2.0 * ELECTRON_CHARGE * mean * be } else { 0.0 };
            mean + (shot_var + thermal_var).sqrt() * source.gaussian()
        })
        .collect();
    ElectricalWaveform::new(grid, samples)
}

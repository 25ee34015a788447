use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fft::Fft;
use crate::grid::SignalGrid;
use crate::{Error, Result};

/// Complex baseband envelope on a [`SignalGrid`], in √W: `|a|²` is the
/// instantaneous power. The carrier is the grid's center frequency and the
/// envelope convention is `E(t) = Re{a(t) e^{+iω₀t}}`, so FFT bin frequency
/// equals optical frequency offset.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalField {
    samples: Vec<Complex64>,
    grid: SignalGrid,
}

impl OpticalField {
    pub fn new(grid: SignalGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n_samples() {
            return Err(Error::GridMismatch);
        }
        Ok(OpticalField { samples, grid })
    }

    pub fn zeros(grid: SignalGrid) -> Self {
        OpticalField { samples: alloc::vec![Complex64::new(0.0, 0.0); grid.n_samples()], grid }
    }

    /// Constant-envelope field carrying `power` watts.
    pub fn cw(grid: SignalGrid, power: f64) -> Self {
        let a = Complex64::new(num_traits::Float::sqrt(power.max(0.0)), 0.0);
        OpticalField { samples: alloc::vec![a; grid.n_samples()], grid }
    }

    pub fn grid(&self) -> &SignalGrid {
        &self.grid
    }

    pub fn center_frequency(&self) -> f64 {
        self.grid.center_frequency()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Mean of `|a|²`, watts.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Peak of `|a|²`, watts.
    pub fn peak_power(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max)
    }

    /// Energy over the window, joules.
    pub fn energy(&self) -> f64 {
        self.mean_power() * self.grid.time_window()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.samples {
            *a *= factor;
        }
    }

    /// Unnormalized forward FFT of the envelope.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut s = self.samples.clone();
        Fft::new(s.len()).forward(&mut s);
        s
    }

    /// Multiplies the spectrum bin-by-bin by `response(baseband_frequency)`.
    pub fn apply_spectral<F>(&mut self, mut response: F)
    where
        F: FnMut(f64) -> Complex64,
    {
        let fft = Fft::new(self.samples.len());
        fft.forward(&mut self.samples);
        for (k, s) in self.samples.iter_mut().enumerate() {
            *s *= response(self.grid.bin_frequency(k));
        }
        fft.inverse(&mut self.samples);
    }

    /// Relative RMS difference `‖a − b‖ / ‖b‖`.
    pub fn relative_rms_difference(&self, reference: &OpticalField) -> f64 {
        let num: f64 = self.samples.iter().zip(&reference.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = reference.samples.iter().map(|b| b.norm_sqr()).sum();
        num_traits::Float::sqrt(num / den)
    }
}

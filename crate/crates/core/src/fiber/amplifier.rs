use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fft::Fft;
use crate::field::OpticalField;
use crate::grid::SignalGrid;
use crate::rng::RngStream;
use crate::units::{db_to_linear, dbm_to_watts, PLANCK};
use crate::{Error, Result};

/// Lumped EDFA. Fixed gain unless `saturation_power_dbm` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierSpec {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    pub saturation_power_dbm: Option<f64>,
    /// Disables ASE entirely (idealized amplifier for tests).
    pub noiseless: bool,
}

impl Default for AmplifierSpec {
    fn default() -> Self {
        AmplifierSpec { gain_db: 16.0, noise_figure_db: 5.0, saturation_power_dbm: None, noiseless: false }
    }
}

impl AmplifierSpec {
    pub fn noiseless(gain_db: f64) -> Self {
        AmplifierSpec { gain_db, noiseless: true, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_db >= 0.0) || !self.gain_db.is_finite() {
            return Err(Error::invalid("gain_db", "must be finite and non-negative"));
        }
        if !self.noiseless && !(self.noise_figure_db >= 3.0) {
            return Err(Error::invalid("noise_figure_db", "below the 3 dB quantum limit"));
        }
        if let Some(p) = self.saturation_power_dbm {
            if !p.is_finite() {
                return Err(Error::invalid("saturation_power_dbm", "must be finite"));
            }
        }
        Ok(())
    }

    /// Spontaneous-emission factor `n_sp = NF/2` (linear).
    pub fn n_sp(&self) -> f64 {
        db_to_linear(self.noise_figure_db) / 2.0
    }

    /// Linear gain for a given input power. Under saturation solves
    /// `G = G0·exp(−(G − 1)·P_in/P_sat)`.
    pub fn linear_gain(&self, input_power: f64) -> f64 {
        let g0 = db_to_linear(self.gain_db);
        let Some(psat_dbm) = self.saturation_power_dbm else {
            return g0;
        };
        let ratio = input_power / dbm_to_watts(psat_dbm);
        if ratio <= 0.0 || g0 <= 1.0 {
            return g0;
        }
        // f(G) = ln G − ln G0 + (G − 1)·ratio is increasing; root lies in [1, G0].
        let (mut lo, mut hi) = (1.0, g0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.ln() - g0.ln() + (mid - 1.0) * ratio > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Single-polarization ASE spectral density `n_sp (G − 1) h ν`, W/Hz.
pub fn ase_spectral_density(amp: &AmplifierSpec, gain: f64, frequency: f64) -> f64 {
    if amp.noiseless {
        return 0.0;
    }
    amp.n_sp() * (gain - 1.0) * PLANCK * frequency
}

/// Scales the field by `√G` and adds circular Gaussian ASE. The ASE is white
/// inside the grid's usable band and absent from the guard band, standing
/// in for the amplifier's finite optical bandwidth.
pub fn amplify(field: &OpticalField, amp: &AmplifierSpec, rng: &RngStream) -> Result<OpticalField> {
    amp.validate()?;
    let gain = amp.linear_gain(field.mean_power());
    let mut out = field.clone();
    out.scale(gain.sqrt());
    let density = ase_spectral_density(amp, gain, field.center_frequency());
    if density > 0.0 {
        let grid = *field.grid();
        let mut source = rng.source();
        let variance = density * grid.sample_rate();
        let mut noise: Vec<Complex64> = (0..grid.n_samples()).map(|_| source.complex_gaussian(variance)).collect();
        let fft = Fft::new(grid.n_samples());
        fft.forward(&mut noise);
        let edge = grid.usable_half_band();
        for (k, n) in noise.iter_mut().enumerate() {
            if grid.bin_frequency(k).abs() > edge {
                *n = Complex64::new(0.0, 0.0);
            }
        }
        fft.inverse(&mut noise);
        for (a, n) in out.samples_mut().iter_mut().zip(&noise) {
            *a += n;
        }
    }
    Ok(out)
}

/// Total ASE power one amplifier adds to `grid`, W.
pub fn ase_power_on_grid(amp: &AmplifierSpec, gain: f64, grid: &SignalGrid) -> f64 {
    let edge = grid.usable_half_band();
    let bins = (0..grid.n_samples()).filter(|&k| grid.bin_frequency(k).abs() <= edge).count();
    ase_spectral_density(amp, gain, grid.center_frequency()) * bins as f64 * grid.frequency_step()
}

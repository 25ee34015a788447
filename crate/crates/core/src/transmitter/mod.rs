//! Per-channel transmitter: PRBS data, NRZ drive, chirp-free external
//! intensity modulation of a CW laser, and an optional lumped
//! pre-compensation module.

pub mod prbs;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::field::OpticalField;
use crate::grid::SignalGrid;
use crate::units::{dbm_to_watts, dispersion_to_beta2, PS_PER_NM};
use crate::{Error, Result};

pub use prbs::{prbs_generate, BitSequence};

/// 10–90% rise time of the raised-cosine edge as a fraction of its full
/// transition duration, `(2/π)·asin(0.8)`.
const RISE_FRACTION: f64 = 0.590_334_470_601_733_2;

#[derive(Debug, Clone, PartialEq)]
pub struct TransmitterSpec {
    /// Hz.
    pub bit_rate: f64,
    pub prbs_order: u32,
    pub prbs_seed: u64,
    /// Time-averaged launched power of a balanced pattern.
    pub laser_power_dbm: f64,
    /// m.
    pub laser_wavelength: f64,
    /// Mark/space power ratio, dB. `f64::INFINITY` gives ideal extinction.
    pub extinction_ratio_db: f64,
    /// 10–90% edge duration, s.
    pub rise_time: f64,
    /// Cumulative dispersion of the pre-compensation module, ps/nm.
    pub pre_dcm_ps_nm: f64,
}

impl Default for TransmitterSpec {
    fn default() -> Self {
        TransmitterSpec {
            bit_rate: 40e9,
            prbs_order: 11,
            prbs_seed: 1,
            laser_power_dbm: -12.0,
            laser_wavelength: 1550e-9,
            extinction_ratio_db: 30.0,
            rise_time: 0.25 / 40e9,
            pre_dcm_ps_nm: 0.0,
        }
    }
}

impl TransmitterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.bit_rate > 0.0) || !self.bit_rate.is_finite() {
            return Err(Error::invalid("bit_rate", "must be positive"));
        }
        if !(7..=31).contains(&self.prbs_order) {
            return Err(Error::PrbsOrder(self.prbs_order));
        }
        if !(self.extinction_ratio_db > 0.0) {
            return Err(Error::invalid("extinction_ratio_db", "must be positive"));
        }
        if !(self.rise_time >= 0.0) || self.rise_time >= 1.0 / self.bit_rate {
            return Err(Error::RiseTime);
        }
        if !(self.laser_wavelength > 0.0) {
            return Err(Error::invalid("laser_wavelength", "must be positive"));
        }
        if !self.laser_power_dbm.is_finite() || !self.pre_dcm_ps_nm.is_finite() {
            return Err(Error::invalid("laser_power_dbm", "must be finite"));
        }
        prbs::Lfsr::new(self.prbs_order, self.prbs_seed).map(|_| ())
    }
}

/// Smoothed unit step centred on `x = 0` with full transition `width`.
fn edge(x: f64, width: f64) -> f64 {
    if width == 0.0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    if x <= -0.5 * width {
        0.0
    } else if x >= 0.5 * width {
        1.0
    } else {
        0.5 * (1.0 + (PI * x / width).sin())
    }
}

/// NRZ drive in `[0, 1]`: each bit holds its level for a full bit slot and
/// transitions follow a raised-cosine edge of the given 10–90% rise time.
/// The pattern wraps around the grid's time window.
pub fn nrz_waveform(bits: &BitSequence, grid: &SignalGrid, rise_time: f64) -> Result<Vec<f64>> {
    let spb = grid.samples_per_bit();
    if bits.len() != grid.n_bits() {
        return Err(Error::WaveformLength { len: grid.n_samples(), bits: bits.len(), samples_per_bit: spb });
    }
    let bit_period = 1.0 / grid.bit_rate();
    if !(rise_time >= 0.0) || rise_time >= bit_period {
        return Err(Error::RiseTime);
    }
    let width = rise_time / RISE_FRACTION;
    let reach = (width / (2.0 * bit_period)).ceil() as isize + 1;
    let dt = grid.sample_interval();
    let wave = (0..grid.n_samples())
        .map(|n| {
            let k = (n / spb) as isize;
            let tau = (n % spb) as f64 * dt;
            let mut v = 0.0;
            for j in (k - reach)..=(k + reach) {
                if bits.cyclic(j) {
                    let t = tau + (k - j) as f64 * bit_period;
                    v += edge(t, width) - edge(t - bit_period, width);
                }
            }
            v.clamp(0.0, 1.0)
        })
        .collect();
    Ok(wave)
}

/// Mark and space powers (W) for an average launched power and extinction
/// ratio, assuming equal mark and space probability.
pub fn level_powers(average_dbm: f64, extinction_ratio_db: f64) -> (f64, f64) {
    let avg = dbm_to_watts(average_dbm);
    if extinction_ratio_db.is_infinite() {
        return (2.0 * avg, 0.0);
    }
    let er = 10.0.powf(extinction_ratio_db / 10.0);
    (2.0 * avg * er / (er + 1.0), 2.0 * avg / (er + 1.0))
}

/// Chirp-free intensity modulation of a CW laser:
/// `P(t) = P0 + (P1 − P0)·drive(t)` with constant envelope phase.
pub fn modulate(cw_power_dbm: f64, drive: &[f64], extinction_ratio_db: f64, grid: &SignalGrid) -> Result<OpticalField> {
    if drive.len() != grid.n_samples() {
        return Err(Error::GridMismatch);
    }
    if let Some(&bad) = drive.iter().find(|d| !(**d >= -1e-12 && **d <= 1.0 + 1e-12)) {
        return Err(Error::DriveRange(bad));
    }
    let (p1, p0) = level_powers(cw_power_dbm, extinction_ratio_db);
    let samples = drive.iter().map(|&d| Complex64::new((p0 + (p1 - p0) * d.clamp(0.0, 1.0)).sqrt(), 0.0)).collect();
    OpticalField::new(*grid, samples)
}

/// Spectral phase of an all-pass element accumulating `cumulative` s/m of
/// dispersion at `wavelength`, as a function of baseband frequency.
pub(crate) fn dispersion_phase(cumulative: f64, wavelength: f64) -> Result<impl Fn(f64) -> f64> {
    let beta2_l = dispersion_to_beta2(cumulative, wavelength)?;
    Ok(move |f: f64| {
        let w = 2.0 * PI * f;
        -0.5 * beta2_l * w * w
    })
}

/// Lossless lumped dispersion of `cumulative_ps_nm` at the field's carrier.
pub fn apply_dcm(field: &OpticalField, cumulative_ps_nm: f64) -> Result<OpticalField> {
    let mut out = field.clone();
    if cumulative_ps_nm == 0.0 {
        return Ok(out);
    }
    let phase = dispersion_phase(cumulative_ps_nm * PS_PER_NM, field.grid().center_wavelength())?;
    out.apply_spectral(|f| Complex64::from_polar(1.0, phase(f)));
    Ok(out)
}

/// A transmitter's output together with the data it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSignal {
    pub field: OpticalField,
    pub bits: BitSequence,
}

/// PRBS → NRZ → modulator → pre-DCM on `grid`, re-centred on the laser
/// wavelength.
pub fn build_channel(spec: &TransmitterSpec, grid: &SignalGrid) -> Result<ChannelSignal> {
    spec.validate()?;
    let bits = prbs_generate(spec.prbs_order, spec.prbs_seed, grid.n_bits())?;
    build_channel_with_bits(spec, grid, bits)
}

/// As [`build_channel`] but with caller-supplied data.
pub fn build_channel_with_bits(spec: &TransmitterSpec, grid: &SignalGrid, bits: BitSequence) -> Result<ChannelSignal> {
    spec.validate()?;
    if ((grid.bit_rate() - spec.bit_rate) / spec.bit_rate).abs() > 1e-12 {
        return Err(Error::invalid("bit_rate", "grid and transmitter bit rates differ"));
    }
    let grid = grid.with_center_wavelength(spec.laser_wavelength)?;
    let drive = nrz_waveform(&bits, &grid, spec.rise_time)?;
    let field = modulate(spec.laser_power_dbm, &drive, spec.extinction_ratio_db, &grid)?;
    let field = apply_dcm(&field, spec.pre_dcm_ps_nm)?;
    Ok(ChannelSignal { field, bits })
}

//! Symmetric split-step Fourier integration of the scalar nonlinear
//! Schrödinger equation with loss, second/third-order dispersion and Kerr
//! nonlinearity.
//!
//! In the envelope convention of [`OpticalField`] (`e^{+iω₀t}` carrier) the
//! equation reads
//! `∂A/∂z = −(α/2)A + i(β2/2)∂²A/∂t² + (β3/6)∂³A/∂t³ − iγ|A|²A`,
//! the complex conjugate of the textbook `e^{−iω₀t}` form. Intensities,
//! pulse widths and spectra are identical in either convention.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use num_traits::Float;

use crate::fft::Fft;
use crate::field::OpticalField;
use crate::units::{dispersion_to_beta2, slope_to_beta3, PS_PER_NM2_KM, PS_PER_NM_KM};
use crate::{Error, Result};

/// Fraction of spectral energy allowed inside the outer 20% of the band.
const GUARD_BAND_LEAKAGE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    pub label: String,
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
    /// D, ps/(nm km).
    pub dispersion_ps_nm_km: f64,
    /// dD/dλ, ps/(nm² km).
    pub dispersion_slope_ps_nm2_km: f64,
    /// γ, 1/(W km).
    pub gamma_per_w_km: f64,
}

impl FiberSpec {
    /// Standard single-mode fiber (Corning SMF class): 0.2 dB/km,
    /// +18 ps/(nm km), γ = 1.3 /(W km).
    pub fn smf(length_km: f64) -> Self {
        FiberSpec {
            label: "SMF".into(),
            length_km,
            attenuation_db_per_km: 0.2,
            dispersion_ps_nm_km: 18.0,
            dispersion_slope_ps_nm2_km: 0.0,
            gamma_per_w_km: 1.3,
        }
    }

    /// Dispersion-compensating fiber (Vascade S-1000 class): 0.5 dB/km,
    /// −38 ps/(nm km), γ = 5.0 /(W km).
    pub fn dcf(length_km: f64) -> Self {
        FiberSpec {
            label: "DCF".into(),
            length_km,
            attenuation_db_per_km: 0.5,
            dispersion_ps_nm_km: -38.0,
            dispersion_slope_ps_nm2_km: 0.0,
            gamma_per_w_km: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_km > 0.0) || !self.length_km.is_finite() {
            return Err(Error::invalid("length_km", "must be positive"));
        }
        if !(self.attenuation_db_per_km >= 0.0) {
            return Err(Error::invalid("attenuation_db_per_km", "must be non-negative"));
        }
        if !(self.gamma_per_w_km >= 0.0) {
            return Err(Error::invalid("gamma_per_w_km", "must be non-negative"));
        }
        if !self.dispersion_ps_nm_km.is_finite() || !self.dispersion_slope_ps_nm2_km.is_finite() {
            return Err(Error::invalid("dispersion_ps_nm_km", "must be finite"));
        }
        Ok(())
    }

    /// Accumulated dispersion `D·L`, ps/nm.
    pub fn cumulative_dispersion_ps_nm(&self) -> f64 {
        self.dispersion_ps_nm_km * self.length_km
    }

    pub fn loss_db(&self) -> f64 {
        self.attenuation_db_per_km * self.length_km
    }

    /// Power attenuation coefficient α, 1/m.
    pub fn alpha_per_m(&self) -> f64 {
        self.attenuation_db_per_km * LN_10 / 10.0 / 1e3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    Fixed,
    Adaptive,
}

/// Step policy. In adaptive mode `fixed_step_km` caps the step and the
/// per-step nonlinear phase `γ·P_peak·h` is held below
/// `max_nonlinear_phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub mode: StepMode,
    pub fixed_step_km: f64,
    pub max_nonlinear_phase: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { mode: StepMode::Fixed, fixed_step_km: 0.1, max_nonlinear_phase: 0.005 }
    }
}

impl StepControl {
    pub fn fixed(step_km: f64) -> Self {
        StepControl { mode: StepMode::Fixed, fixed_step_km: step_km, ..Default::default() }
    }

    pub fn adaptive(max_nonlinear_phase: f64, max_step_km: f64) -> Self {
        StepControl { mode: StepMode::Adaptive, fixed_step_km: max_step_km, max_nonlinear_phase }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fixed_step_km > 0.0) {
            return Err(Error::invalid("fixed_step_km", "must be positive"));
        }
        if !(self.max_nonlinear_phase > 0.0 && self.max_nonlinear_phase <= 0.1) {
            return Err(Error::invalid("max_nonlinear_phase", "must lie in (0, 0.1]"));
        }
        Ok(())
    }
}

/// Rejects fields whose spectrum leaks noticeably into the outer 20% of the
/// sampled band (the 25% guard of the grid).
fn check_occupied_bandwidth(field: &OpticalField) -> Result<()> {
    let grid = field.grid();
    let spectrum = field.spectrum();
    let edge = grid.usable_half_band();
    let (mut total, mut guard) = (0.0, 0.0);
    for (k, s) in spectrum.iter().enumerate() {
        let e = s.norm_sqr();
        total += e;
        if grid.bin_frequency(k).abs() > edge {
            guard += e;
        }
    }
    if total > 0.0 && guard > GUARD_BAND_LEAKAGE * total {
        return Err(Error::GridBandwidth {
            sample_rate: grid.sample_rate(),
            required: grid.sample_rate() * (1.0 + guard / total),
        });
    }
    Ok(())
}

struct LinearStep {
    alpha: f64,
    phase_per_m: Vec<f64>,
}

impl LinearStep {
    fn operator(&self, h: f64) -> Vec<Complex64> {
        let amp = (-0.5 * self.alpha * h).exp();
        self.phase_per_m.iter().map(|&p| Complex64::from_polar(amp, p * h)).collect()
    }
}

fn apply_linear(fft: &Fft, data: &mut [Complex64], op: &[Complex64]) {
    fft.forward(data);
    for (d, o) in data.iter_mut().zip(op) {
        *d *= *o;
    }
    fft.inverse(data);
}

fn apply_nonlinear(data: &mut [Complex64], gamma: f64, h: f64) {
    for a in data.iter_mut() {
        let phi = -gamma * a.norm_sqr() * h;
        *a *= Complex64::from_polar(1.0, phi);
    }
}

/// Propagates `field` through `fiber`. With `γ = 0` the whole length is one
/// exact linear step.
pub fn propagate_fiber(field: &OpticalField, fiber: &FiberSpec, ctl: &StepControl) -> Result<OpticalField> {
    fiber.validate()?;
    ctl.validate()?;
    check_occupied_bandwidth(field)?;

    let grid = *field.grid();
    let lambda = grid.center_wavelength();
    let d = fiber.dispersion_ps_nm_km * PS_PER_NM_KM;
    let beta2 = dispersion_to_beta2(d, lambda)?;
    let beta3 = slope_to_beta3(fiber.dispersion_slope_ps_nm2_km * PS_PER_NM2_KM, d, lambda);
    let linear = LinearStep {
        alpha: fiber.alpha_per_m(),
        phase_per_m: (0..grid.n_samples())
            .map(|k| {
                let w = 2.0 * PI * grid.bin_frequency(k);
                -0.5 * beta2 * w * w - beta3 * w * w * w / 6.0
            })
            .collect(),
    };
    let gamma = fiber.gamma_per_w_km / 1e3;
    let length = fiber.length_km * 1e3;
    let fft = Fft::new(grid.n_samples());
    let mut data = field.samples().to_vec();

    if gamma == 0.0 {
        apply_linear(&fft, &mut data, &linear.operator(length));
    } else {
        match ctl.mode {
            StepMode::Fixed => {
                let n = ((length / (ctl.fixed_step_km * 1e3)) - 1e-9).ceil().max(1.0) as usize;
                let h = length / n as f64;
                let half = linear.operator(0.5 * h);
                let full = linear.operator(h);
                apply_linear(&fft, &mut data, &half);
                for i in 0..n {
                    apply_nonlinear(&mut data, gamma, h);
                    let op = if i + 1 == n { &half } else { &full };
                    apply_linear(&fft, &mut data, op);
                }
            }
            StepMode::Adaptive => {
                let max_step = ctl.fixed_step_km * 1e3;
                let mut z = 0.0;
                while z < length * (1.0 - 1e-12) {
                    let peak = data.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
                    let limit = if peak > 0.0 { ctl.max_nonlinear_phase / (gamma * peak) } else { max_step };
                    let h = max_step.min(limit).min(length - z);
                    let half = linear.operator(0.5 * h);
                    apply_linear(&fft, &mut data, &half);
                    apply_nonlinear(&mut data, gamma, h);
                    apply_linear(&fft, &mut data, &half);
                    z += h;
                }
            }
        }
    }

    let out = OpticalField::new(grid, data)?;
    if !out.is_finite() {
        return Err(Error::NonFinite("propagate_fiber"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::transmitter::{build_channel, TransmitterSpec};
    use crate::units::watts_to_dbm;

    fn channel(n_bits: usize) -> OpticalField {
        let grid = make_grid(n_bits * 16, 40e9, 16, 1550e-9).unwrap();
        build_channel(&TransmitterSpec::default(), &grid).unwrap().field
    }

    fn lossless(mut f: FiberSpec) -> FiberSpec {
        f.attenuation_db_per_km = 0.0;
        f
    }

    #[test]
    fn linear_lossless_conserves_energy() {
        let input = channel(256);
        let mut smf = lossless(FiberSpec::smf(80.0));
        smf.gamma_per_w_km = 0.0;
        let out = propagate_fiber(&input, &smf, &StepControl::default()).unwrap();
        assert!((out.energy() / input.energy() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonlinear_lossless_conserves_energy() {
        let mut input = channel(256);
        input.scale(30.0); // ~ +17 dBm average
        let smf = lossless(FiberSpec::smf(20.0));
        for ctl in [StepControl::default(), StepControl::adaptive(0.005, 0.5)] {
            let out = propagate_fiber(&input, &smf, &ctl).unwrap();
            assert!((out.energy() / input.energy() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn loss_of_39_km() {
        let input = channel(128);
        let mut smf = FiberSpec::smf(39.0);
        smf.gamma_per_w_km = 0.0;
        let out = propagate_fiber(&input, &smf, &StepControl::default()).unwrap();
        let drop = watts_to_dbm(input.mean_power()) - watts_to_dbm(out.mean_power());
        assert!((drop - 7.8).abs() < 1e-9, "{drop}");
    }

    #[test]
    fn linear_propagation_is_linear() {
        let input = channel(128);
        let mut smf = FiberSpec::smf(25.0);
        smf.gamma_per_w_km = 0.0;
        let a = Complex64::new(0.6, -1.7);
        let mut scaled = input.clone();
        for s in scaled.samples_mut() {
            *s *= a;
        }
        let out_scaled = propagate_fiber(&scaled, &smf, &StepControl::default()).unwrap();
        let mut expected = propagate_fiber(&input, &smf, &StepControl::default()).unwrap();
        for s in expected.samples_mut() {
            *s *= a;
        }
        assert!(out_scaled.relative_rms_difference(&expected) < 1e-10);
    }

    #[test]
    fn rejects_invalid_fibers_and_steps() {
        let input = channel(64);
        let mut bad = FiberSpec::smf(-1.0);
        assert!(propagate_fiber(&input, &bad, &StepControl::default()).is_err());
        bad = FiberSpec::smf(1.0);
        bad.gamma_per_w_km = -1.0;
        assert!(propagate_fiber(&input, &bad, &StepControl::default()).is_err());
        let ctl = StepControl { max_nonlinear_phase: 0.5, ..Default::default() };
        assert!(propagate_fiber(&input, &FiberSpec::smf(1.0), &ctl).is_err());
    }

    #[test]
    fn absurd_power_overflows_to_error() {
        let mut input = channel(64);
        input.scale(1e160);
        let smf = FiberSpec::smf(1.0);
        assert!(matches!(
            propagate_fiber(&input, &smf, &StepControl::default()),
            Err(Error::NonFinite(_)) | Err(Error::GridBandwidth { .. })
        ));
    }

    #[test]
    fn undersampled_field_is_rejected() {
        let grid = make_grid(1024, 40e9, 4, 1550e-9).unwrap();
        // White-ish content fills the whole band.
        let samples = (0..1024).map(|i| Complex64::from_polar(1e-3, (i * i) as f64 * 0.37)).collect();
        let f = OpticalField::new(grid, samples).unwrap();
        assert!(matches!(
            propagate_fiber(&f, &FiberSpec::smf(1.0), &StepControl::default()),
            Err(Error::GridBandwidth { .. })
        ));
    }
}

//! Wavelength multiplexing onto a shared aggregate grid and filtered
//! demultiplexing back to per-channel grids.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::fft::Fft;
use crate::field::OpticalField;
use crate::grid::{SignalGrid, BANDWIDTH_GUARD};
use crate::rng::mix_seed;
use crate::transmitter::TransmitterSpec;
use crate::units::{frequency_to_wavelength, wavelength_span_to_frequency, wavelength_to_frequency, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Per-channel departures from the shared transmitter settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelOverride {
    pub channel: usize,
    pub laser_power_dbm: Option<f64>,
    pub extinction_ratio_db: Option<f64>,
    pub pre_dcm_ps_nm: Option<f64>,
    pub prbs_seed: Option<u64>,
}

/// Uniform wavelength grid `first_wavelength + k·spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    pub n_channels: usize,
    /// m.
    pub first_wavelength: f64,
    /// m.
    pub spacing: f64,
    pub overrides: Vec<ChannelOverride>,
}

impl ChannelPlan {
    pub fn new(n_channels: usize, first_wavelength: f64, spacing: f64) -> Result<Self> {
        let plan = ChannelPlan { n_channels, first_wavelength, spacing, overrides: Vec::new() };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::invalid("n_channels", "must be at least 1"));
        }
        if !(self.first_wavelength > 0.0) {
            return Err(Error::invalid("first_wavelength", "must be positive"));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        for o in &self.overrides {
            if o.channel >= self.n_channels {
                return Err(Error::ChannelIndex { index: o.channel, n_channels: self.n_channels });
            }
        }
        Ok(())
    }

    pub fn wavelength(&self, k: usize) -> f64 {
        self.first_wavelength + k as f64 * self.spacing
    }

    pub fn frequency(&self, k: usize) -> f64 {
        SPEED_OF_LIGHT / self.wavelength(k)
    }

    pub fn last_wavelength(&self) -> f64 {
        self.wavelength(self.n_channels - 1)
    }

    /// Midpoint of the outermost channel frequencies; the aggregate carrier.
    pub fn center_frequency(&self) -> f64 {
        0.5 * (self.frequency(0) + self.frequency(self.n_channels - 1))
    }

    pub fn center_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency()
    }

    /// Channel spacing in frequency at the band centre.
    pub fn spacing_hz(&self) -> f64 {
        wavelength_span_to_frequency(self.spacing, self.center_wavelength())
    }

    /// `N × spacing`, the band the aggregate grid must carry.
    pub fn occupied_bandwidth(&self) -> f64 {
        self.n_channels as f64 * self.spacing_hz()
    }

    /// Smallest power-of-two oversampling of `channel_grid` whose sample
    /// rate covers the plan with a 25% guard.
    pub fn aggregate_grid(&self, channel_grid: &SignalGrid) -> Result<SignalGrid> {
        let required = BANDWIDTH_GUARD * self.occupied_bandwidth();
        let mut factor = 1;
        while channel_grid.sample_rate() * (factor as f64) < required {
            factor *= 2;
        }
        let grid = channel_grid.oversampled(factor, self.center_wavelength())?;
        grid.check_bandwidth(self.occupied_bandwidth())?;
        Ok(grid)
    }

    /// Transmitter settings for channel `k`: the shared spec at the channel's
    /// wavelength, a per-channel PRBS seed, then any override.
    pub fn transmitter_for(&self, k: usize, base: &TransmitterSpec) -> Result<TransmitterSpec> {
        if k >= self.n_channels {
            return Err(Error::ChannelIndex { index: k, n_channels: self.n_channels });
        }
        let mask = (1u64 << base.prbs_order.min(63)) - 1;
        let mut seed = mix_seed(&[base.prbs_seed, k as u64]) & mask;
        if seed == 0 {
            seed = 1;
        }
        let mut spec = TransmitterSpec { laser_wavelength: self.wavelength(k), prbs_seed: seed, ..base.clone() };
        for o in self.overrides.iter().filter(|o| o.channel == k) {
            if let Some(p) = o.laser_power_dbm {
                spec.laser_power_dbm = p;
            }
            if let Some(er) = o.extinction_ratio_db {
                spec.extinction_ratio_db = er;
            }
            if let Some(d) = o.pre_dcm_ps_nm {
                spec.pre_dcm_ps_nm = d;
            }
            if let Some(s) = o.prbs_seed {
                spec.prbs_seed = s;
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterShape {
    Gaussian,
    /// Order 1 is the Gaussian; higher orders flatten the passband.
    SuperGaussian(u32),
}

/// Optical band-pass filter. Power transmission
/// `H(f) = exp(−ln2·(2(f − f0)/B)^(2n))`, so `B` is the FWHM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub shape: FilterShape,
    /// FWHM, m.
    pub fwhm: f64,
    /// Detuning of the filter centre from its nominal slot, m.
    pub center_offset: f64,
}

impl FilterSpec {
    pub fn gaussian(fwhm: f64) -> Self {
        FilterSpec { shape: FilterShape::Gaussian, fwhm, center_offset: 0.0 }
    }

    pub fn super_gaussian(order: u32, fwhm: f64) -> Self {
        FilterSpec { shape: FilterShape::SuperGaussian(order), fwhm, center_offset: 0.0 }
    }

    pub fn order(&self) -> u32 {
        match self.shape {
            FilterShape::Gaussian => 1,
            FilterShape::SuperGaussian(n) => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.order()) {
            return Err(Error::invalid("filter order", "must lie in [1, 4]"));
        }
        if !(self.fwhm > 0.0) {
            return Err(Error::invalid("fwhm", "must be positive"));
        }
        Ok(())
    }

    /// Power transmission at `detuning` Hz from the centre for FWHM `fwhm_hz`.
    pub fn power_response(&self, detuning: f64, fwhm_hz: f64) -> f64 {
        let x = 2.0 * detuning / fwhm_hz;
        (-core::f64::consts::LN_2 * x.powi(2 * self.order() as i32)).exp()
    }
}

/// Amplitude transmission per FFT bin of `grid` for a filter centred
/// `center_offset_hz` from the grid carrier. FWHM is converted from
/// wavelength at the filter centre.
pub fn filter_response(filter: &FilterSpec, grid: &SignalGrid, center_offset_hz: f64) -> Result<Vec<f64>> {
    filter.validate()?;
    let f0 = grid.center_frequency() + center_offset_hz;
    let fwhm_hz = wavelength_span_to_frequency(filter.fwhm, frequency_to_wavelength(f0)?);
    Ok((0..grid.n_samples())
        .map(|k| filter.power_response(grid.bin_frequency(k) - center_offset_hz, fwhm_hz).sqrt())
        .collect())
}

fn signed_bin(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

fn oversampling(channel: &SignalGrid, aggregate: &SignalGrid) -> Result<usize> {
    let (nc, na) = (channel.n_samples(), aggregate.n_samples());
    let same_window = ((channel.time_window() - aggregate.time_window()) / aggregate.time_window()).abs() < 1e-12;
    if !same_window || na < nc || na % nc != 0 {
        return Err(Error::GridMismatch);
    }
    Ok(na / nc)
}

/// Places every channel at its carrier offset (rounded to the nearest bin)
/// on the aggregate grid and sums them. Ideal, lossless combiner.
pub fn mux(fields: &[OpticalField], plan: &ChannelPlan, aggregate_grid: &SignalGrid) -> Result<OpticalField> {
    plan.validate()?;
    if fields.len() != plan.n_channels {
        return Err(Error::invalid("fields", "one field per planned channel required"));
    }
    aggregate_grid.check_bandwidth(plan.occupied_bandwidth())?;
    let na = aggregate_grid.n_samples();
    let mut total = alloc::vec![Complex64::new(0.0, 0.0); na];
    for field in fields {
        let factor = oversampling(field.grid(), aggregate_grid)?;
        let nc = field.grid().n_samples();
        let shift = (field.center_frequency() - aggregate_grid.center_frequency()) / aggregate_grid.frequency_step();
        let shift = shift.round() as isize;
        let spectrum = field.spectrum();
        for (j, x) in spectrum.iter().enumerate() {
            let dest = (signed_bin(j, nc) + shift).rem_euclid(na as isize) as usize;
            total[dest] += *x * factor as f64;
        }
    }
    Fft::new(na).inverse(&mut total);
    OpticalField::new(*aggregate_grid, total)
}

/// Filters channel `channel_index` out of the aggregate and returns it at
/// baseband on `channel_grid`, re-centred on the channel's planned
/// wavelength. The filter sits at `first_wavelength + index·demux_spacing`
/// (plus its own offset), so a spacing different from the plan detunes the
/// filter bank progressively from channel 0.
pub fn demux(
    aggregate: &OpticalField,
    plan: &ChannelPlan,
    channel_index: usize,
    filter: &FilterSpec,
    demux_spacing: f64,
    channel_grid: &SignalGrid,
) -> Result<OpticalField> {
    plan.validate()?;
    filter.validate()?;
    if channel_index >= plan.n_channels {
        return Err(Error::ChannelIndex { index: channel_index, n_channels: plan.n_channels });
    }
    let agg_grid = aggregate.grid();
    let out_grid = channel_grid.with_center_wavelength(plan.wavelength(channel_index))?;
    let factor = oversampling(&out_grid, agg_grid)?;
    let (na, nc) = (agg_grid.n_samples(), out_grid.n_samples());
    let df = agg_grid.frequency_step();

    let filter_wavelength = plan.first_wavelength + channel_index as f64 * demux_spacing + filter.center_offset;
    let filter_frequency = wavelength_to_frequency(filter_wavelength)?;
    let filter_offset = filter_frequency - agg_grid.center_frequency();
    let fwhm_hz = wavelength_span_to_frequency(filter.fwhm, filter_wavelength);
    let shift = ((out_grid.center_frequency() - agg_grid.center_frequency()) / df).round() as isize;

    let spectrum = aggregate.spectrum();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); nc];
    for (j, y) in out.iter_mut().enumerate() {
        let src = (signed_bin(j, nc) + shift).rem_euclid(na as isize) as usize;
        let f = agg_grid.bin_frequency(src);
        let h = filter.power_response(f - filter_offset, fwhm_hz).sqrt();
        *y = spectrum[src] * (h / factor as f64);
    }
    Fft::new(nc).inverse(&mut out);
    OpticalField::new(out_grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::units::dbm_to_watts;
    use core::f64::consts::{LN_2, PI};

    fn channel_grid() -> SignalGrid {
        make_grid(4096, 40e9, 16, 1550e-9).unwrap()
    }

    #[test]
    fn thirty_two_channel_band() {
        let plan = ChannelPlan::new(32, 1543.6e-9, 0.4e-9).unwrap();
        assert!((plan.last_wavelength() - 1556.0e-9).abs() < 1e-15);
        assert!(((plan.last_wavelength() - plan.first_wavelength) - 12.4e-9).abs() < 1e-15);
        let agg = plan.aggregate_grid(&channel_grid()).unwrap();
        assert_eq!(agg.n_samples(), 4 * 4096);
        assert!(agg.sample_rate() >= 1.25 * plan.occupied_bandwidth());
    }

    #[test]
    fn response_shape() {
        let g = make_grid(1 << 14, 40e9, 16, 1550e-9).unwrap();
        let f = FilterSpec::gaussian(0.3e-9);
        let h = filter_response(&f, &g, 0.0).unwrap();
        assert_eq!(h[0], 1.0);
        let b = wavelength_span_to_frequency(0.3e-9, 1550e-9);
        assert!((f.power_response(b / 2.0, b) - 0.5).abs() < 1e-15);
        assert!((f.power_response(-b / 2.0, b) - 0.5).abs() < 1e-15);
        // Integral of the order-1 power response is B·√(π/(4 ln 2)).
        let df = g.frequency_step();
        let integral: f64 = h.iter().map(|a| a * a).sum::<f64>() * df;
        let closed = b * (PI / (4.0 * LN_2)).sqrt();
        assert!((integral / closed - 1.0).abs() < 1e-6, "{integral} {closed}");
        for order in 2..=4 {
            let sg = FilterSpec::super_gaussian(order, 0.3e-9);
            assert!((sg.power_response(b / 2.0, b) - 0.5).abs() < 1e-15);
        }
        assert!(FilterSpec::super_gaussian(5, 0.3e-9).validate().is_err());
    }

    #[test]
    fn single_channel_round_trip_is_identity() {
        let plan = ChannelPlan::new(1, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let samples = (0..4096).map(|i| Complex64::new(1e-3 * (i as f64 * 0.01).sin(), 2e-4)).collect();
        let field = OpticalField::new(g, samples).unwrap();
        let agg_grid = plan.aggregate_grid(&g).unwrap();
        let agg = mux(core::slice::from_ref(&field), &plan, &agg_grid).unwrap();
        assert!(agg.relative_rms_difference(&field) < 1e-9);
    }

    #[test]
    fn two_tones_add_power() {
        let plan = ChannelPlan::new(2, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let fields: Vec<OpticalField> = (0..2)
            .map(|k| OpticalField::cw(g.with_center_wavelength(plan.wavelength(k)).unwrap(), dbm_to_watts(-12.0)))
            .collect();
        let agg = mux(&fields, &plan, &plan.aggregate_grid(&g).unwrap()).unwrap();
        let p = crate::units::watts_to_dbm(agg.mean_power());
        assert!((p + 8.99).abs() < 0.01, "{p}");
        let spec = agg.spectrum();
        let mut bins: Vec<(usize, f64)> = spec.iter().map(|c| c.norm_sqr()).enumerate().collect();
        bins.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let f1 = agg.grid().bin_frequency(bins[0].0);
        let f2 = agg.grid().bin_frequency(bins[1].0);
        let expected = plan.frequency(0) - plan.frequency(1);
        assert!(((f1 - f2).abs() - expected).abs() <= agg.grid().frequency_step());
        assert!((expected / 1e9 - 49.9).abs() < 0.1);
    }

    #[test]
    fn demux_passes_on_centre_and_halves_at_half_fwhm() {
        let plan = ChannelPlan::new(1, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let filter = FilterSpec::gaussian(0.3e-9);
        let cw = OpticalField::cw(g, 1e-3);
        let out = demux(&cw, &plan, 0, &filter, 0.4e-9, &g).unwrap();
        assert!((out.mean_power() / 1e-3 - 1.0).abs() < 1e-6);

        // Detune the filter by FWHM/2 in frequency terms.
        let b = wavelength_span_to_frequency(0.3e-9, 1550e-9);
        let df = g.frequency_step();
        let steps = (b / 2.0 / df).round();
        let tone: Vec<Complex64> =
            (0..4096).map(|i| Complex64::from_polar(1e-3f64.sqrt(), 2.0 * PI * steps * i as f64 / 4096.0)).collect();
        let tone = OpticalField::new(g, tone).unwrap();
        let out = demux(&tone, &plan, 0, &filter, 0.4e-9, &g).unwrap();
        let db = 10.0 * (out.mean_power() / 1e-3).log10();
        let exact = 10.0 * filter.power_response(steps * df, b).log10();
        assert!((db - exact).abs() < 1e-9);
        assert!((db + 3.01).abs() < 0.05, "{db}");
    }

    #[test]
    fn rejects_out_of_range_index() {
        let plan = ChannelPlan::new(2, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let agg = OpticalField::zeros(plan.aggregate_grid(&g).unwrap());
        assert_eq!(
            demux(&agg, &plan, 2, &FilterSpec::gaussian(0.3e-9), 0.4e-9, &g),
            Err(Error::ChannelIndex { index: 2, n_channels: 2 })
        );
    }

    #[test]
    fn override_and_seeds() {
        let mut plan = ChannelPlan::new(4, 1550e-9, 0.4e-9).unwrap();
        plan.overrides.push(ChannelOverride { channel: 2, laser_power_dbm: Some(-5.0), ..Default::default() });
        let base = TransmitterSpec::default();
        let t2 = plan.transmitter_for(2, &base).unwrap();
        assert_eq!(t2.laser_power_dbm, -5.0);
        assert!((t2.laser_wavelength - 1550.8e-9).abs() < 1e-18);
        let seeds: Vec<u64> = (0..4).map(|k| plan.transmitter_for(k, &base).unwrap().prbs_seed).collect();
        assert!(seeds.iter().all(|&s| s != 0 && s < (1 << base.prbs_order)));
        assert_ne!(seeds[0], seeds[1]);
        plan.overrides.push(ChannelOverride { channel: 9, ..Default::default() });
        assert!(plan.validate().is_err());
    }

    fn modulated(plan: &ChannelPlan, k: usize, g: &SignalGrid) -> OpticalField {
        let base = TransmitterSpec { laser_power_dbm: -12.0, ..TransmitterSpec::default() };
        let spec = plan.transmitter_for(k, &base).unwrap();
        crate::transmitter::build_channel(&spec, g).unwrap().field
    }

    fn leakage(fwhm: f64) -> (f64, f64) {
        let plan = ChannelPlan::new(2, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let neighbour = modulated(&plan, 1, &g);
        let dark = OpticalField::zeros(g.with_center_wavelength(plan.wavelength(0)).unwrap());
        let agg = mux(&[dark, neighbour.clone()], &plan, &plan.aggregate_grid(&g).unwrap()).unwrap();
        let filter = FilterSpec::super_gaussian(2, fwhm);
        let measured = demux(&agg, &plan, 0, &filter, 0.4e-9, &g).unwrap().mean_power();

        // Direct integration of the neighbour's spectrum against the filter.
        let spectrum = neighbour.spectrum();
        let n = g.n_samples() as f64;
        let fwhm_hz = wavelength_span_to_frequency(fwhm, plan.wavelength(0));
        let offset = plan.frequency(1) - plan.frequency(0);
        let oracle: f64 = spectrum
            .iter()
            .enumerate()
            .map(|(j, x)| x.norm_sqr() * filter.power_response(g.bin_frequency(j) + offset, fwhm_hz))
            .sum::<f64>()
            / (n * n);
        (measured, oracle)
    }

    #[test]
    fn adjacent_leakage_grows_with_bandwidth() {
        let (wide, wide_oracle) = leakage(0.3e-9);
        let (narrow, narrow_oracle) = leakage(0.2e-9);
        assert!(wide > 0.0 && narrow > 0.0);
        assert!(wide > narrow, "{wide} {narrow}");
        assert!((wide / wide_oracle - 1.0).abs() < 0.05, "{wide} {wide_oracle}");
        assert!((narrow / narrow_oracle - 1.0).abs() < 0.05, "{narrow} {narrow_oracle}");
    }

    #[test]
    fn wide_filter_round_trip() {
        // Carrier plus tones confined to ±20 GHz, through a flat-top filter
        // three times that wide.
        let plan = ChannelPlan::new(1, 1550e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let n = g.n_samples();
        let df = g.frequency_step();
        let samples: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let mut a = Complex64::new(0.03, 0.0);
                for m in 1..=8 {
                    let k = (m as f64 * 2.5e9 / df).round();
                    let phase = 2.0 * PI * k * t;
                    a += Complex64::from_polar(0.01 / m as f64, phase + 0.37 * (m * m) as f64);
                    a += Complex64::from_polar(0.004, -phase + m as f64);
                }
                a
            })
            .collect();
        let field = OpticalField::new(g, samples).unwrap();
        let bandwidth = 40e9;
        let fwhm = 3.0 * bandwidth * 1550e-9 * 1550e-9 / crate::units::SPEED_OF_LIGHT;
        let agg = mux(core::slice::from_ref(&field), &plan, &plan.aggregate_grid(&g).unwrap()).unwrap();
        let out = demux(&agg, &plan, 0, &FilterSpec::super_gaussian(4, fwhm), 0.4e-9, &g).unwrap();
        let rms = out.relative_rms_difference(&field);
        assert!(rms < 1e-3, "{rms}");
    }

    #[test]
    fn standard_filter_bank_is_centred() {
        let plan = ChannelPlan::new(32, 1543.6e-9, 0.4e-9).unwrap();
        let g = channel_grid();
        let agg_grid = plan.aggregate_grid(&g).unwrap();
        let mut impulse = OpticalField::zeros(agg_grid);
        impulse.samples_mut()[0] = Complex64::new(1.0, 0.0);
        let filter = FilterSpec::super_gaussian(2, 0.3e-9);
        let factor = (agg_grid.n_samples() / g.n_samples()) as f64;
        for k in 0..plan.n_channels {
            let out = demux(&impulse, &plan, k, &filter, 0.4e-9, &g).unwrap();
            let response: Vec<f64> = out.spectrum().iter().map(|y| y.norm() * factor).collect();
            let (peak_bin, peak) =
                response.iter().enumerate().fold((0, 0.0), |best, (j, &h)| if h > best.1 { (j, h) } else { best });
            assert!((peak - 1.0).abs() < 1e-6, "channel {k}: {peak}");
            assert!(signed_bin(peak_bin, g.n_samples()).abs() <= 1, "channel {k}: bin {peak_bin}");
        }
    }

    #[test]
    fn disjoint_channels_add_energy() {
        let plan = ChannelPlan::new(3, 1548.0e-9, 3.2e-9).unwrap();
        let g = channel_grid();
        let fields: Vec<OpticalField> = (0..3).map(|k| modulated(&plan, k, &g)).collect();
        let agg = mux(&fields, &plan, &plan.aggregate_grid(&g).unwrap()).unwrap();
        let sum: f64 = fields.iter().map(OpticalField::energy).sum();
        assert!((agg.energy() / sum - 1.0).abs() < 1e-3, "{} {sum}", agg.energy());
    }
}

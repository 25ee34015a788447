//! Scenario files: JSON with every field optional, defaults filled in,
//! unknown keys rejected.

use std::fs;
use std::path::Path;

use dwdm_core::fiber::{AmplifierSpec, FiberSpec, Link, Span, StepControl, StepMode};
use dwdm_core::grid::make_grid;
use dwdm_core::receiver::{ElectricalFilterKind, ReceiverSpec};
use dwdm_core::transmitter::TransmitterSpec;
use dwdm_core::wdm::{ChannelOverride, ChannelPlan, FilterShape, FilterSpec};
use dwdm_core::SignalGrid;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub grid: GridConfig,
    pub channels: ChannelsConfig,
    pub transmitter: TransmitterConfig,
    pub span: SpanConfig,
    /// Number of span repetitions; 0 is back-to-back.
    pub loops: i64,
    pub step: StepConfig,
    pub receiver: ReceiverConfig,
    pub demux: DemuxConfig,
    pub metrics: MetricsConfig,
    pub sweep: Option<SweepConfig>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".into(),
            seed: 1,
            grid: GridConfig::default(),
            channels: ChannelsConfig::default(),
            transmitter: TransmitterConfig::default(),
            span: SpanConfig::default(),
            loops: 1,
            step: StepConfig::default(),
            receiver: ReceiverConfig::default(),
            demux: DemuxConfig::default(),
            metrics: MetricsConfig::default(),
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub bits: usize,
    pub samples_per_bit: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { bits: 1024, samples_per_bit: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelsConfig {
    pub count: usize,
    pub first_wavelength_nm: f64,
    pub spacing_nm: f64,
    pub overrides: Vec<OverrideConfig>,
}

impl Default for ChannelsConfig {
    fn default() -> Self {
        ChannelsConfig { count: 1, first_wavelength_nm: 1550.0, spacing_nm: 0.4, overrides: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideConfig {
    pub channel: usize,
    #[serde(default)]
    pub power_dbm: Option<f64>,
    #[serde(default)]
    pub extinction_ratio_db: Option<f64>,
    #[serde(default)]
    pub pre_dcm_ps_nm: Option<f64>,
    #[serde(default)]
    pub prbs_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransmitterConfig {
    pub bit_rate_gbps: f64,
    pub power_dbm: f64,
    /// `null` is an ideal (infinite) extinction ratio.
    pub extinction_ratio_db: Option<f64>,
    pub rise_time_ps: f64,
    pub prbs_order: u32,
    pub prbs_seed: u64,
    /// `null` cancels the accumulated residual of the whole link.
    pub pre_dcm_ps_nm: Option<f64>,
}

impl Default for TransmitterConfig {
    fn default() -> Self {
        let t = TransmitterSpec::default();
        TransmitterConfig {
            bit_rate_gbps: t.bit_rate / 1e9,
            power_dbm: t.laser_power_dbm,
            extinction_ratio_db: Some(t.extinction_ratio_db),
            rise_time_ps: t.rise_time * 1e12,
            prbs_order: t.prbs_order,
            prbs_seed: t.prbs_seed,
            pre_dcm_ps_nm: None,
        }
    }
}

macro_rules! fiber_config {
    ($name:ident, $base:expr) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            pub length_km: f64,
            pub attenuation_db_per_km: f64,
            pub dispersion_ps_nm_km: f64,
            pub slope_ps_nm2_km: f64,
            pub gamma_per_w_km: f64,
        }

        impl Default for $name {
            fn default() -> Self {
                let f: FiberSpec = $base;
                $name {
                    length_km: f.length_km,
                    attenuation_db_per_km: f.attenuation_db_per_km,
                    dispersion_ps_nm_km: f.dispersion_ps_nm_km,
                    slope_ps_nm2_km: f.dispersion_slope_ps_nm2_km,
                    gamma_per_w_km: f.gamma_per_w_km,
                }
            }
        }

        impl $name {
            fn to_spec(&self, label: &str) -> FiberSpec {
                FiberSpec {
                    label: label.into(),
                    length_km: self.length_km,
                    attenuation_db_per_km: self.attenuation_db_per_km,
                    dispersion_ps_nm_km: self.dispersion_ps_nm_km,
                    dispersion_slope_ps_nm2_km: self.slope_ps_nm2_km,
                    gamma_per_w_km: self.gamma_per_w_km,
                }
            }
        }
    };
}

fiber_config!(SmfConfig, FiberSpec::smf(39.0));
fiber_config!(DcfConfig, FiberSpec::dcf(17.9));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdfaConfig {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    pub saturation_power_dbm: Option<f64>,
    pub noiseless: bool,
}

impl Default for EdfaConfig {
    fn default() -> Self {
        let a = AmplifierSpec::default();
        EdfaConfig {
            gain_db: a.gain_db,
            noise_figure_db: a.noise_figure_db,
            saturation_power_dbm: a.saturation_power_dbm,
            noiseless: a.noiseless,
        }
    }
}

/// SMF, then optional DCF, then optional EDFA. `null` removes a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpanConfig {
    pub smf: SmfConfig,
    pub dcf: Option<DcfConfig>,
    pub edfa: Option<EdfaConfig>,
}

impl Default for SpanConfig {
    fn default() -> Self {
        SpanConfig { smf: SmfConfig::default(), dcf: Some(DcfConfig::default()), edfa: Some(EdfaConfig::default()) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepModeConfig {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepConfig {
    pub mode: StepModeConfig,
    /// Fixed step, or the step cap in adaptive mode.
    pub step_km: f64,
    pub max_nonlinear_phase: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        let s = StepControl::default();
        StepConfig { mode: StepModeConfig::Fixed, step_km: s.fixed_step_km, max_nonlinear_phase: s.max_nonlinear_phase }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElectricalFilterConfig {
    Bessel,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReceiverConfig {
    pub responsivity_a_per_w: f64,
    pub thermal_noise_pa_per_rthz: f64,
    pub dark_current_na: f64,
    /// `null` means 0.75 × bit rate.
    pub bandwidth_ghz: Option<f64>,
    pub filter: ElectricalFilterConfig,
    pub filter_order: u32,
    pub shot_noise: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        let r = ReceiverSpec::default();
        ReceiverConfig {
            responsivity_a_per_w: r.responsivity,
            thermal_noise_pa_per_rthz: r.thermal_noise_density * 1e12,
            dark_current_na: r.dark_current * 1e9,
            bandwidth_ghz: None,
            filter: ElectricalFilterConfig::Bessel,
            filter_order: 4,
            shot_noise: r.shot_noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemuxShapeConfig {
    Gaussian,
    SuperGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemuxConfig {
    pub shape: DemuxShapeConfig,
    /// Super-Gaussian order; ignored for the Gaussian shape.
    pub order: u32,
    pub fwhm_nm: f64,
    /// Filter-bank pitch; `null` follows the channel spacing.
    pub spacing_nm: Option<f64>,
    pub center_offset_nm: f64,
}

impl Default for DemuxConfig {
    fn default() -> Self {
        DemuxConfig {
            shape: DemuxShapeConfig::SuperGaussian,
            order: 2,
            fwhm_nm: 0.3,
            spacing_nm: None,
            center_offset_nm: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub spectrum: bool,
    pub spectrum_rbw_ghz: f64,
    pub eye: bool,
    /// Channels whose eye is written out; `null` means first and last.
    pub eye_channels: Option<Vec<usize>>,
    pub power_profile: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { spectrum: true, spectrum_rbw_ghz: 2.5, eye: true, eye_channels: None, power_profile: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path of a numeric field, e.g. `transmitter.power_dbm`.
    pub param: String,
    pub values: Vec<f64>,
}

/// Every physical object a scenario needs, validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub grid: SignalGrid,
    pub plan: ChannelPlan,
    pub transmitter: TransmitterSpec,
    pub span: Span,
    pub loops: usize,
    pub step: StepControl,
    pub receiver: ReceiverSpec,
    pub demux_filter: FilterSpec,
    /// m.
    pub demux_spacing: f64,
}

impl Resolved {
    pub fn link(&self) -> Link {
        Link::repeated(self.transmitter.pre_dcm_ps_nm, &self.span, self.loops)
    }
}

fn core_invalid(prefix: &str) -> impl Fn(dwdm_core::Error) -> ConfigError + '_ {
    move |e| match e {
        dwdm_core::Error::InvalidParameter { name, reason } => ConfigError::invalid(format!("{prefix}.{name}"), reason),
        other => ConfigError::invalid(prefix, other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(ConfigError::from_json)?;
        cfg.resolve()?;
        if let Some(sweep) = &cfg.sweep {
            cfg.with_sweep_value(&sweep.param, sweep.values.first().copied().unwrap_or(0.0))?;
            if sweep.values.len() < 2 {
                return Err(ConfigError::SweepValues(sweep.values.len()));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_json_str(&text)
    }

    /// Canonical JSON with all defaults filled in.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical form, so key order and omitted defaults do
    /// not change it.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Copy with one numeric field replaced, addressed by dotted path.
    pub fn with_sweep_value(&self, path: &str, value: f64) -> Result<Self, ConfigError> {
        let mut tree = serde_json::to_value(self).expect("config serializes");
        let mut node = &mut tree;
        for key in path.split('.') {
            node =
                node.as_object_mut().and_then(|m| m.get_mut(key)).ok_or_else(|| ConfigError::SweepPath(path.into()))?;
        }
        if !(node.is_number() || node.is_null()) {
            return Err(ConfigError::SweepPath(path.into()));
        }
        *node = if node.is_u64() || node.is_i64() {
            if value.fract() != 0.0 {
                return Err(ConfigError::invalid(path, "integer field swept with a fractional value"));
            }
            Value::from(value as i64)
        } else {
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| ConfigError::invalid(path, "value must be finite"))?
        };
        let cfg: ScenarioConfig =
            serde_json::from_value(tree).map_err(|e| ConfigError::invalid(path, e.to_string()))?;
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        if self.loops < 0 {
            return Err(ConfigError::invalid("loops", "must be zero or positive"));
        }
        let t = &self.transmitter;
        if !(t.bit_rate_gbps > 0.0) {
            return Err(ConfigError::invalid("transmitter.bit_rate_gbps", "must be positive"));
        }
        let c = &self.channels;
        let mut plan = ChannelPlan::new(c.count, c.first_wavelength_nm * 1e-9, c.spacing_nm * 1e-9)
            .map_err(core_invalid("channels"))?;
        plan.overrides = c
            .overrides
            .iter()
            .map(|o| ChannelOverride {
                channel: o.channel,
                laser_power_dbm: o.power_dbm,
                extinction_ratio_db: o.extinction_ratio_db,
                pre_dcm_ps_nm: o.pre_dcm_ps_nm,
                prbs_seed: o.prbs_seed,
            })
            .collect();
        plan.validate().map_err(core_invalid("channels.overrides"))?;

        let n_samples = self
            .grid
            .bits
            .checked_mul(self.grid.samples_per_bit)
            .ok_or_else(|| ConfigError::invalid("grid", "too large"))?;
        let grid = make_grid(n_samples, t.bit_rate_gbps * 1e9, self.grid.samples_per_bit, plan.center_wavelength())
            .map_err(|e| ConfigError::invalid("grid", e.to_string()))?;
        plan.aggregate_grid(&grid).map_err(|e| ConfigError::invalid("grid", e.to_string()))?;

        let span = Span {
            smf: self.span.smf.to_spec("SMF"),
            dcf: self.span.dcf.as_ref().map(|d| d.to_spec("DCF")),
            amplifier: self.span.edfa.as_ref().map(|e| AmplifierSpec {
                gain_db: e.gain_db,
                noise_figure_db: e.noise_figure_db,
                saturation_power_dbm: e.saturation_power_dbm,
                noiseless: e.noiseless,
            }),
        };
        span.smf.validate().map_err(core_invalid("span.smf"))?;
        if let Some(d) = &span.dcf {
            d.validate().map_err(core_invalid("span.dcf"))?;
        }
        if let Some(a) = &span.amplifier {
            a.validate().map_err(core_invalid("span.edfa"))?;
        }

        let transmitter = TransmitterSpec {
            bit_rate: t.bit_rate_gbps * 1e9,
            prbs_order: t.prbs_order,
            prbs_seed: t.prbs_seed,
            laser_power_dbm: t.power_dbm,
            laser_wavelength: plan.wavelength(0),
            extinction_ratio_db: t.extinction_ratio_db.unwrap_or(f64::INFINITY),
            rise_time: t.rise_time_ps * 1e-12,
            pre_dcm_ps_nm: t.pre_dcm_ps_nm.unwrap_or_else(|| {
                let residual = self.loops as f64 * span.residual_dispersion_ps_nm();
                if residual == 0.0 {
                    0.0
                } else {
                    -residual
                }
            }),
        };
        transmitter.validate().map_err(core_invalid("transmitter"))?;
        for k in 0..plan.n_channels {
            plan.transmitter_for(k, &transmitter)
                .and_then(|s| s.validate())
                .map_err(core_invalid("channels.overrides"))?;
        }

        let step = StepControl {
            mode: match self.step.mode {
                StepModeConfig::Fixed => StepMode::Fixed,
                StepModeConfig::Adaptive => StepMode::Adaptive,
            },
            fixed_step_km: self.step.step_km,
            max_nonlinear_phase: self.step.max_nonlinear_phase,
        };
        step.validate().map_err(core_invalid("step"))?;

        let r = &self.receiver;
        let receiver = ReceiverSpec {
            responsivity: r.responsivity_a_per_w,
            thermal_noise_density: r.thermal_noise_pa_per_rthz * 1e-12,
            dark_current: r.dark_current_na * 1e-9,
            electrical_bandwidth: r.bandwidth_ghz.map(|b| b * 1e9),
            electrical_filter: match r.filter {
                ElectricalFilterConfig::Bessel => ElectricalFilterKind::Bessel(r.filter_order),
                ElectricalFilterConfig::Gaussian => ElectricalFilterKind::Gaussian,
            },
            shot_noise: r.shot_noise,
        };
        receiver.validate().map_err(core_invalid("receiver"))?;
        let nyquist = 0.5 * grid.sample_rate();
        if receiver.bandwidth_for(&grid) >= nyquist {
            return Err(ConfigError::invalid("receiver.bandwidth_ghz", "must be below the grid Nyquist frequency"));
        }

        let d = &self.demux;
        let demux_filter = FilterSpec {
            shape: match d.shape {
                DemuxShapeConfig::Gaussian => FilterShape::Gaussian,
                DemuxShapeConfig::SuperGaussian => FilterShape::SuperGaussian(d.order),
            },
            fwhm: d.fwhm_nm * 1e-9,
            center_offset: d.center_offset_nm * 1e-9,
        };
        demux_filter.validate().map_err(core_invalid("demux"))?;
        let demux_spacing = d.spacing_nm.unwrap_or(c.spacing_nm) * 1e-9;
        if !(demux_spacing > 0.0) {
            return Err(ConfigError::invalid("demux.spacing_nm", "must be positive"));
        }

        let m = &self.metrics;
        if m.spectrum && !(m.spectrum_rbw_ghz * 1e9 >= grid.frequency_step()) {
            return Err(ConfigError::invalid("metrics.spectrum_rbw_ghz", "below the grid frequency resolution"));
        }
        if let Some(eyes) = &m.eye_channels {
            if let Some(&bad) = eyes.iter().find(|&&k| k >= c.count) {
                return Err(ConfigError::invalid("metrics.eye_channels", format!("channel {bad} does not exist")));
            }
        }
        if m.eye && self.grid.bits < 64 {
            return Err(ConfigError::invalid("grid.bits", "eye diagrams need at least 64 bits"));
        }

        Ok(Resolved {
            grid,
            plan,
            transmitter,
            span,
            loops: self.loops as usize,
            step,
            receiver,
            demux_filter,
            demux_spacing,
        })
    }

    pub fn eye_channels(&self) -> Vec<usize> {
        match &self.metrics.eye_channels {
            Some(list) => list.clone(),
            None if self.channels.count > 1 => vec![0, self.channels.count - 1],
            None => vec![0],
        }
    }
}

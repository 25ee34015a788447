use dwdm_core::metrics::{DispersionMapPoint, EyeData, QberResult, SpectrumPoint};

/// Outcome for one received channel. `qber` and `eye` are absent when
/// bit alignment failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub index: usize,
    pub wavelength_nm: f64,
    pub rx_power_dbm: f64,
    pub aligned: bool,
    pub qber: Option<QberResult>,
    pub eye_opening: Option<f64>,
    pub eye: Option<EyeData>,
    pub correlation: f64,
}

impl ChannelReport {
    pub fn q_db(&self) -> f64 {
        self.qber.map_or(f64::NAN, |q| q.q_db)
    }

    pub fn ber_estimated(&self) -> f64 {
        self.qber.map_or(f64::NAN, |q| q.ber_estimated)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSample {
    pub distance_km: f64,
    pub power_dbm: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub name: String,
    pub seed: u64,
    pub config_hash: String,
    pub link_length_km: f64,
    pub channels: Vec<ChannelReport>,
    pub dispersion_map: Vec<DispersionMapPoint>,
    pub tx_spectrum: Option<Vec<SpectrumPoint>>,
    pub rx_spectrum: Option<Vec<SpectrumPoint>>,
    pub power_profile: Vec<PowerSample>,
    pub wall_time_s: f64,
}

impl MetricsReport {
    pub fn all_aligned(&self) -> bool {
        self.channels.iter().all(|c| c.aligned)
    }

    /// Lowest Q over channels in dB; NaN if any channel failed alignment.
    pub fn worst_q_db(&self) -> f64 {
        if !self.all_aligned() {
            return f64::NAN;
        }
        self.channels.iter().map(ChannelReport::q_db).fold(f64::INFINITY, f64::min)
    }

    pub fn mean_q_db(&self) -> f64 {
        let q: Vec<f64> = self.channels.iter().filter(|c| c.aligned).map(ChannelReport::q_db).collect();
        q.iter().sum::<f64>() / q.len() as f64
    }

    pub fn worst_ber_estimated(&self) -> f64 {
        if !self.all_aligned() {
            return f64::NAN;
        }
        self.channels.iter().map(ChannelReport::ber_estimated).fold(0.0, f64::max)
    }

    pub fn min_eye_opening(&self) -> f64 {
        self.channels.iter().map(|c| c.eye_opening.unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min)
    }
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: String,
    pub rows: Vec<SweepRow>,
}

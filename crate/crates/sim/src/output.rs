//! CSV, SVG and PGM writers. Numbers use nine significant digits so reruns
//! reproduce files byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dwdm_core::metrics::{EyeData, SpectrumPoint, EYE_AMPLITUDE_BINS};
use serde_json::json;

use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::plot::{LinePlot, Series};
use crate::report::{MetricsReport, SweepTable};

const EYE_PIXEL_WIDTH: usize = 8;
const EYE_PIXEL_HEIGHT: usize = 4;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.8e}")
    }
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<PathBuf, SimError> {
    fs::write(&path, contents).map_err(SimError::io(&path))?;
    Ok(path)
}

pub fn metrics_csv(report: &MetricsReport) -> String {
    let mut s =
        String::from("channel_index,wavelength_nm,rx_power_dbm,q_db,ber_estimated,ber_counted,eye_opening,aligned\n");
    for c in &report.channels {
        let counted = c.qber.and_then(|q| q.ber_counted).map_or_else(|| "NA".to_string(), num);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            c.index,
            num(c.wavelength_nm),
            num(c.rx_power_dbm),
            num(c.q_db()),
            num(c.ber_estimated()),
            counted,
            num(c.eye_opening.unwrap_or(f64::NAN)),
            c.aligned
        );
    }
    s
}

pub fn dispersion_map_csv(report: &MetricsReport) -> String {
    let mut s = String::from("distance_km,cumulative_dispersion_ps_nm,element_label\n");
    for p in &report.dispersion_map {
        let _ = writeln!(s, "{},{},{}", num(p.distance_km), num(p.cumulative_dispersion_ps_nm), p.element_label);
    }
    s
}

fn psd_dbm_per_ghz(psd: f64) -> f64 {
    10.0 * (psd * 1e9 / 1e-3).log10()
}

pub fn spectrum_csv(points: &[SpectrumPoint]) -> String {
    let mut s = String::from("frequency_thz,psd_dbm_per_ghz\n");
    for p in points {
        let _ = writeln!(s, "{},{}", num(p.frequency / 1e12), num(psd_dbm_per_ghz(p.psd)));
    }
    s
}

pub fn power_profile_csv(report: &MetricsReport) -> String {
    let mut s = String::from("distance_km,power_dbm,element_label\n");
    for p in &report.power_profile {
        let _ = writeln!(s, "{},{},{}", num(p.distance_km), num(p.power_dbm), p.label);
    }
    s
}

pub fn eye_csv(eye: &EyeData) -> String {
    let (lo, hi) = eye.amplitude_range;
    let bin = (hi - lo) / EYE_AMPLITUDE_BINS as f64;
    let n_phase = eye.histogram.len();
    let mut s = String::from("time_bits,current_a,count\n");
    for (p, row) in eye.histogram.iter().enumerate() {
        for (a, &count) in row.iter().enumerate() {
            let t = 2.0 * p as f64 / n_phase as f64;
            let _ = writeln!(s, "{},{},{}", num(t), num(lo + (a as f64 + 0.5) * bin), count);
        }
    }
    s
}

/// Plain (ASCII) PGM, time across, current upwards, log-compressed counts.
pub fn eye_pgm(eye: &EyeData) -> String {
    let n_phase = eye.histogram.len();
    let width = n_phase * EYE_PIXEL_WIDTH;
    let height = EYE_AMPLITUDE_BINS * EYE_PIXEL_HEIGHT;
    let max = eye.histogram.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
    let mut s = format!("P2\n{width} {height}\n255\n");
    for row in 0..height {
        let a = EYE_AMPLITUDE_BINS - 1 - row / EYE_PIXEL_HEIGHT;
        let line: Vec<String> = (0..width)
            .map(|col| {
                let c = eye.histogram[col / EYE_PIXEL_WIDTH][a] as f64;
                ((255.0 * (1.0 + c).ln() / (1.0 + max).ln()).round() as u8).to_string()
            })
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

fn spectrum_plot(report: &MetricsReport) -> Option<LinePlot> {
    let mut series = Vec::new();
    for (label, points) in [("transmitted", &report.tx_spectrum), ("received", &report.rx_spectrum)] {
        if let Some(p) = points {
            series.push(Series {
                label: label.into(),
                points: p.iter().map(|p| (p.frequency / 1e12, psd_dbm_per_ghz(p.psd))).collect(),
            });
        }
    }
    (!series.is_empty()).then(|| LinePlot {
        title: "Optical spectrum".into(),
        x_label: "Frequency (THz)".into(),
        y_label: "PSD (dBm/GHz)".into(),
        log_y: false,
        series,
    })
}

pub fn dispersion_map_plot(report: &MetricsReport) -> LinePlot {
    LinePlot {
        title: "Cumulative dispersion".into(),
        x_label: "Distance (km)".into(),
        y_label: "Dispersion (ps/nm)".into(),
        log_y: false,
        series: vec![Series {
            label: "map".into(),
            points: report.dispersion_map.iter().map(|p| (p.distance_km, p.cumulative_dispersion_ps_nm)).collect(),
        }],
    }
}

fn run_metadata(cfg: &ScenarioConfig, report: &MetricsReport) -> String {
    let meta = json!({
        "name": report.name,
        "seed": report.seed,
        "config_hash": report.config_hash,
        "channels": report.channels.len(),
        "link_length_km": report.link_length_km,
        "wall_time_s": report.wall_time_s,
        "config": cfg,
    });
    serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n"
}

pub fn ensure_dir(dir: &Path) -> Result<(), SimError> {
    fs::create_dir_all(dir).map_err(SimError::io(dir))
}

/// Writes every artefact of a run into `dir` and returns the paths written.
pub fn emit_run(cfg: &ScenarioConfig, report: &MetricsReport, dir: &Path) -> Result<Vec<PathBuf>, SimError> {
    ensure_dir(dir)?;
    let mut written = vec![
        write(dir.join("metrics.csv"), metrics_csv(report))?,
        write(dir.join("dispersion_map.csv"), dispersion_map_csv(report))?,
        write(dir.join("dispersion_map.svg"), dispersion_map_plot(report).to_svg())?,
        write(dir.join("run.json"), run_metadata(cfg, report))?,
    ];
    if let Some(rx) = &report.rx_spectrum {
        written.push(write(dir.join("spectrum.csv"), spectrum_csv(rx))?);
    }
    if let Some(tx) = &report.tx_spectrum {
        written.push(write(dir.join("spectrum_tx.csv"), spectrum_csv(tx))?);
    }
    if let Some(plot) = spectrum_plot(report) {
        written.push(write(dir.join("spectrum.svg"), plot.to_svg())?);
    }
    if !report.power_profile.is_empty() {
        written.push(write(dir.join("power_profile.csv"), power_profile_csv(report))?);
        let plot = LinePlot {
            title: "Signal power along the link".into(),
            x_label: "Distance (km)".into(),
            y_label: "Power (dBm)".into(),
            log_y: false,
            series: vec![Series {
                label: "power".into(),
                points: report.power_profile.iter().map(|p| (p.distance_km, p.power_dbm)).collect(),
            }],
        };
        written.push(write(dir.join("power_profile.svg"), plot.to_svg())?);
    }
    for c in &report.channels {
        if let Some(eye) = &c.eye {
            written.push(write(dir.join(format!("eye_ch{:02}.pgm", c.index)), eye_pgm(eye))?);
            written.push(write(dir.join(format!("eye_ch{:02}.csv", c.index)), eye_csv(eye))?);
        }
    }
    Ok(written)
}

/// One row per swept value, summarised over channels.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut s =
        format!("{},worst_q_db,mean_q_db,worst_ber_estimated,min_eye_opening,aligned_channels,channels\n", table.param);
    for row in &table.rows {
        let r = &row.report;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(row.value),
            num(r.worst_q_db()),
            num(r.mean_q_db()),
            num(r.worst_ber_estimated()),
            num(r.min_eye_opening()),
            r.channels.iter().filter(|c| c.aligned).count(),
            r.channels.len()
        );
    }
    s
}

pub fn sweep_channels_csv(table: &SweepTable) -> String {
    let mut s =
        format!("{},channel_index,wavelength_nm,rx_power_dbm,q_db,ber_estimated,eye_opening,aligned\n", table.param);
    for row in &table.rows {
        for c in &row.report.channels {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                num(row.value),
                c.index,
                num(c.wavelength_nm),
                num(c.rx_power_dbm),
                num(c.q_db()),
                num(c.ber_estimated()),
                num(c.eye_opening.unwrap_or(f64::NAN)),
                c.aligned
            );
        }
    }
    s
}

pub fn emit_sweep(table: &SweepTable, dir: &Path) -> Result<Vec<PathBuf>, SimError> {
    ensure_dir(dir)?;
    let plot = LinePlot {
        title: format!("Worst-channel BER versus {}", table.param),
        x_label: table.param.clone(),
        y_label: "BER (estimated)".into(),
        log_y: true,
        series: vec![Series {
            label: "worst channel".into(),
            points: table.rows.iter().map(|r| (r.value, r.report.worst_ber_estimated())).collect(),
        }],
    };
    Ok(vec![
        write(dir.join("sweep.csv"), sweep_csv(table))?,
        write(dir.join("sweep_channels.csv"), sweep_channels_csv(table))?,
        write(dir.join("sweep.svg"), plot.to_svg())?,
    ])
}

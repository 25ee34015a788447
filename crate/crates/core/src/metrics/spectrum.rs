use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::fft::Fft;
use crate::field::OpticalField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    /// Absolute optical frequency, Hz.
    pub frequency: f64,
    /// W/Hz.
    pub psd: f64,
}

/// Welch estimate with a periodic Hann window and 75% overlap taken
/// cyclically over the record. The squared window overlaps to a constant at
/// that hop, so the integrated PSD equals the mean power exactly. The
/// segment length is the smallest power of two whose equivalent noise
/// bandwidth (1.5 bins) does not exceed `resolution_bandwidth`, capped at
/// the record length.
pub fn spectrum(field: &OpticalField, resolution_bandwidth: f64) -> Result<Vec<SpectrumPoint>> {
    let grid = field.grid();
    let n = grid.n_samples();
    let fs = grid.sample_rate();
    let bin = grid.frequency_step();
    if !(resolution_bandwidth >= bin * (1.0 - 1e-12)) {
        return Err(Error::ResolutionBandwidth { rbw: resolution_bandwidth, bin });
    }
    let wanted = (1.5 * fs / resolution_bandwidth).ceil() as usize;
    let len = wanted.next_power_of_two().clamp(4, n);
    let hop = len / 4;
    let window: Vec<f64> = (0..len)
        .map(|i| {
            let s = (core::f64::consts::PI * i as f64 / len as f64).sin();
            s * s
        })
        .collect();
    let w2: f64 = window.iter().map(|w| w * w).sum();
    let fft = Fft::new(len);
    let segments = n / hop;
    let samples = field.samples();
    let mut acc = alloc::vec![0.0; len];
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); len];
    for seg in 0..segments {
        let start = seg * hop;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = samples[(start + i) % n] * window[i];
        }
        fft.forward(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = 1.0 / (segments as f64 * fs * w2);
    let df = fs / len as f64;
    let f0 = grid.center_frequency();
    let mut out: Vec<SpectrumPoint> = (0..len)
        .map(|k| {
            let signed = if k < len / 2 { k as f64 } else { k as f64 - len as f64 };
            SpectrumPoint { frequency: f0 + signed * df, psd: acc[k] * scale }
        })
        .collect();
    out.rotate_left(len / 2);
    Ok(out)
}

/// Local maxima within `floor_db` of the strongest point, strongest first,
/// suppressing any peak closer than `min_separation` Hz to a stronger one.
pub fn find_peaks(points: &[SpectrumPoint], min_separation: f64, floor_db: f64) -> Vec<SpectrumPoint> {
    let max = points.iter().map(|p| p.psd).fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let floor = max * 10f64.powf(-floor_db / 10.0);
    let mut candidates: Vec<SpectrumPoint> = (0..points.len())
        .filter(|&i| {
            let p = points[i].psd;
            let left = if i > 0 { points[i - 1].psd } else { f64::NEG_INFINITY };
            let right = points.get(i + 1).map_or(f64::NEG_INFINITY, |q| q.psd);
            p >= floor && p >= left && p > right
        })
        .map(|i| points[i])
        .collect();
    candidates.sort_by(|a, b| b.psd.total_cmp(&a.psd));
    let mut peaks: Vec<SpectrumPoint> = Vec::new();
    for c in candidates {
        if peaks.iter().all(|p| (p.frequency - c.frequency).abs() >= min_separation) {
            peaks.push(c);
        }
    }
    peaks
}

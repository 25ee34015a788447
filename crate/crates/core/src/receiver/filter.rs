use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{ElectricalFilterKind, ElectricalWaveform, ReceiverSpec};
use crate::fft::Fft;
use crate::{Error, Result};

/// Bessel–Thomson low-pass normalised to a given 3 dB frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselLowpass {
    coeffs: Vec<f64>,
    /// Normalised angular frequency at which |H|² = 1/2.
    x3db: f64,
    bandwidth: f64,
}

impl BesselLowpass {
    pub fn new(order: u32, bandwidth: f64) -> Self {
        let n = order as usize;
        // Reverse Bessel polynomial: a_k = (2n − k)! / (2^(n−k) k! (n − k)!).
        let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
        let coeffs: Vec<f64> =
            (0..=n).map(|k| fact(2 * n - k) / (2f64.powi((n - k) as i32) * fact(k) * fact(n - k))).collect();
        let mut filter = BesselLowpass { coeffs, x3db: 1.0, bandwidth };
        let gain2 = |f: &BesselLowpass, x: f64| f.normalised(x).norm_sqr();
        let mut hi = 1.0;
        while gain2(&filter, hi) > 0.5 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gain2(&filter, mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        filter.x3db = 0.5 * (lo + hi);
        filter
    }

    fn normalised(&self, x: f64) -> Complex64 {
        let s = Complex64::new(0.0, x);
        let denom = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * s + a);
        Complex64::new(self.coeffs[0], 0.0) / denom
    }

    pub fn response(&self, f: f64) -> Complex64 {
        self.normalised(self.x3db * f / self.bandwidth)
    }
}

/// Transfer function of a configured electrical filter.
#[derive(Debug, Clone, PartialEq)]
pub enum ElectricalResponse {
    Bessel(BesselLowpass),
    Gaussian { bandwidth: f64 },
}

impl ElectricalResponse {
    pub fn new(kind: ElectricalFilterKind, bandwidth: f64) -> Self {
        match kind {
            ElectricalFilterKind::Bessel(n) => ElectricalResponse::Bessel(BesselLowpass::new(n, bandwidth)),
            ElectricalFilterKind::Gaussian => ElectricalResponse::Gaussian { bandwidth },
        }
    }

    pub fn at(&self, f: f64) -> Complex64 {
        match self {
            ElectricalResponse::Bessel(b) => b.response(f),
            ElectricalResponse::Gaussian { bandwidth } => {
                let x = f / bandwidth;
                Complex64::new((-0.5 * core::f64::consts::LN_2 * x * x).exp(), 0.0)
            }
        }
    }
}

/// Applies the receiver's low-pass in the frequency domain. DC gain is one.
pub fn electrical_filter(wave: &ElectricalWaveform, spec: &ReceiverSpec) -> Result<ElectricalWaveform> {
    spec.validate()?;
    let grid = *wave.grid();
    let bandwidth = spec.bandwidth_for(&grid);
    let nyquist = 0.5 * grid.sample_rate();
    if bandwidth >= nyquist {
        return Err(Error::ElectricalBandwidth { bandwidth, nyquist });
    }
    let response = ElectricalResponse::new(spec.electrical_filter, bandwidth);
    let n = grid.n_samples();
    let fft = Fft::new(n);
    let mut data: Vec<Complex64> = wave.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft.forward(&mut data);
    for (k, x) in data.iter_mut().enumerate() {
        *x *= response.at(grid.bin_frequency(k));
    }
    fft.inverse(&mut data);
    ElectricalWaveform::new(grid, data.into_iter().map(|c| c.re).collect())
}

//! Link analyzers: Q/BER estimation, eye diagrams, optical spectra, power
//! meter and the cumulative dispersion map.

mod eye;
mod map;
mod qber;
mod spectrum;

pub use eye::{eye_diagram, EyeData, EYE_AMPLITUDE_BINS};
pub use map::{dispersion_map, DispersionMapPoint};
pub use qber::{ber_from_q, q_and_ber, threshold_crossing, QberResult, MIN_COUNTED_ERRORS};
pub use spectrum::{find_peaks, spectrum, SpectrumPoint};

use num_traits::Float;

use crate::field::OpticalField;
use crate::units::watts_to_dbm;

/// Mean optical power in dBm; an all-zero field reads `-inf`.
pub fn power_meter(field: &OpticalField) -> f64 {
    watts_to_dbm(field.mean_power())
}

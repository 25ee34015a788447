//! Physical constants and the unit conversions the rest of the crate relies
//! on. Everything internal is SI; helpers convert the engineering units that
//! appear in link budgets (dBm, ps/nm, ps/(nm km)).

use num_traits::Float;

use crate::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C.
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// 1 ps/(nm km) expressed in s/m².
pub const PS_PER_NM_KM: f64 = 1e-6;
/// 1 ps/nm expressed in s/m.
pub const PS_PER_NM: f64 = 1e-3;
/// 1 ps/(nm² km) expressed in s/m³.
pub const PS_PER_NM2_KM: f64 = 1e3;
/// 1 ps²/km expressed in s²/m.
pub const PS2_PER_KM: f64 = 1e-27;

pub fn wavelength_to_frequency(wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid("wavelength", "must be positive"));
    }
    Ok(SPEED_OF_LIGHT / wavelength)
}

pub fn frequency_to_wavelength(frequency: f64) -> Result<f64> {
    if !(frequency > 0.0) {
        return Err(Error::invalid("frequency", "must be positive"));
    }
    Ok(SPEED_OF_LIGHT / frequency)
}

/// Frequency width of a small wavelength interval around `wavelength`
/// (first order, `c Δλ / λ²`).
pub fn wavelength_span_to_frequency(span: f64, wavelength: f64) -> f64 {
    SPEED_OF_LIGHT * span / (wavelength * wavelength)
}

/// Group-velocity dispersion β2 (s²/m) from the dispersion parameter D
/// (s/m²): `β2 = −D λ² / (2π c)`.
pub fn dispersion_to_beta2(dispersion: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid("wavelength", "must be positive"));
    }
    Ok(-dispersion * wavelength * wavelength / (2.0 * core::f64::consts::PI * SPEED_OF_LIGHT))
}

/// Third-order dispersion β3 (s³/m) from slope S (s/m³) and D (s/m²).
/// A zero slope maps to β3 = 0 so that every channel sees identical
/// dispersion.
pub fn slope_to_beta3(slope: f64, dispersion: f64, wavelength: f64) -> f64 {
    if slope == 0.0 {
        return 0.0;
    }
    let k = wavelength * wavelength / (2.0 * core::f64::consts::PI * SPEED_OF_LIGHT);
    (slope + 2.0 * dispersion / wavelength) * k * k
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10.0.powf(dbm / 10.0)
}

/// Zero power maps to `-inf`.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10.0.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn frequency_of_reference_wavelengths() {
        let f = wavelength_to_frequency(1550e-9).unwrap();
        assert!((f / 1e12 - 193.414).abs() < 1e-3);
        let f = wavelength_to_frequency(1543.6e-9).unwrap();
        assert!((f / 1e12 - 194.217).abs() < 1e-3);
        assert!(wavelength_to_frequency(0.0).is_err());
        assert!(wavelength_to_frequency(-1.0).is_err());
    }

    #[test]
    fn channel_spacing_is_fifty_gigahertz() {
        // c·Δλ/λ² = 49.913 GHz at 1550 nm; within 0.1% of the nominal 49.95 GHz.
        let df = wavelength_span_to_frequency(0.4e-9, 1550e-9);
        assert!((df / 1e9 - 49.913).abs() < 1e-3, "{df}");
        assert!((df / 49.95e9 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn beta2_of_smf_and_dcf() {
        let smf = dispersion_to_beta2(18.0 * PS_PER_NM_KM, 1550e-9).unwrap() / PS2_PER_KM;
        assert!((smf + 22.96).abs() < 0.01, "{smf}");
        let dcf = dispersion_to_beta2(-38.0 * PS_PER_NM_KM, 1550e-9).unwrap() / PS2_PER_KM;
        assert!((dcf - 48.47).abs() < 0.01, "{dcf}");
        assert_eq!(dispersion_to_beta2(0.0, 1550e-9).unwrap(), 0.0);
    }

    #[test]
    fn dbm_reference_points() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(-12.0) - 63.0957e-6).abs() < 1e-9);
        assert!((dbm_to_watts(-30.0) - 1e-6).abs() < 1e-18);
        assert_eq!(watts_to_dbm(0.0), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(p in -60.0f64..30.0) {
            let back = watts_to_dbm(dbm_to_watts(p));
            prop_assert!(((back - p) / p.abs().max(1e-3)).abs() < 1e-12 || (back - p).abs() < 1e-12);
        }

        #[test]
        fn beta2_is_linear_in_dispersion(
            d in -50.0f64..50.0,
            a in prop::sample::select(vec![-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0]),
        ) {
            let lambda = 1550e-9;
            let lhs = dispersion_to_beta2(a * (d * PS_PER_NM_KM), lambda).unwrap();
            let rhs = a * dispersion_to_beta2(d * PS_PER_NM_KM, lambda).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

//! Physical-layer building blocks for dense-WDM, NRZ-OOK, direct-detection
//! fiber links.
//!
//! The crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation: the sampling lattice, transmitters, the split-step fiber
//! solver, EDFA noise, WDM multiplexing, direct-detection receivers and the
//! analyzer suite. File formats, configuration and the CLI live in the
//! companion `dwdm-sim` crate.
#![no_std]
// `num_traits::Float` supplies libm-backed float methods. Whenever `std` is in
// the crate graph (tests, dev-dependency feature unification) the inherent
// methods shadow it and the import reads as unused.
#![allow(unused_imports)]
// `!(x > 0.0)` deliberately rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod fiber;
pub mod field;
pub mod grid;
pub mod metrics;
pub mod receiver;
pub mod rng;
pub mod transmitter;
pub mod units;
pub mod wdm;

pub use error::{Error, Result};
pub use field::OpticalField;
pub use grid::SignalGrid;
pub use num_complex::Complex64;
pub use rng::{Purpose, RngStream, StreamContext};

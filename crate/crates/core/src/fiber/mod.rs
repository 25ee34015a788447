//! Fiber propagation and the lumped elements of a dispersion-managed span.

mod amplifier;
mod span;
mod ssfm;

pub use amplifier::{amplify, ase_power_on_grid, ase_spectral_density, AmplifierSpec};
pub use span::{build_span, propagate_span, Link, LinkElement, PowerProbe, Span, SpanOutput};
pub use ssfm::{propagate_fiber, FiberSpec, StepControl, StepMode};

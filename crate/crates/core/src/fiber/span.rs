use alloc::string::String;
use alloc::vec::Vec;

use super::{amplify, propagate_fiber, AmplifierSpec, FiberSpec, StepControl};
use crate::field::OpticalField;
use crate::rng::RngStream;
use crate::Result;

/// One element of a link, in propagation order.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkElement {
    Fiber(FiberSpec),
    /// Lumped all-pass dispersion, ps/nm.
    Dcm {
        label: String,
        ps_nm: f64,
    },
    Amplifier {
        label: String,
        spec: AmplifierSpec,
    },
}

impl LinkElement {
    pub fn label(&self) -> &str {
        match self {
            LinkElement::Fiber(f) => &f.label,
            LinkElement::Dcm { label, .. } | LinkElement::Amplifier { label, .. } => label,
        }
    }

    pub fn length_km(&self) -> f64 {
        match self {
            LinkElement::Fiber(f) => f.length_km,
            _ => 0.0,
        }
    }

    pub fn cumulative_dispersion_ps_nm(&self) -> f64 {
        match self {
            LinkElement::Fiber(f) => f.cumulative_dispersion_ps_nm(),
            LinkElement::Dcm { ps_nm, .. } => *ps_nm,
            LinkElement::Amplifier { .. } => 0.0,
        }
    }
}

/// SMF, then optional inline DCF, then optional EDFA.
#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub smf: FiberSpec,
    pub dcf: Option<FiberSpec>,
    pub amplifier: Option<AmplifierSpec>,
}

pub fn build_span(smf: FiberSpec, dcf: FiberSpec, amplifier: AmplifierSpec) -> Result<Span> {
    let span = Span { smf, dcf: Some(dcf), amplifier: Some(amplifier) };
    span.validate()?;
    Ok(span)
}

impl Span {
    pub fn fiber_only(smf: FiberSpec) -> Self {
        Span { smf, dcf: None, amplifier: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.smf.validate()?;
        if let Some(dcf) = &self.dcf {
            dcf.validate()?;
        }
        if let Some(amp) = &self.amplifier {
            amp.validate()?;
        }
        Ok(())
    }

    pub fn length_km(&self) -> f64 {
        self.smf.length_km + self.dcf.as_ref().map_or(0.0, |d| d.length_km)
    }

    pub fn loss_db(&self) -> f64 {
        self.smf.loss_db() + self.dcf.as_ref().map_or(0.0, FiberSpec::loss_db)
    }

    /// `D_smf·L_smf + D_dcf·L_dcf`, ps/nm.
    pub fn residual_dispersion_ps_nm(&self) -> f64 {
        self.smf.cumulative_dispersion_ps_nm() + self.dcf.as_ref().map_or(0.0, FiberSpec::cumulative_dispersion_ps_nm)
    }

    pub fn elements(&self) -> Vec<LinkElement> {
        let mut out = alloc::vec![LinkElement::Fiber(self.smf.clone())];
        if let Some(dcf) = &self.dcf {
            out.push(LinkElement::Fiber(dcf.clone()));
        }
        if let Some(amp) = &self.amplifier {
            out.push(LinkElement::Amplifier { label: "EDFA".into(), spec: amp.clone() });
        }
        out
    }
}

/// Pre-compensation followed by a chain of spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub pre_dcm_ps_nm: f64,
    pub spans: Vec<Span>,
}

impl Link {
    pub fn repeated(pre_dcm_ps_nm: f64, span: &Span, loops: usize) -> Self {
        Link { pre_dcm_ps_nm, spans: alloc::vec![span.clone(); loops] }
    }

    pub fn elements(&self) -> Vec<LinkElement> {
        let mut out = alloc::vec![LinkElement::Dcm { label: "pre-DCM".into(), ps_nm: self.pre_dcm_ps_nm }];
        for span in &self.spans {
            out.extend(span.elements());
        }
        out
    }

    pub fn length_km(&self) -> f64 {
        self.spans.iter().map(Span::length_km).sum()
    }
}

/// Mean power after an element, measured from the start of its span.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProbe {
    pub distance_km: f64,
    pub power_w: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanOutput {
    pub field: OpticalField,
    pub probes: Vec<PowerProbe>,
}

/// Runs a field through one span; `amp_noise` feeds the EDFA.
pub fn propagate_span(
    field: &OpticalField,
    span: &Span,
    ctl: &StepControl,
    amp_noise: &RngStream,
) -> Result<SpanOutput> {
    span.validate()?;
    let mut probes = Vec::new();
    let mut current = propagate_fiber(field, &span.smf, ctl)?;
    let mut distance = span.smf.length_km;
    probes.push(PowerProbe { distance_km: distance, power_w: current.mean_power(), label: span.smf.label.clone() });
    if let Some(dcf) = &span.dcf {
        current = propagate_fiber(&current, dcf, ctl)?;
        distance += dcf.length_km;
        probes.push(PowerProbe { distance_km: distance, power_w: current.mean_power(), label: dcf.label.clone() });
    }
    if let Some(amp) = &span.amplifier {
        current = amplify(&current, amp, amp_noise)?;
        probes.push(PowerProbe { distance_km: distance, power_w: current.mean_power(), label: "EDFA".into() });
    }
    Ok(SpanOutput { field: current, probes })
}

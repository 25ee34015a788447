//! Executes scenarios: transmitters → mux → spans → demux → receivers → metrics.

use std::time::Instant;

use dwdm_core::fiber::propagate_span;
use dwdm_core::metrics::{dispersion_map, eye_diagram, power_meter, q_and_ber, spectrum};
use dwdm_core::receiver::{decide, electrical_filter, photodetect};
use dwdm_core::transmitter::{build_channel, ChannelSignal};
use dwdm_core::units::watts_to_dbm;
use dwdm_core::wdm::{demux, mux};
use dwdm_core::{OpticalField, Purpose, RngStream, StreamContext};
use rayon::prelude::*;

use crate::config::{Resolved, ScenarioConfig};
use crate::error::{ConfigError, SimError};
use crate::report::{ChannelReport, MetricsReport, PowerSample, SweepRow, SweepTable};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

fn with_pool<T: Send>(opts: &RunOptions, job: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads.unwrap_or(0)).build().expect("thread pool");
    pool.install(job)
}

pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<MetricsReport, SimError> {
    with_pool(opts, || run_inner(cfg, 0))
}

fn run_inner(cfg: &ScenarioConfig, scenario: u64) -> Result<MetricsReport, SimError> {
    let started = Instant::now();
    let r: Resolved = cfg.resolve()?;
    let plan = &r.plan;
    let agg_grid = plan.aggregate_grid(&r.grid).map_err(SimError::physics("aggregate grid"))?;

    let channels: Vec<ChannelSignal> = (0..plan.n_channels)
        .into_par_iter()
        .map(|k| {
            let spec = plan.transmitter_for(k, &r.transmitter)?;
            build_channel(&spec, &r.grid)
        })
        .collect::<Result<_, _>>()
        .map_err(SimError::physics("transmitter"))?;
    let fields: Vec<OpticalField> = channels.iter().map(|c| c.field.clone()).collect();
    let mut field = mux(&fields, plan, &agg_grid).map_err(SimError::physics("multiplexer"))?;
    drop(fields);

    let rbw = cfg.metrics.spectrum_rbw_ghz * 1e9;
    let tx_spectrum = if cfg.metrics.spectrum {
        Some(spectrum(&field, rbw).map_err(SimError::physics("transmit spectrum"))?)
    } else {
        None
    };

    let mut profile = vec![PowerSample { distance_km: 0.0, power_dbm: power_meter(&field), label: "launch".into() }];
    let span_length = r.span.length_km();
    for s in 0..r.loops {
        let start_km = s as f64 * span_length;
        if cfg.metrics.power_profile {
            push_fiber_profile(&mut profile, start_km, field.mean_power(), &r.span.smf);
        }
        let rng = RngStream::new(cfg.seed, StreamContext::new(scenario, 0, s as u32, Purpose::AmplifierNoise));
        let out =
            propagate_span(&field, &r.span, &r.step, &rng).map_err(SimError::physics(format!("span {}", s + 1)))?;
        field = out.field;
        for probe in out.probes {
            profile.push(PowerSample {
                distance_km: start_km + probe.distance_km,
                power_dbm: watts_to_dbm(probe.power_w),
                label: probe.label,
            });
        }
    }

    let rx_spectrum = if cfg.metrics.spectrum {
        Some(spectrum(&field, rbw).map_err(SimError::physics("receive spectrum"))?)
    } else {
        None
    };

    let eye_channels = cfg.eye_channels();
    let reports: Vec<ChannelReport> = channels
        .par_iter()
        .enumerate()
        .map(|(k, tx)| {
            let dropped = demux(&field, plan, k, &r.demux_filter, r.demux_spacing, &r.grid)
                .map_err(SimError::physics(format!("demultiplexer channel {k}")))?;
            let rng = RngStream::new(cfg.seed, StreamContext::new(scenario, k as u32, 0, Purpose::ReceiverNoise));
            let current = photodetect(&dropped, &r.receiver, &rng)
                .and_then(|i| electrical_filter(&i, &r.receiver))
                .map_err(SimError::physics(format!("receiver channel {k}")))?;
            let mut report = ChannelReport {
                index: k,
                wavelength_nm: plan.wavelength(k) * 1e9,
                rx_power_dbm: power_meter(&dropped),
                aligned: false,
                qber: None,
                eye_opening: None,
                eye: None,
                correlation: f64::NAN,
            };
            let spb = r.grid.samples_per_bit();
            let decision = match decide(&current, &tx.bits, spb) {
                Ok(d) => d,
                Err(dwdm_core::Error::Alignment(c)) => {
                    report.correlation = c;
                    return Ok(report);
                }
                Err(e) => return Err(SimError::Physics { context: format!("decision channel {k}"), source: e }),
            };
            report.aligned = true;
            report.correlation = decision.correlation;
            report.qber = Some(
                q_and_ber(&current, &tx.bits, &decision)
                    .map_err(SimError::physics(format!("Q estimate channel {k}")))?,
            );
            if tx.bits.len() >= 64 {
                let eye = eye_diagram(&current, &tx.bits, &decision)
                    .map_err(SimError::physics(format!("eye channel {k}")))?;
                report.eye_opening = Some(eye.eye_opening);
                if cfg.metrics.eye && eye_channels.contains(&k) {
                    report.eye = Some(eye);
                }
            }
            Ok(report)
        })
        .collect::<Result<_, SimError>>()?;

    let link = r.link();
    Ok(MetricsReport {
        name: cfg.name.clone(),
        seed: cfg.seed,
        config_hash: cfg.hash(),
        link_length_km: link.length_km(),
        channels: reports,
        dispersion_map: dispersion_map(&link.elements()),
        tx_spectrum,
        rx_spectrum,
        power_profile: if cfg.metrics.power_profile { profile } else { Vec::new() },
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Power inside the SMF follows the attenuation exactly; nonlinearity and
/// dispersion do not change the mean.
fn push_fiber_profile(profile: &mut Vec<PowerSample>, start_km: f64, power_w: f64, smf: &dwdm_core::fiber::FiberSpec) {
    let launch = watts_to_dbm(power_w);
    for km in 1..smf.length_km.ceil() as usize {
        profile.push(PowerSample {
            distance_km: start_km + km as f64,
            power_dbm: launch - smf.attenuation_db_per_km * km as f64,
            label: smf.label.clone(),
        });
    }
}

/// One run per value, in ascending value order, each with its own scenario
/// index in the seed derivation.
pub fn run_sweep(cfg: &ScenarioConfig, param: &str, values: &[f64], opts: &RunOptions) -> Result<SweepTable, SimError> {
    if values.len() < 2 {
        return Err(ConfigError::SweepValues(values.len()).into());
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let configs: Vec<ScenarioConfig> =
        sorted.iter().map(|&v| cfg.with_sweep_value(param, v)).collect::<Result<_, _>>()?;
    let rows = with_pool(opts, || {
        configs
            .iter()
            .zip(&sorted)
            .enumerate()
            .map(|(i, (c, &value))| Ok(SweepRow { value, report: run_inner(c, i as u64)? }))
            .collect::<Result<Vec<_>, SimError>>()
    })?;
    Ok(SweepTable { param: param.into(), rows })
}

/// Spread of Q across independent noise realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpread {
    /// `q_db[seed][channel]`.
    pub q_db: Vec<Vec<f64>>,
    /// Largest max − min over seeds, across channels.
    pub spread_db: f64,
}

/// Reruns the scenario with each master seed. The data pattern does not
/// depend on the master seed, so only noise changes between repeats.
pub fn q_uncertainty(cfg: &ScenarioConfig, seeds: &[u64], opts: &RunOptions) -> Result<QSpread, SimError> {
    if seeds.len() < 5 {
        return Err(ConfigError::invalid("seeds", "at least five repeats are needed").into());
    }
    let q_db: Vec<Vec<f64>> = seeds
        .iter()
        .map(|&seed| {
            let c = ScenarioConfig { seed, ..cfg.clone() };
            let report = run_scenario(&c, opts)?;
            Ok(report.channels.iter().map(ChannelReport::q_db).collect())
        })
        .collect::<Result<_, SimError>>()?;
    let n_ch = q_db[0].len();
    let spread_db = (0..n_ch)
        .map(|k| {
            let (lo, hi) = q_db
                .iter()
                .map(|row| row[k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| (lo.min(q), hi.max(q)));
            if lo == hi {
                0.0
            } else {
                hi - lo
            }
        })
        .fold(0.0, f64::max);
    Ok(QSpread { q_db, spread_db })
}

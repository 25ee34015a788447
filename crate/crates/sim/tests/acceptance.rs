//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dwdm_core::fiber::{propagate_fiber, FiberSpec, Link, StepControl};
use dwdm_core::grid::make_grid;
use dwdm_core::metrics::{ber_from_q, dispersion_map, find_peaks, q_and_ber, threshold_crossing};
use dwdm_core::receiver::{decide, DecisionResult, ElectricalWaveform, LevelStats};
use dwdm_core::transmitter::{build_channel, prbs_generate, BitSequence, TransmitterSpec};
use dwdm_core::{Complex64, OpticalField, Purpose, RngStream, StreamContext};
use dwdm_sim::output::metrics_csv;
use dwdm_sim::{output, q_uncertainty, run_scenario, run_sweep, MetricsReport, RunOptions, ScenarioConfig, SweepTable};

const C: f64 = 299_792_458.0;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

type Outcome = Result<Verdict, String>;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str) -> Result<ScenarioConfig, String> {
    ScenarioConfig::load(&shipped(name)).map_err(|e| format!("{name}: {e}"))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6
}

fn dispersion_ledger() -> Outcome {
    let cfg = load("paper-32ch.cfg")?;
    let resolved = cfg.resolve().map_err(|e| e.to_string())?;
    let bare = Link::repeated(0.0, &resolved.span, resolved.loops);
    let map = dispersion_map(&bare.elements());
    let at = |km: f64, label: &str| {
        map.iter().find(|p| close(p.distance_km, km) && p.element_label == label).map(|p| p.cumulative_dispersion_ps_nm)
    };
    let after_smf = at(39.0, "SMF").ok_or("no point at the first SMF end")?;
    let span_km = resolved.span.length_km();
    let residuals: Vec<f64> = (1..=resolved.loops)
        .map(|k| at(k as f64 * span_km, "DCF").ok_or("missing span end"))
        .collect::<Result<_, _>>()?;
    let per_span_ok = residuals.iter().enumerate().all(|(k, &d)| close(d, 21.8 * (k + 1) as f64));
    let total = *residuals.last().ok_or("no spans")?;
    let shipped_final =
        dispersion_map(&resolved.link().elements()).last().map(|p| p.cumulative_dispersion_ps_nm).ok_or("empty map")?;
    let pass = close(after_smf, 702.0) && per_span_ok && close(total, 392.4) && (-4.0..=0.6).contains(&shipped_final);
    Ok(Verdict::new(
        pass,
        format!(
            "first SMF {after_smf:+.4} ps/nm, per-span {:+.4}, 18 spans {total:+.4}, with pre-DCM {shipped_final:+.4}",
            residuals[0]
        ),
    ))
}

fn gaussian_pulse(t0: f64) -> Result<OpticalField, String> {
    let g = make_grid(2048, 40e9, 16, 1550e-9).map_err(|e| e.to_string())?;
    let n = g.n_samples();
    let dt = g.sample_interval();
    let samples = (0..n)
        .map(|i| {
            let t = (i as f64 - n as f64 / 2.0) * dt;
            Complex64::new((-t * t / (2.0 * t0 * t0)).exp() * 1e-2, 0.0)
        })
        .collect();
    OpticalField::new(g, samples).map_err(|e| e.to_string())
}

fn rms_width(field: &OpticalField) -> f64 {
    let dt = field.grid().sample_interval();
    let p: Vec<f64> = field.samples().iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = p.iter().sum();
    let mean = p.iter().enumerate().map(|(i, w)| i as f64 * dt * w).sum::<f64>() / total;
    let var = p.iter().enumerate().map(|(i, w)| (i as f64 * dt - mean).powi(2) * w).sum::<f64>() / total;
    var.sqrt()
}

fn analytic_dispersion() -> Outcome {
    let t0 = 10e-12;
    let input = gaussian_pulse(t0)?;
    let mut fiber = FiberSpec::smf(8.0);
    fiber.attenuation_db_per_km = 0.0;
    fiber.gamma_per_w_km = 0.0;
    let out = propagate_fiber(&input, &fiber, &StepControl::default()).map_err(|e| e.to_string())?;
    let lambda: f64 = 1550e-9;
    let beta2 = -18e-6 * lambda * lambda / (2.0 * PI * C);
    let z = 8e3;
    let expected = (1.0 + (beta2 * z / (t0 * t0)).powi(2)).sqrt();
    let measured = rms_width(&out) / rms_width(&input);
    let err = measured / expected - 1.0;
    Ok(Verdict::new(
        err.abs() < 5e-3,
        format!("broadening {measured:.5} vs analytic {expected:.5} ({:+.3}%)", 100.0 * err),
    ))
}

fn channel(n_bits: usize, power_dbm: f64) -> Result<OpticalField, String> {
    let grid = make_grid(n_bits * 16, 40e9, 16, 1550e-9).map_err(|e| e.to_string())?;
    let spec = TransmitterSpec { laser_power_dbm: power_dbm, laser_wavelength: 1550e-9, ..TransmitterSpec::default() };
    Ok(build_channel(&spec, &grid).map_err(|e| e.to_string())?.field)
}

fn conservation_and_convergence() -> Outcome {
    let run = |f: &OpticalField, fiber: &FiberSpec, ctl: &StepControl| {
        propagate_fiber(f, fiber, ctl).map_err(|e| e.to_string())
    };
    let signal = channel(1024, 0.0)?;
    let mut linear = FiberSpec::smf(80.0);
    linear.attenuation_db_per_km = 0.0;
    linear.gamma_per_w_km = 0.0;
    let out = run(&signal, &linear, &StepControl::default())?;
    let linear_err = (out.energy() / signal.energy() - 1.0).abs();

    let hot = channel(1024, 10.0)?;
    let mut nonlinear = FiberSpec::smf(40.0);
    nonlinear.attenuation_db_per_km = 0.0;
    let out = run(&hot, &nonlinear, &StepControl::default())?;
    let nonlinear_err = (out.energy() / hot.energy() - 1.0).abs();

    let launch = channel(1024, -12.0)?;
    let span = |ctl: &StepControl| -> Result<OpticalField, String> {
        let mid = run(&launch, &FiberSpec::smf(39.0), ctl)?;
        run(&mid, &FiberSpec::dcf(17.9), ctl)
    };
    let change = span(&StepControl::fixed(0.1))?.relative_rms_difference(&span(&StepControl::fixed(0.05))?);
    Ok(Verdict::new(
        linear_err < 1e-9 && nonlinear_err < 1e-6 && change < 1e-4,
        format!("linear {linear_err:.1e}, nonlinear {nonlinear_err:.1e}, step halving {change:.1e}"),
    ))
}

/// Two-level waveform whose sampled levels have exactly the requested Q.
fn two_level(q: f64, bits: &BitSequence, spb: usize) -> Result<ElectricalWaveform, String> {
    let grid = make_grid(bits.len() * spb, 40e9, spb, 1550e-9).map_err(|e| e.to_string())?;
    let mut src = RngStream::new(11, StreamContext::new(0, 0, 0, Purpose::Test)).source();
    let mut noise: Vec<f64> = (0..bits.len()).map(|_| src.gaussian()).collect();
    for level in [true, false] {
        let idx: Vec<usize> = (0..bits.len()).filter(|&i| bits.as_slice()[i] == level).collect();
        let n = idx.len() as f64;
        let mean = idx.iter().map(|&i| noise[i]).sum::<f64>() / n;
        let std = (idx.iter().map(|&i| (noise[i] - mean).powi(2)).sum::<f64>() / n).sqrt();
        for &i in &idx {
            noise[i] = (noise[i] - mean) / std;
        }
    }
    let (one, zero, sigma) = if q > 0.0 { (1.0, 0.0, 0.5 / q) } else { (0.5, 0.5, 0.1) };
    let samples = bits
        .as_slice()
        .iter()
        .zip(&noise)
        .flat_map(|(&b, &z)| std::iter::repeat_n(if b { one } else { zero } + sigma * z, spb))
        .collect();
    ElectricalWaveform::new(grid, samples).map_err(|e| e.to_string())
}

fn q_ber_law() -> Outcome {
    let spb = 8;
    let bits = prbs_generate(15, 1, 8192).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut pass = true;
    for (q, expected) in [(0.0, 0.5), (3.0, 1.35e-3), (6.0, 9.87e-10), (7.0, 1.28e-12)] {
        let wave = two_level(q, &bits, spb)?;
        let decision = if q > 0.0 {
            decide(&wave, &bits, spb).map_err(|e| e.to_string())?
        } else {
            // Equal levels carry no timing information; sample at the known alignment.
            DecisionResult {
                phase: spb / 2,
                bit_offset: 0,
                threshold: 0.5,
                decisions: bits.clone(),
                errors: 0,
                correlation: 0.0,
                stats: LevelStats {
                    mean_one: 0.5,
                    mean_zero: 0.5,
                    std_one: 0.1,
                    std_zero: 0.1,
                    n_ones: 0,
                    n_zeros: 0,
                    rail_gap: 0.0,
                },
            }
        };
        let result = q_and_ber(&wave, &bits, &decision).map_err(|e| e.to_string())?;
        let rel = result.ber_estimated / expected - 1.0;
        pass &= rel.abs() < 0.01 && (ber_from_q(q) / expected - 1.0).abs() < 0.01;
        lines.push(format!("Q={q}: {:.3e} ({:+.2}%)", result.ber_estimated, 100.0 * rel));
    }
    Ok(Verdict::new(pass, lines.join(", ")))
}

fn sweep_table(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<SweepTable, String> {
    let directive = cfg.sweep.clone().ok_or("config has no sweep directive")?;
    run_sweep(cfg, &directive.param, &directive.values, opts).map_err(|e| e.to_string())
}

fn worst_ber(report: &MetricsReport) -> f64 {
    if report.all_aligned() {
        report.worst_ber_estimated()
    } else {
        0.5
    }
}

fn calibration(name: &str, range: (f64, f64)) -> Outcome {
    let cfg = load(name)?;
    let table = sweep_table(&cfg, &RunOptions::default())?;
    let points: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.value, worst_ber(&r.report))).collect();
    match threshold_crossing(&points, 1e-9) {
        Some(x) => Ok(Verdict::new(
            (range.0..=range.1).contains(&x),
            format!("BER 1e-9 crossed at {x:.2} km (window {}–{} km)", range.0, range.1),
        )),
        None => Ok(Verdict::new(false, "BER never crosses 1e-9 in the swept range")),
    }
}

fn desk_run(threads: usize) -> Result<(ScenarioConfig, MetricsReport), String> {
    let cfg = load("desk-8ch.cfg")?;
    let report = run_scenario(&cfg, &RunOptions { threads: Some(threads) }).map_err(|e| e.to_string())?;
    Ok((cfg, report))
}

fn desk_scale(cfg: &ScenarioConfig, report: &MetricsReport) -> Outcome {
    let aligned = report.channels.iter().filter(|c| c.aligned).count();
    let worst = worst_ber(report);
    let resolved = cfg.resolve().map_err(|e| e.to_string())?;
    let spectrum = report.rx_spectrum.as_ref().ok_or("no received spectrum")?;
    let rbw = cfg.metrics.spectrum_rbw_ghz * 1e9;
    let mut peaks = find_peaks(spectrum, 25e9, 10.0);
    peaks.truncate(8);
    peaks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    let mut carriers: Vec<f64> = (0..resolved.plan.n_channels).map(|k| resolved.plan.frequency(k)).collect();
    carriers.sort_by(f64::total_cmp);
    let on_grid = peaks.len() == 8 && peaks.iter().zip(&carriers).all(|(p, f)| (p.frequency - f).abs() <= rbw);
    let spacings: Vec<f64> = peaks.windows(2).map(|w| w[1].frequency - w[0].frequency).collect();
    // Peak positions are quantized to the analyzer's bin spacing.
    let bin = spectrum.get(1).zip(spectrum.first()).map_or(0.0, |(b, a)| b.frequency - a.frequency);
    let spacing_ok = spacings.iter().all(|s| (s - 49.95e9).abs() <= 0.01 * 49.95e9 + bin);
    let (lo, hi) = spacings.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
    let qs: Vec<String> = report.channels.iter().map(|c| format!("{:.2}", c.q_db())).collect();
    Ok(Verdict::new(
        aligned == 8 && worst < 1e-9 && on_grid && spacing_ok,
        format!(
            "{aligned}/8 aligned, worst BER {worst:.2e} (Q dB: {}), {} peaks {} spaced {:.2}–{:.2} GHz",
            qs.join(" "),
            peaks.len(),
            if on_grid { "on the channel grid," } else { "off the channel grid," },
            lo / 1e9,
            hi / 1e9
        ),
    ))
}

fn worst_q(report: &MetricsReport) -> f64 {
    if report.all_aligned() {
        report.worst_q_db()
    } else {
        f64::NEG_INFINITY
    }
}

fn sweep_shapes() -> Outcome {
    let opts = RunOptions::default();
    let series = |name: &str| -> Result<Vec<(f64, f64)>, String> {
        let table = sweep_table(&load(name)?, &opts)?;
        Ok(table.rows.iter().map(|r| (r.value, worst_q(&r.report))).collect())
    };
    let argmax = |s: &[(f64, f64)]| s.iter().enumerate().fold(0, |best, (i, p)| if p.1 > s[best].1 { i } else { best });
    let fmt = |s: &[(f64, f64)]| s.iter().map(|(x, q)| format!("{x}:{q:.1}")).collect::<Vec<_>>().join(" ");

    // (a) rising to an optimum, then flat (< 0.5 dB further gain) or falling.
    let power = series("desk-8ch-sweep-power.cfg")?;
    let peak = argmax(&power);
    let rising = peak > 0 && power[..=peak].windows(2).all(|w| w[1].1 >= w[0].1);
    let flattens = peak == power.len() - 1 && power[peak].1 - power[peak - 1].1 < 0.5;
    let a = rising && (peak < power.len() - 1 || flattens);

    // (b) best filter bandwidth strictly inside the swept range.
    let fwhm = series("desk-8ch-sweep-demux-fwhm.cfg")?;
    let best = argmax(&fwhm);
    let b = best > 0 && best < fwhm.len() - 1;

    // (c) filter-bank spacing matched to the channel grid wins.
    let spacing = series("desk-8ch-sweep-demux-spacing.cfg")?;
    let c = close(spacing[argmax(&spacing)].0, 0.4);

    // (d) the highest gain is worse than the best gain.
    let gain = series("desk-8ch-sweep-gain.cfg")?;
    let top = gain.last().ok_or("empty gain sweep")?.1;
    let d = gain[argmax(&gain)].1 > top && argmax(&gain) < gain.len() - 1;

    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    Ok(Verdict::new(
        a && b && c && d,
        format!(
            "worst-channel Q dB | (a) {} [{}] | (b) {} [{}] | (c) {} [{}] | (d) {} [{}]",
            mark(a),
            fmt(&power),
            mark(b),
            fmt(&fwhm),
            mark(c),
            fmt(&spacing),
            mark(d),
            fmt(&gain)
        ),
    ))
}

fn q_uncertainty_check() -> Outcome {
    let cfg = load("back-to-back-noisy.cfg")?;
    if cfg.grid.bits < 8000 {
        return Ok(Verdict::new(false, "scenario carries fewer than 8000 bits"));
    }
    let seeds: Vec<u64> = (1..=8).collect();
    let spread = q_uncertainty(&cfg, &seeds, &RunOptions::default()).map_err(|e| e.to_string())?;
    let qs: Vec<f64> = spread.q_db.iter().map(|row| row[0]).collect();
    let mean = qs.iter().sum::<f64>() / qs.len() as f64;
    Ok(Verdict::new(
        spread.spread_db <= 0.5 && mean.is_finite(),
        format!("{} seeds × {} bits: Q {mean:.2} dB, spread {:.3} dB", seeds.len(), cfg.grid.bits, spread.spread_db),
    ))
}

fn determinism(cfg: &ScenarioConfig, many: &MetricsReport) -> Outcome {
    let (_, single) = desk_run(1)?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("threads-8"), dir.path().join("threads-1"));
    output::emit_run(cfg, many, &a).map_err(|e| e.to_string())?;
    output::emit_run(cfg, &single, &b).map_err(|e| e.to_string())?;
    let read = |p: PathBuf| std::fs::read(p.join("metrics.csv")).map_err(|e| e.to_string());
    let (x, y) = (read(a)?, read(b)?);
    Ok(Verdict::new(
        x == y && metrics_csv(many) == metrics_csv(&single),
        format!("metrics.csv {} bytes, --threads 8 vs 1 {}", x.len(), if x == y { "identical" } else { "differ" }),
    ))
}

fn report(id: &str, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(v) => (v.pass && elapsed <= limit, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let timing = if elapsed <= limit { String::new() } else { format!(" over the {:?} budget", limit) };
    println!(
        "criterion {id:>2} {} {title}: {detail} [{:.2} s{timing}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let mut results = vec![
        report("1", "dispersion ledger", s(1), dispersion_ledger),
        report("2", "analytic dispersion", s(60), analytic_dispersion),
        report("3", "conservation and convergence", s(60), conservation_and_convergence),
        report("4", "Q to BER law", s(1), q_ber_law),
        report("5", "dispersion-limit calibration", s(60), || calibration("dispersion-limit.cfg", (4.0, 12.0))),
        report("6", "loss-limit calibration", s(60), || calibration("loss-limit.cfg", (40.0, 75.0))),
    ];
    let mut desk = None;
    results.push(report("7", "desk-scale DWDM run", s(600), || {
        let (cfg, r) = desk.insert(desk_run(8)?);
        desk_scale(cfg, r)
    }));
    results.push(report("8", "sweep shapes", s(3600), sweep_shapes));
    results.push(report("9", "Q uncertainty", s(600), q_uncertainty_check));
    results.push(report("10", "determinism across thread counts", s(600), || match &desk {
        Some((cfg, r)) => determinism(cfg, r),
        None => Err("desk-scale run did not complete".into()),
    }));
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

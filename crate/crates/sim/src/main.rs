use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dwdm_core::metrics::dispersion_map;
use dwdm_sim::output;
use dwdm_sim::{run_scenario, run_sweep, ConfigError, MetricsReport, RunOptions, ScenarioConfig, SimError};

// Stdout writes ignore errors so a closed pipe does not abort the run.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "dwdm", version, about = "Dense-WDM fiber link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics, spectra, maps and eye diagrams.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario once per value of one numeric parameter.
    Sweep {
        config: PathBuf,
        /// Dotted config path; defaults to the file's sweep directive.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values; defaults to the file's sweep directive.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the cumulative dispersion map without propagating.
    Map {
        config: PathBuf,
        /// Also write dispersion_map.csv and .svg here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config, printing its hash.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct Common {
    /// Output directory [default: out/<scenario name>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for all noise streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Simulated bits per channel; bits × samples per bit must be a power of two.
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    samples_per_bit: Option<usize>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn apply(&self, mut cfg: ScenarioConfig) -> Result<ScenarioConfig, SimError> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(bits) = self.bits {
            cfg.grid.bits = bits;
        }
        if let Some(spb) = self.samples_per_bit {
            cfg.grid.samples_per_bit = spb;
        }
        cfg.resolve()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ScenarioConfig) -> PathBuf {
        self.out.clone().unwrap_or_else(|| Path::new("out").join(&cfg.name))
    }

    fn options(&self) -> RunOptions {
        RunOptions { threads: self.threads }
    }
}

fn print_report(report: &MetricsReport) {
    say!(
        "{} ({} channels, {:.1} km, seed {}, config {})",
        report.name,
        report.channels.len(),
        report.link_length_km,
        report.seed,
        report.config_hash
    );
    say!("{:>4} {:>12} {:>10} {:>8} {:>12} {:>8}", "ch", "lambda_nm", "rx_dBm", "Q_dB", "BER_est", "aligned");
    for c in &report.channels {
        say!(
            "{:>4} {:>12.3} {:>10.2} {:>8.2} {:>12.3e} {:>8}",
            c.index,
            c.wavelength_nm,
            c.rx_power_dbm,
            c.q_db(),
            c.ber_estimated(),
            c.aligned
        );
    }
    say!("wall time {:.2} s", report.wall_time_s);
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Run { config, common } => {
            let cfg = common.apply(ScenarioConfig::load(&config)?)?;
            let report = run_scenario(&cfg, &common.options())?;
            print_report(&report);
            let dir = common.out_dir(&cfg);
            output::emit_run(&cfg, &report, &dir)?;
            say!("outputs in {}", dir.display());
        }
        Command::Sweep { config, param, values, common } => {
            let cfg = common.apply(ScenarioConfig::load(&config)?)?;
            let directive = cfg.sweep.clone();
            let param = param.or_else(|| directive.as_ref().map(|d| d.param.clone()));
            let values = values.or_else(|| directive.as_ref().map(|d| d.values.clone()));
            let (Some(param), Some(values)) = (param, values) else {
                return Err(
                    ConfigError::invalid("sweep", "no --param/--values given and the config has no sweep").into()
                );
            };
            let table = run_sweep(&cfg, &param, &values, &common.options())?;
            say!("{:>14} {:>10} {:>14} {:>8}", param, "worst_Q_dB", "worst_BER", "aligned");
            for row in &table.rows {
                let r = &row.report;
                say!(
                    "{:>14} {:>10.2} {:>14.3e} {:>5}/{}",
                    row.value,
                    r.worst_q_db(),
                    r.worst_ber_estimated(),
                    r.channels.iter().filter(|c| c.aligned).count(),
                    r.channels.len()
                );
            }
            let dir = common.out_dir(&cfg);
            output::emit_sweep(&table, &dir)?;
            say!("outputs in {}", dir.display());
        }
        Command::Map { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let link = cfg.resolve()?.link();
            let points = dispersion_map(&link.elements());
            say!("{:>12} {:>16}  element", "distance_km", "dispersion_ps_nm");
            for w in points.windows(2) {
                // Element boundaries only: the last point of each element.
                if w[0].element_label != w[1].element_label || w[0].distance_km == w[1].distance_km {
                    say!(
                        "{:>12.3} {:>16.4}  {}",
                        w[0].distance_km,
                        w[0].cumulative_dispersion_ps_nm,
                        w[0].element_label
                    );
                }
            }
            if let Some(last) = points.last() {
                say!("{:>12.3} {:>16.4}  {}", last.distance_km, last.cumulative_dispersion_ps_nm, last.element_label);
            }
            if let Some(dir) = out {
                output::ensure_dir(&dir)?;
                let report = MetricsReport {
                    name: cfg.name.clone(),
                    seed: cfg.seed,
                    config_hash: cfg.hash(),
                    link_length_km: link.length_km(),
                    channels: Vec::new(),
                    dispersion_map: points,
                    tx_spectrum: None,
                    rx_spectrum: None,
                    power_profile: Vec::new(),
                    wall_time_s: 0.0,
                };
                let path = dir.join("dispersion_map.csv");
                std::fs::write(&path, output::dispersion_map_csv(&report))
                    .map_err(|source| SimError::Io { path: path.clone(), source })?;
                let svg = dir.join("dispersion_map.svg");
                std::fs::write(&svg, output::dispersion_map_plot(&report).to_svg())
                    .map_err(|source| SimError::Io { path: svg.clone(), source })?;
            }
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            say!("ok {} {}", cfg.name, cfg.hash());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

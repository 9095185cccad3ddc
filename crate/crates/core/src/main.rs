//! Command-line front end: config ingestion, subcommand orchestration, and
//! machine-readable emission of spectra, surfaces, and reports.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence, 4 failed oracle check.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use eomdet::config::{parse_config, ConfigError, OutputFormat, RunConfig, SweepQuantity};
use eomdet::detector;
use eomdet::oracle;
use eomdet::params::DerivedSystem;
use eomdet::pulse::{self, GaussianPulse, NoiseSetting};
use eomdet::sweep::{self, PulseSpec, WidthSpec};
use eomdet::Error;

#[derive(Parser)]
#[command(name = "eomdet", about = "Electro-opto-mechanical microwave photodetector simulator")]
struct Cli {
    /// Path to the run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive the operating point and print it as JSON.
    Derive,
    /// Emit input/output spectral densities as CSV.
    Spectrum,
    /// Convert one pulse and report photon numbers as JSON.
    Convert,
    /// Evaluate a figure-of-merit surface over the cooperativity grid.
    Sweep,
    /// Find the minimum matched cooperativity reaching a target efficiency.
    Match,
    /// Run the independent verification engines and report deviations.
    OracleCheck,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_ORACLE: u8 = 4;

enum CliError {
    Config(String),
    Numeric(String),
    OracleFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::OracleFailed => EXIT_ORACLE,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            // impossible requests are configuration problems, not
            // convergence failures
            Error::MissingParameter(_)
            | Error::NonPositiveParameter(_)
            | Error::NonPositiveFrequency
            | Error::OutOfRange(_, _)
            | Error::TargetUnreachable { .. } => CliError::Config(err.to_string()),
            _ => CliError::Numeric(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Config(msg) => eprintln!("error: {msg}"),
                CliError::Numeric(msg) => eprintln!("error: {msg}"),
                CliError::OracleFailed => eprintln!("error: oracle checks failed"),
            }
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;

    match cli.cmd {
        Cmd::Derive => cmd_derive(&cfg),
        Cmd::Spectrum => cmd_spectrum(&cfg),
        Cmd::Convert => cmd_convert(&cfg),
        Cmd::Sweep => cmd_sweep(&cfg),
        Cmd::Match => cmd_match(&cfg),
        Cmd::OracleCheck => cmd_oracle_check(&cfg),
    }
}

/// Optional thread-count override; absence means automatic.
fn init_thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("EOMDET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            CliError::Config(format!("EOMDET_THREADS must be a positive integer, got `{raw}`"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
    }

fn emit(cfg: &RunConfig, data: &str) -> Result<(), CliError> {
    match &cfg.path {
        Some(path) => fs::write(path, data)
            .map_err(|e| CliError::Config(format!("{path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .map_err(|e| CliError::Numeric(format!("stdout: {e}")))
        }
    }
}

fn build_pulse(cfg: &RunConfig, sys: &DerivedSystem) -> Result<GaussianPulse, CliError> {
    let (pulse, warning) = cfg.build_pulse(sys)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    Ok(pulse)
}

fn cmd_derive(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let json = serde_json::to_string_pretty(&sys).expect("derived system serializes");
    emit(cfg, &format!("{json}\n"))
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let omega_m = sys
        .omega_m
        .ok_or(CliError::Config("spectrum axis needs omega_M; set [mechanics] omega_M".into()))?;
    let pulse = build_pulse(cfg, &sys)?;
    let with_noise = matches!(cfg.noise_setting(&sys), NoiseSetting::Band { .. });

    let points = cfg.spectrum_points.unwrap_or(1001).max(2);
    let span = cfg.spectrum_span_rel.unwrap_or(5.0) * sys.w_c;
    // cover the pulse even when it sits outside the converter band
    let lo = (-span).min(pulse.carrier_offset - 8.0 * pulse.width);
    let hi = span.max(pulse.carrier_offset + 8.0 * pulse.width);

    let mut out = String::new();
    out.push_str("omega_over_omega_M,input_photons_per_rad_s,output_photons_per_rad_s\n");
    for k in 0..points {
        let omega = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let input = pulse::input_spectrum(&pulse, omega);
        let output = if with_noise {
            pulse::output_spectrum(&sys, &pulse, omega)
        } else {
            pulse::signal_spectrum(&sys, &pulse, omega)
        };
        out.push_str(&format!("{:e},{:e},{:e}\n", omega / omega_m, input, output));
    }
    emit(cfg, &out)
}

#[derive(Serialize)]
struct ConvertReport {
    /// Mean output optical photon number per pulse.
    #[serde(rename = "N_o")]
    n_o: f64,
    /// Output photons per input photon (0 by convention for an empty pulse).
    ratio: f64,
    /// Effective quantum efficiency `eta |B(0)|^2`.
    eta_eff: f64,
    /// Point-value thermal count floor.
    thermal_counts: f64,
}

fn cmd_convert(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let pulse = build_pulse(cfg, &sys)?;
    let det = cfg.build_detector()?;
    let noise = cfg.noise_setting(&sys);

    let n_o = pulse::converted_photons(&sys, &pulse, noise)?;
    let report = ConvertReport {
        n_o,
        ratio: if pulse.n_p == 0.0 { 0.0 } else { n_o / pulse.n_p },
        eta_eff: detector::eta_eff(&sys, &det),
        thermal_counts: detector::thermal_counts(&sys),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(cfg, &format!("{json}\n"))
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let grid = cfg.build_grid()?;
    let quantity = cfg.quantity.unwrap_or(SweepQuantity::Efficiency);
    let surface = match quantity {
        SweepQuantity::Efficiency => {
            let det = cfg.build_detector()?;
            sweep::efficiency_surface(&sys, &det, &grid)?
        }
        SweepQuantity::Ratio => {
            let n_p = cfg.n_p.ok_or(CliError::Config("ratio sweep needs [pulse] n_p".into()))?;
            let width = match (cfg.pulse_width_rel, cfg.pulse_width) {
                (Some(rel), _) => WidthSpec::RelativeToBandwidth(rel),
                (None, Some(w)) => WidthSpec::Absolute(w),
                (None, None) => return Err(CliError::Config("ratio sweep needs [pulse] W or W_rel".into())),
            };
            let spec = PulseSpec {
                n_p,
                width,
                carrier_offset: cfg.carrier_offset.unwrap_or(0.0),
            };
            sweep::ratio_surface(&sys, &spec, cfg.noise_setting(&sys), &grid)?
        }
    };

    let data = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => {
            let json = serde_json::to_string_pretty(&surface).expect("surface serializes");
            format!("{json}\n")
        }
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!("Gamma_w,Gamma_o,{}\n", surface.quantity));
            for (i_w, gw) in surface.gamma_w_axis.iter().enumerate() {
                for (i_o, go) in surface.gamma_o_axis.iter().enumerate() {
                    out.push_str(&format!("{:e},{:e},{:e}\n", gw, go, surface.value(i_w, i_o)));
                }
            }
            out
        }
    };
    emit(cfg, &data)
}

#[derive(Serialize)]
struct MatchReport {
    target_eff: f64,
    /// Minimum matched cooperativity `Gamma_w = Gamma_o` reaching the target.
    #[serde(rename = "Gamma")]
    gamma: f64,
    /// Efficiency actually attained there.
    eta_eff: f64,
}

fn cmd_match(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let det = cfg.build_detector()?;
    let target = cfg
        .target_eff
        .ok_or(CliError::Config("match needs [detector] target_eff".into()))?;
    let gamma = sweep::find_min_cooperativity(target, &det, &sys)?;
    let report = MatchReport {
        target_eff: target,
        gamma,
        eta_eff: detector::eta_eff(&sys.with_cooperativities(gamma, gamma), &det),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(cfg, &format!("{json}\n"))
}

fn cmd_oracle_check(cfg: &RunConfig) -> Result<(), CliError> {
    let sys = cfg.build_system()?;
    let report = oracle::run_report(&sys)?;
    let mut out = String::new();
    for check in &report.checks {
        out.push_str(&format!(
            "{}: {} (max deviation {:e}, tolerance {:e})\n",
            check.name,
            if check.pass { "pass" } else { "FAIL" },
            check.max_deviation,
            check.tolerance,
        ));
    }
    emit(cfg, &out)?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(CliError::OracleFailed)
    }
}

//! Experiment runner for the wideband THz precoding simulations.
//!
//! Exit codes: 0 success, 2 bad arguments or configuration, 3 runtime
//! failure.

mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beamsplit_core::SystemConfig;
use config::{apply_config_file, Preset};
use experiments::{RunError, RunSpec};

#[derive(Parser)]
#[command(
    name = "beamsplit",
    version,
    about = "Beam split analysis and delay-phase precoding experiments",
    long_about = "Runs the simulation experiments and writes their results as CSV tables \
                  (with `#` comment headers) plus optional gnuplot scripts. \
                  Defaults follow the THz reference scenario."
)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Array gain vs direction at the band-edge and central frequencies
    BeamPattern(CommonArgs),
    /// Array gain at the target direction vs subcarrier index
    GainProfile(CommonArgs),
    /// Beam split ratio of the named presets
    Bsr(CommonArgs),
    /// Mean achievable rate vs SNR per scheme, with the analytic bound
    RateSweep(CommonArgs),
    /// Mean rate vs TD elements per RF chain
    KSweep(CommonArgs),
    /// Energy efficiency vs RF-chain count per hardware scheme
    EnergySweep(CommonArgs),
}

impl Experiment {
    fn name(&self) -> &'static str {
        match self {
            Experiment::BeamPattern(_) => "beam-pattern",
            Experiment::GainProfile(_) => "gain-profile",
            Experiment::Bsr(_) => "bsr",
            Experiment::RateSweep(_) => "rate-sweep",
            Experiment::KSweep(_) => "k-sweep",
            Experiment::EnergySweep(_) => "energy-sweep",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Experiment::BeamPattern(a)
            | Experiment::GainProfile(a)
            | Experiment::Bsr(a)
            | Experiment::RateSweep(a)
            | Experiment::KSweep(a)
            | Experiment::EnergySweep(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Parameter preset to start from (default: thz)
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Flat `key = value` config file, applied on top of the preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials for rate experiments
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Transmit SNR override in dB (fixes rate-sweep to a single point)
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    /// Target physical direction (a sine, in [-1, 1])
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    theta: f64,
    /// TD elements per RF chain (fixes k-sweep to a single value)
    #[arg(long)]
    k: Option<usize>,
    /// Restrict beam experiments to these schemes (classical, dpp)
    #[arg(long)]
    scheme: Vec<String>,
    /// Also write a gnuplot script next to the CSV (requires --out)
    #[arg(long)]
    emit_plot: bool,
}

fn build_spec(args: &CommonArgs) -> Result<RunSpec, RunError> {
    let mut cfg = args
        .preset
        .map(Preset::config)
        .unwrap_or_else(SystemConfig::thz);
    if let Some(path) = &args.config {
        apply_config_file(&mut cfg, path).map_err(RunError::Usage)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(snr_db) = args.snr_db {
        cfg.snr_db = snr_db;
    }
    if let Some(k) = args.k {
        cfg.k_td = k;
    }
    cfg.validate()
        .map_err(|e| RunError::Usage(e.to_string()))?;
    if args.trials == 0 {
        return Err(RunError::Usage("--trials must be at least 1".into()));
    }
    if args.emit_plot && args.out.is_none() {
        return Err(RunError::Usage(
            "--emit-plot needs --out to know where the CSV lives".into(),
        ));
    }
    Ok(RunSpec {
        cfg,
        preset_name: args.preset.map(Preset::name),
        trials: args.trials,
        theta: args.theta,
        snr_db: args.snr_db,
        k: args.k,
        schemes: args.scheme.clone(),
    })
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let args = cli.experiment.args();
    let spec = build_spec(args)?;
    let report = match &cli.experiment {
        Experiment::BeamPattern(_) => experiments::beam_pattern(&spec)?,
        Experiment::GainProfile(_) => experiments::gain_profile(&spec)?,
        Experiment::Bsr(_) => experiments::bsr(&spec)?,
        Experiment::RateSweep(_) => experiments::rate_sweep(&spec)?,
        Experiment::KSweep(_) => experiments::k_sweep(&spec)?,
        Experiment::EnergySweep(_) => experiments::energy_sweep(&spec)?,
    };
    let csv = report.to_csv();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| {
                RunError::Runtime(format!("cannot write {}: {e}", path.display()))
            })?;
            if args.emit_plot {
                let script = experiments::plot_script(
                    cli.experiment.name(),
                    &path
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "results.csv".into()),
                );
                let gp = path.with_extension("gp");
                std::fs::write(&gp, script).map_err(|e| {
                    RunError::Runtime(format!("cannot write {}: {e}", gp.display()))
                })?;
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

//! `cvcx` — command-line harness for the controlled-X gate simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cvcx::{EngineChoice, ExperimentConfig, Gains};
use cvcx_cli::commands;
use cvcx_cli::config::parse_config_file;

#[derive(Parser)]
#[command(
    name = "cvcx",
    version,
    about = "Measurement-based continuous-variable controlled-X gate simulator",
    long_about = "Simulates a controlled-X (sum) gate built from a linear four-mode cluster \
                  state, homodyne detection, and classical feed-forward. Reports output \
                  variances vs the shot-noise limit, fidelities against the ideal gate, and a \
                  two-mode inseparability witness."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster squeezed-correlation (nullifier) variances at a given r
    Nullifiers {
        /// Squeezing parameter (>= 0)
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.35)]
        r: f64,
        /// Write a machine-readable CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a structured report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the full gate and report the output pair
    Gate(GateArgs),
    /// Drive one input quadrature at a time and show the transfer map
    Modulation {
        /// Squeezing parameter (>= 0)
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.35)]
        r: f64,
        /// Scalar feed-forward gain
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        gain: f64,
        /// Drive power above the SNL, in dB (>= 0)
        #[arg(long, allow_negative_numbers = true, default_value_t = 12.0)]
        power_db: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Output fidelities against the ideal gate at a given r
    Fidelity {
        /// Squeezing parameter (>= 0)
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.35)]
        r: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sweep r and emit per-point variances, fidelities, and the witness
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        r_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        r_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        /// CSV output path (default: cvcx-sweep.csv)
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Monte Carlo cross-check of the exact engines
    Mc(McArgs),
    /// Run the acceptance suite and print one line per criterion
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Covariance,
    Heisenberg,
    Both,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Covariance => EngineChoice::Covariance,
            EngineArg::Heisenberg => EngineChoice::Heisenberg,
            EngineArg::Both => EngineChoice::Both,
        }
    }
}

#[derive(Args)]
struct CommonConfigArgs {
    /// Config file (key = value lines); flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Squeezing parameter (>= 0)
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Scalar feed-forward gain applied to all four channels
    #[arg(long, allow_negative_numbers = true)]
    gain: Option<f64>,
    /// Per-channel gain overrides
    #[arg(long, allow_negative_numbers = true)]
    gain_xt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gain_yt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gain_xc: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gain_yc: Option<f64>,
    /// Replace the cluster submodes with vacuum (classical baseline)
    #[arg(long)]
    no_cluster: bool,
    /// Input coherent amplitudes, quadrature units
    #[arg(long, allow_negative_numbers = true)]
    mean_xt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mean_yt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mean_xc: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mean_yc: Option<f64>,
    /// Exact engine selection
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
}

impl CommonConfigArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            parse_config_file(path)?.apply_to(&mut config);
        }
        if let Some(r) = self.r {
            config.r = r;
        }
        if let Some(g) = self.gain {
            config.gains = Gains::uniform(g);
        }
        if let Some(g) = self.gain_xt {
            config.gains.xt = g;
        }
        if let Some(g) = self.gain_yt {
            config.gains.yt = g;
        }
        if let Some(g) = self.gain_xc {
            config.gains.xc = g;
        }
        if let Some(g) = self.gain_yc {
            config.gains.yc = g;
        }
        if self.no_cluster {
            config.use_cluster = false;
        }
        if let Some(v) = self.mean_xt {
            config.input_means.xt = v;
        }
        if let Some(v) = self.mean_yt {
            config.input_means.yt = v;
        }
        if let Some(v) = self.mean_xc {
            config.input_means.xc = v;
        }
        if let Some(v) = self.mean_yc {
            config.input_means.yc = v;
        }
        if let Some(e) = self.engine {
            config.engine = e.into();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct GateArgs {
    #[command(flatten)]
    common: CommonConfigArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonConfigArgs,
    /// Sample count (>= 10000 for a meaningful cross-check)
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance in standard errors
    #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
    sigma: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Nullifiers { r, csv, report } => commands::cmd_nullifiers(r, csv, report),
        Command::Gate(args) => {
            let config = args.common.resolve()?;
            commands::cmd_gate(config, args.csv, args.report)
        }
        Command::Modulation {
            r,
            gain,
            power_db,
            csv,
            report,
        } => commands::cmd_modulation(r, gain, power_db, csv, report),
        Command::Fidelity { r, report } => commands::cmd_fidelity(r, report),
        Command::Sweep {
            r_min,
            r_max,
            step,
            csv,
            report,
        } => commands::cmd_sweep(r_min, r_max, step, csv, report),
        Command::Mc(args) => {
            let config = args.common.resolve()?;
            // precedence: flags, then config-file mc settings, then defaults
            let samples = args
                .samples
                .or(config.mc.map(|m| m.samples))
                .unwrap_or(1_000_000);
            let seed = args.seed.or(config.mc.map(|m| m.seed)).unwrap_or(1);
            commands::cmd_mc(config, samples, seed, args.sigma, args.csv, args.report)
        }
        Command::Selftest => commands::cmd_selftest(),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

//! Command-line runner: one subcommand per scenario kind, plus a batch mode
//! for scenario documents.

use clap::{Args, Parser, Subcommand};
use qkdsec::error::{Error, Result};
use qkdsec::report::{MetricReport, ReportFormat};
use qkdsec::scenario::{self, Kind, Scenario, ScenarioFile};
use qkdsec::tol::Tolerances;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qkdsec",
    about = "Security numerics for quantum key distribution: distances, guessing bounds, couplings, and risk arithmetic",
    version
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Report encoding.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    /// Seed for any randomized sub-procedure.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest dense operator dimension.
    #[arg(long, global = true, default_value_t = 4096)]
    dim_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario document or a batch of them.
    Run {
        /// Path to the scenario document (JSON, schema "v1").
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Distance decomposition, lower bound, chain check, and sigma scan for
    /// a state document.
    Metrics(ParamsArg),
    /// Maximal versus independent coupling, with an optional one-time-pad
    /// check.
    Coupling(CouplingArgs),
    /// Optimal binary discrimination of two states.
    Helstrom(ParamsArg),
    /// Guessing bound and best guessing value for a state document.
    Guess(ParamsArg),
    /// Toy intercept-resend protocol pipeline.
    Bb84(Bb84Args),
    /// Leak-rate estimate and exponent comparisons.
    Risk(RiskArgs),
    /// Markov cascade and tail demonstration.
    Averaging(AveragingArgs),
}

#[derive(Args)]
struct ParamsArg {
    /// Kind-specific parameters as a JSON file.
    #[arg(long)]
    params: PathBuf,
}

#[derive(Args)]
struct CouplingArgs {
    /// First marginal, comma-separated probabilities.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Second marginal; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    u: Option<Vec<f64>>,
    /// Key distribution for the one-time-pad check.
    #[arg(long, value_delimiter = ',', requires = "otp_plaintext")]
    otp_key: Option<Vec<f64>>,
    /// Plaintext distribution for the one-time-pad check.
    #[arg(long, value_delimiter = ',', requires = "otp_key")]
    otp_plaintext: Option<Vec<f64>>,
}

#[derive(Args)]
struct Bb84Args {
    #[arg(long)]
    rounds: u32,
    #[arg(long)]
    intercept_prob: f64,
    #[arg(long, default_value_t = true)]
    sift: bool,
    /// "none" or "parity".
    #[arg(long, default_value = "none")]
    pa_mode: String,
}

#[derive(Args)]
struct RiskArgs {
    #[arg(long)]
    key_rate_bits_per_sec: f64,
    #[arg(long)]
    key_len_bits: u64,
    #[arg(long)]
    duration_sec: f64,
    /// Secrecy parameter as a linear probability.
    #[arg(long, conflicts_with = "epsilon_sec_log2")]
    epsilon_sec: Option<f64>,
    /// Secrecy parameter as a base-2 exponent.
    #[arg(long, allow_negative_numbers = true)]
    epsilon_sec_log2: Option<f64>,
    #[arg(long, requires = "fleet")]
    fatalities: Option<u64>,
    #[arg(long, requires = "fatalities")]
    fleet: Option<u64>,
}

#[derive(Args)]
struct AveragingArgs {
    #[arg(long)]
    avg_bound: f64,
    #[arg(long)]
    layers: u32,
    #[arg(long, value_delimiter = ',', requires = "tail_threshold")]
    tail_samples: Option<Vec<f64>>,
    #[arg(long, requires = "tail_samples")]
    tail_threshold: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qkdsec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let tol = Tolerances::default().with_dim_cap(cli.dim_cap);
    let format: ReportFormat = cli.format.parse()?;

    if let Command::Run { scenario } = &cli.command {
        let text = std::fs::read_to_string(scenario)?;
        let scenarios = ScenarioFile::parse(&text)?;
        let reports = scenario::run_all(&scenarios, &tol)?;
        // Scenarios without their own output go to the global destination.
        for (s, report) in scenarios.iter().zip(&reports) {
            if s.output.is_none() {
                write_report(cli, report, format)?;
            }
        }
        return Ok(());
    }

    let (kind, params) = match &cli.command {
        Command::Run { .. } => unreachable!("handled above"),
        Command::Metrics(a) => (Kind::Metrics, read_params(&a.params)?),
        Command::Helstrom(a) => (Kind::Helstrom, read_params(&a.params)?),
        Command::Guess(a) => (Kind::Guess, read_params(&a.params)?),
        Command::Coupling(a) => {
            let mut params = json!({ "p": a.p });
            if let Some(u) = &a.u {
                params["u"] = json!(u);
            }
            if let (Some(key), Some(plaintext)) = (&a.otp_key, &a.otp_plaintext) {
                params["otp"] = json!({ "key": key, "plaintext": plaintext });
            }
            (Kind::Coupling, params)
        }
        Command::Bb84(a) => (
            Kind::Bb84,
            json!({
                "rounds": a.rounds,
                "intercept_prob": a.intercept_prob,
                "sift": a.sift,
                "pa_mode": a.pa_mode,
            }),
        ),
        Command::Risk(a) => {
            let mut params = json!({
                "key_rate_bits_per_sec": a.key_rate_bits_per_sec,
                "key_len_bits": a.key_len_bits,
                "duration_sec": a.duration_sec,
            });
            if let Some(eps) = a.epsilon_sec {
                params["epsilon_sec"] = json!(eps);
            }
            if let Some(log2) = a.epsilon_sec_log2 {
                params["epsilon_sec_log2"] = json!(log2);
            }
            if let (Some(fatalities), Some(fleet)) = (a.fatalities, a.fleet) {
                params["fatalities"] = json!(fatalities);
                params["fleet"] = json!(fleet);
            }
            (Kind::Risk, params)
        }
        Command::Averaging(a) => {
            let mut params = json!({ "avg_bound": a.avg_bound, "layers": a.layers });
            if let (Some(samples), Some(threshold)) = (&a.tail_samples, a.tail_threshold) {
                params["tail_samples"] = json!(samples);
                params["tail_threshold"] = json!(threshold);
            }
            (Kind::Averaging, params)
        }
    };

    let scenario = Scenario {
        v: scenario::SCHEMA_VERSION.to_string(),
        kind,
        seed: cli.seed,
        output: None,
        params,
    };
    let report = scenario::run_scenario(&scenario, &tol)?;
    write_report(cli, &report, format)
}

fn read_params(path: &PathBuf) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::validation(format!("parameter file does not parse: {e}")))
}

fn write_report(cli: &Cli, report: &MetricReport, format: ReportFormat) -> Result<()> {
    let bytes = report.emit(format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

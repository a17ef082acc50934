//! Scenario documents and their dispatch.
//!
//! A scenario is a JSON document with schema version `"v1"`: a kind, a seed
//! for any randomized sub-procedure, kind-specific parameters mirroring the
//! module input types, and an optional output destination. A batch document
//! carries a list of scenarios. Identical `(document, seed)` pairs produce
//! byte-identical outputs.

use crate::coupling;
use crate::discrimination::{self, Ensemble};
use crate::error::{Error, Result};
use crate::metrics;
use crate::opalg::{HermitianOperator, MatrixDoc};
use crate::report::{MetricReport, ReportFormat};
use crate::riskavg::{self, LogProb, RiskScenario};
use crate::states::{self, ClassicalDistribution, CqState, CqStateDoc};
use crate::tol::Tolerances;
use crate::toysim::{self, Bb84Config};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Required schema version.
pub const SCHEMA_VERSION: &str = "v1";

/// Scenario kinds, matching the runner's subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Metrics,
    Coupling,
    Helstrom,
    Guess,
    Bb84,
    Risk,
    Averaging,
}

/// Output destination and encoding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_format() -> String {
    "json".to_string()
}

/// One scenario document.
#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub v: String,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    pub params: serde_json::Value,
}

/// A document holding either one scenario or a list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScenarioFile {
    Batch { v: String, scenarios: Vec<Scenario> },
    Single(Scenario),
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Vec<Scenario>> {
        let parsed: ScenarioFile = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("scenario document does not parse: {e}")))?;
        let scenarios = match parsed {
            ScenarioFile::Single(s) => vec![s],
            ScenarioFile::Batch { v, scenarios } => {
                if v != SCHEMA_VERSION {
                    return Err(Error::validation(format!(
                        "unsupported schema version {v:?}, expected {SCHEMA_VERSION:?}"
                    )));
                }
                scenarios
            }
        };
        for s in &scenarios {
            if s.v != SCHEMA_VERSION {
                return Err(Error::validation(format!(
                    "unsupported schema version {:?} in field \"v\", expected {SCHEMA_VERSION:?}",
                    s.v
                )));
            }
        }
        Ok(scenarios)
    }
}

fn from_params<T: serde::de::DeserializeOwned>(
    kind: &str,
    params: &serde_json::Value,
) -> Result<T> {
    serde_json::from_value(params.clone())
        .map_err(|e| Error::validation(format!("invalid parameters for kind {kind:?}: {e}")))
}

#[derive(Debug, Deserialize)]
struct MetricsParams {
    state: CqStateDoc,
    /// Reference system; the averaged conditional when omitted.
    sigma: Option<MatrixDoc>,
    #[serde(default = "default_restarts")]
    restarts: usize,
}

fn default_restarts() -> usize {
    8
}

#[derive(Debug, Deserialize)]
struct CouplingParams {
    p: Vec<f64>,
    /// Second marginal; uniform when omitted.
    u: Option<Vec<f64>>,
    /// Optional one-time-pad check on its own pair of distributions.
    otp: Option<OtpParams>,
}

#[derive(Debug, Deserialize)]
struct OtpParams {
    key: Vec<f64>,
    plaintext: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct HelstromParams {
    priors: Vec<f64>,
    states: Vec<MatrixDoc>,
}

#[derive(Debug, Deserialize)]
struct GuessParams {
    state: CqStateDoc,
    sigma: Option<MatrixDoc>,
}

#[derive(Debug, Deserialize)]
struct RiskParams {
    key_rate_bits_per_sec: f64,
    key_len_bits: u64,
    duration_sec: f64,
    epsilon_sec: Option<f64>,
    epsilon_sec_log2: Option<f64>,
    fatalities: Option<u64>,
    fleet: Option<u64>,
}

#[derive(Debug, Deserialize)]
struct AveragingParams {
    avg_bound: f64,
    layers: u32,
    tail_samples: Option<Vec<f64>>,
    tail_threshold: Option<f64>,
}

/// Dispatches a scenario to its module and returns the combined report.
pub fn run_scenario(s: &Scenario, tol: &Tolerances<f64>) -> Result<MetricReport> {
    if s.v != SCHEMA_VERSION {
        return Err(Error::validation(format!(
            "unsupported schema version {:?}, expected {SCHEMA_VERSION:?}",
            s.v
        )));
    }
    match s.kind {
        Kind::Metrics => run_metrics(s, tol),
        Kind::Coupling => run_coupling(s),
        Kind::Helstrom => run_helstrom(s, tol),
        Kind::Guess => run_guess(s, tol),
        Kind::Bb84 => {
            let config: Bb84Config = from_params("bb84", &s.params)?;
            toysim::pipeline_report_with(&config, tol)
        }
        Kind::Risk => run_risk(s),
        Kind::Averaging => run_averaging(s),
    }
}

fn resolve_sigma(state: &CqState<f64>, doc: &Option<MatrixDoc>) -> Result<HermitianOperator<f64>> {
    match doc {
        Some(d) => HermitianOperator::from_doc(d),
        None => Ok(states::sigma_avg(state)),
    }
}

fn run_metrics(s: &Scenario, tol: &Tolerances<f64>) -> Result<MetricReport> {
    let p: MetricsParams = from_params("metrics", &s.params)?;
    let state = CqState::from_doc(&p.state)?;
    let sigma = resolve_sigma(&state, &p.sigma)?;

    let mut report = MetricReport::new();
    report.absorb(
        "decomposition",
        metrics::epsilon_decomposition_with(&state, &sigma, tol)?,
    );
    report.push(
        "statistical_distance_lb",
        metrics::statistical_distance_lb_with(&state, &sigma, tol)?,
        "statistical_distance_lb: half L1 distance of the corrected key marginal to uniform",
    );
    let scan = metrics::min_sigma_trace_distance_with(&state, p.restarts, s.seed, tol)?;
    report.absorb("sigma_scan", scan.report);
    let zeta = states::correctify(&state);
    report.absorb(
        "chain",
        metrics::koashi_chain_check_with(&zeta, &sigma, tol)?,
    );
    Ok(report)
}

fn run_coupling(s: &Scenario) -> Result<MetricReport> {
    let p: CouplingParams = from_params("coupling", &s.params)?;
    let dist_p = ClassicalDistribution::new(p.p.clone())?;
    let dist_u = match &p.u {
        Some(u) => ClassicalDistribution::new(u.clone())?,
        None => ClassicalDistribution::uniform(dist_p.support()),
    };

    let mut report = coupling::independent_coupling_check(&dist_p, &dist_u)?;
    if let Some(otp) = &p.otp {
        let key = ClassicalDistribution::new(otp.key.clone())?;
        let plaintext = ClassicalDistribution::new(otp.plaintext.clone())?;
        report.absorb("otp", coupling::otp_secrecy_check(&key, &plaintext)?);
    }
    Ok(report)
}

fn run_helstrom(s: &Scenario, tol: &Tolerances<f64>) -> Result<MetricReport> {
    let p: HelstromParams = from_params("helstrom", &s.params)?;
    if p.priors.len() != p.states.len() {
        return Err(Error::validation(format!(
            "{} priors against {} states",
            p.priors.len(),
            p.states.len()
        )));
    }
    let items = p
        .priors
        .iter()
        .zip(&p.states)
        .map(|(&prior, doc)| Ok((prior, HermitianOperator::from_doc(doc)?)))
        .collect::<Result<Vec<_>>>()?;
    let outcome = discrimination::helstrom_with(&Ensemble::new_with(items, tol)?, tol)?;
    Ok(outcome.report)
}

fn run_guess(s: &Scenario, tol: &Tolerances<f64>) -> Result<MetricReport> {
    let p: GuessParams = from_params("guess", &s.params)?;
    let state = CqState::from_doc(&p.state)?;
    let sigma = resolve_sigma(&state, &p.sigma)?;
    discrimination::guess_bound_with(&state, &sigma, tol)
}

fn run_risk(s: &Scenario) -> Result<MetricReport> {
    let p: RiskParams = from_params("risk", &s.params)?;
    let epsilon_sec = match (p.epsilon_sec, p.epsilon_sec_log2) {
        (Some(linear), None) => LogProb::from_prob(linear)?,
        (None, Some(log2)) => LogProb::from_log2(log2),
        (None, None) => {
            return Err(Error::validation(
                "risk scenario needs epsilon_sec or epsilon_sec_log2",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(Error::validation(
                "give epsilon_sec or epsilon_sec_log2, not both",
            ))
        }
    };
    let scenario = RiskScenario {
        key_rate_bits_per_sec: p.key_rate_bits_per_sec,
        key_len_bits: p.key_len_bits,
        duration_sec: p.duration_sec,
        epsilon_sec,
    };
    let mut report = riskavg::leak_rate(&scenario)?;

    let floor = LogProb::from_log2(-(p.key_len_bits as f64));
    let (_, cmp) = riskavg::log2_compare(floor, epsilon_sec);
    report.absorb("floor_vs_epsilon", cmp);
    report.absorb(
        "exponent_check",
        riskavg::decimal_exponent_check(
            p.key_len_bits as f64,
            riskavg::MEGABIT_KEY_CLAIMED_LOG10_EXPONENT,
        ),
    );

    if let (Some(fatalities), Some(fleet)) = (p.fatalities, p.fleet) {
        let baseline = riskavg::fatality_baseline(fatalities, fleet)?;
        report.push(
            "fatality_baseline",
            baseline,
            "fatality_baseline: fatalities / fleet",
        );
        let leaks = report.get("expected_leaks").expect("pushed by leak_rate");
        report.push(
            "leaks_to_baseline_ratio",
            leaks / baseline,
            "run_scenario: expected_leaks / fatality_baseline",
        );
    }
    Ok(report)
}

fn run_averaging(s: &Scenario) -> Result<MetricReport> {
    let p: AveragingParams = from_params("averaging", &s.params)?;
    let mut report = riskavg::markov_cascade(p.avg_bound, p.layers)?;
    match (&p.tail_samples, p.tail_threshold) {
        (Some(samples), Some(threshold)) => {
            report.absorb("tail", riskavg::markov_tail_demo(samples, threshold)?);
        }
        (None, None) => {}
        _ => {
            return Err(Error::validation(
                "tail demonstration needs both tail_samples and tail_threshold",
            ))
        }
    }
    Ok(report)
}

/// Runs every scenario in a parsed document, writing each declared output.
/// Returns the reports in document order.
pub fn run_all(scenarios: &[Scenario], tol: &Tolerances<f64>) -> Result<Vec<MetricReport>> {
    let mut reports = Vec::with_capacity(scenarios.len());
    for s in scenarios {
        let report = run_scenario(s, tol)?;
        if let Some(output) = &s.output {
            let format: ReportFormat = output.format.parse()?;
            std::fs::write(&output.path, report.emit(format)?)?;
        }
        reports.push(report);
    }
    Ok(reports)
}

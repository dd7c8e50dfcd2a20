//! Report assembly and rendering: text tables for humans, JSON and CSV for
//! machines. Every report embeds the tool version, master seed, and a hash
//! of the resolved configuration; none of the bodies carry wall-clock
//! fields, so fixed-seed runs emit identical bytes.

use serde::Serialize;
use sha2::{Digest, Sha256};
use ujel_core::{ConfidenceInterval, CoverageReport, EvalStats};

use crate::{AppError, AppResult};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    TextTable,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = AppError;
    fn from_str(s: &str) -> AppResult<Self> {
        match s {
            "text-table" | "text" => Ok(OutputFormat::TextTable),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(AppError::usage(format!(
                "unknown format '{other}'; expected text-table, json, or csv"
            ))),
        }
    }
}

/// Reproducibility header embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub seed: u64,
    pub config_hash: String,
}

impl Meta {
    pub fn new(seed: u64, config: &impl Serialize) -> Self {
        let canonical = serde_json::to_string(config).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        Meta {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config_hash: hex::encode(&digest[..8]),
        }
    }

    fn comment_lines(&self) -> String {
        format!(
            "# schema_version: {}\n# tool_version: {}\n# seed: {}\n# config_hash: {}\n",
            self.schema_version, self.tool_version, self.seed, self.config_hash
        )
    }
}

/// Engine evaluation summary surfaced in estimate/ci reports.
#[derive(Debug, Clone, Serialize)]
pub struct EngineDiagnostics {
    pub path: String,
    pub kernel_calls: u64,
    pub warnings: Vec<String>,
    /// Worst absolute gap against an enumeration cross-check, present when
    /// the dataset was small enough to re-evaluate by brute force.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check_max_delta: Option<f64>,
}

impl EngineDiagnostics {
    pub fn from_stats(stats: &EvalStats, oracle_check: Option<f64>) -> Self {
        EngineDiagnostics {
            path: format!("{:?}", stats.path).to_lowercase(),
            kernel_calls: stats.kernel_calls,
            warnings: stats.warnings.clone(),
            oracle_check_max_delta: oracle_check,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub meta: Meta,
    pub kernel: String,
    pub group_names: Vec<String>,
    pub group_sizes: Vec<usize>,
    pub estimate: f64,
    pub sigma_hat: f64,
    pub engine: EngineDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct CiReport {
    pub meta: Meta,
    pub kernel: String,
    pub group_names: Vec<String>,
    pub group_sizes: Vec<usize>,
    pub estimate: f64,
    pub sigma_hat: f64,
    pub engine: EngineDiagnostics,
    pub intervals: Vec<ConfidenceInterval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub meta: Meta,
    pub rows: Vec<CoverageReport>,
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

pub fn render_estimate(report: &EstimateReport, format: OutputFormat) -> AppResult<String> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = report.meta.comment_lines();
            out += "kernel,groups,sizes,estimate,sigma_hat,path,kernel_calls\n";
            out += &format!(
                "{},{},{},{},{},{},{}\n",
                report.kernel,
                report.group_names.join("/"),
                report
                    .group_sizes
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("/"),
                report.estimate,
                report.sigma_hat,
                report.engine.path,
                report.engine.kernel_calls
            );
            Ok(out)
        }
        OutputFormat::TextTable => {
            let mut out = String::new();
            out += &format!(
                "kernel {}  groups {}  sizes {}\n",
                report.kernel,
                report.group_names.join(","),
                report
                    .group_sizes
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            );
            out += &format!(
                "estimate {}  sigma_hat {}  [{} path]\n",
                fmt6(report.estimate),
                fmt6(report.sigma_hat),
                report.engine.path
            );
            for w in &report.engine.warnings {
                out += &format!("warning: {w}\n");
            }
            out += &meta_footer(&report.meta);
            Ok(out)
        }
    }
}

pub fn render_ci(report: &CiReport, format: OutputFormat) -> AppResult<String> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = report.meta.comment_lines();
            out += "method,level,lower,upper,point_estimate,sigma_hat\n";
            for ci in &report.intervals {
                out += &format!(
                    "{},{},{},{},{},{}\n",
                    ci.method, ci.level, ci.lower, ci.upper, ci.point_estimate, report.sigma_hat
                );
            }
            Ok(out)
        }
        OutputFormat::TextTable => {
            let mut out = String::new();
            out += &format!(
                "kernel {}  groups {}  sizes {}\n",
                report.kernel,
                report.group_names.join(","),
                report
                    .group_sizes
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            );
            out += &format!(
                "estimate {}  sigma_hat {}  [{} path]\n\n",
                fmt6(report.estimate),
                fmt6(report.sigma_hat),
                report.engine.path
            );
            out += &format!(
                "{:<12} {:>6} {:>12} {:>12} {:>9}\n",
                "method", "level", "lower", "upper", "width"
            );
            for ci in &report.intervals {
                out += &format!(
                    "{:<12} {:>6} {:>12} {:>12} {:>9}\n",
                    ci.method.label(),
                    ci.level,
                    fmt6(ci.lower),
                    fmt6(ci.upper),
                    fmt6(ci.width())
                );
            }
            let warnings: Vec<&String> = report
                .intervals
                .iter()
                .flat_map(|ci| ci.diagnostics.warnings.iter())
                .chain(report.engine.warnings.iter())
                .collect();
            for w in warnings {
                out += &format!("warning: {w}\n");
            }
            out += &meta_footer(&report.meta);
            Ok(out)
        }
    }
}

pub fn render_simulate(report: &SimulateReport, format: OutputFormat) -> AppResult<String> {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = report.meta.comment_lines();
            out +=
                "scenario_id,scenario_key,sizes,method,level,replications,cp_percent,avg_length,true_theta,failures,seed\n";
            for row in &report.rows {
                out += &format!(
                    "{},\"{}\",{},{},{},{},{},{},{},{},{}\n",
                    row.scenario_id,
                    row.scenario_key,
                    row.sizes
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("/"),
                    row.method,
                    row.level,
                    row.replications,
                    row.coverage_probability * 100.0,
                    row.average_length,
                    row.true_theta,
                    row.failures,
                    row.seed
                );
            }
            Ok(out)
        }
        OutputFormat::TextTable => {
            let mut out = String::new();
            out += &format!(
                "{:<44} {:>14} {:<12} {:>7} {:>8} {:>10} {:>9}\n",
                "scenario", "sizes", "method", "CP %", "AL", "true", "failures"
            );
            for row in &report.rows {
                out += &format!(
                    "{:<44} {:>14} {:<12} {:>7.1} {:>8.4} {:>10.4} {:>9}\n",
                    row.scenario_key,
                    row.sizes
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                    row.method.label(),
                    row.coverage_probability * 100.0,
                    row.average_length,
                    row.true_theta,
                    row.failures
                );
            }
            out += &meta_footer(&report.meta);
            Ok(out)
        }
    }
}

fn meta_footer(meta: &Meta) -> String {
    format!(
        "\nseed {}  config {}  v{} (schema {})\n",
        meta.seed, meta.config_hash, meta.tool_version, meta.schema_version
    )
}

fn json(value: &impl Serialize) -> AppResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| AppError::Failure(e.into()))
}

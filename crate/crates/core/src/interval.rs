//! Confidence-interval value types shared by every inference method.

use serde::Serialize;

/// Which construction produced an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Jel,
    NormalApprox,
    KernelBootstrap,
}

impl CiMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CiMethod::Jel => "jel",
            CiMethod::NormalApprox => "normal",
            CiMethod::KernelBootstrap => "kernel-boot",
        }
    }
}

impl std::fmt::Display for CiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Solver bookkeeping attached to an interval.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CiDiagnostics {
    /// Total inner-solver iterations (root finding plus endpoint bisection).
    pub iterations: u64,
    /// Worst solver residual accepted while locating the interval.
    pub residual: f64,
    /// Non-fatal conditions encountered (truncation, non-monotone scans, ...).
    pub warnings: Vec<String>,
}

impl CiDiagnostics {
    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

/// A two-sided confidence interval with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceInterval {
    pub method: CiMethod,
    /// Level exactly as requested.
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub point_estimate: f64,
    pub diagnostics: CiDiagnostics,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lower <= theta && theta <= self.upper
    }
}

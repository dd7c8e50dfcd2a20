//! Normal-approximation confidence interval studentized by the jackknife
//! variance estimator.

use crate::error::{Error, Result};
use crate::interval::{CiDiagnostics, CiMethod, ConfidenceInterval};
use crate::jackknife::JackknifeVariance;
use crate::numeric::normal_quantile;

/// Interval plus the ingredients it was assembled from.
#[derive(Debug, Clone)]
pub struct NormalCiResult {
    pub estimate: f64,
    pub sigma_hat: f64,
    pub z: f64,
    pub interval: ConfidenceInterval,
}

/// Symmetric interval `estimate ± z * sigma_hat`.
///
/// A zero variance estimate degenerates to `[estimate, estimate]` with a
/// warning rather than an error.
pub fn normal_ci(estimate: f64, var: &JackknifeVariance, level: f64) -> Result<NormalCiResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    if var.sigma_hat_sq < 0.0 {
        return Err(Error::Invalid(format!(
            "negative variance estimate {}",
            var.sigma_hat_sq
        )));
    }
    let sigma_hat = var.sigma_hat();
    let z = normal_quantile(0.5 * (1.0 + level))?;
    let mut diagnostics = CiDiagnostics::default();
    if sigma_hat == 0.0 {
        diagnostics.warn("zero variance estimate: interval degenerates to a point");
    }
    let half = z * sigma_hat;
    Ok(NormalCiResult {
        estimate,
        sigma_hat,
        z,
        interval: ConfidenceInterval {
            method: CiMethod::NormalApprox,
            level,
            lower: estimate - half,
            upper: estimate + half,
            point_estimate: estimate,
            diagnostics,
        },
    })
}

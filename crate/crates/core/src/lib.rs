//! Estimation and confidence intervals for parameters defined as
//! expectations of multi-sample U-statistic kernels.
//!
//! The crate evaluates k-sample U-statistics together with their full
//! leave-one-out family (with an exact counting fast path for ordering
//! indicators such as three-class VUS and k-class HUM differences), builds
//! jackknife pseudo-values, and constructs intervals three ways:
//!
//! * jackknife empirical likelihood with chi-square calibration,
//! * normal approximation with the pseudo-value variance estimator,
//! * kernel-smoothed estimation with a percentile bootstrap.
//!
//! Seeded samplers for two bivariate models and a deterministic coverage
//! harness support Monte Carlo studies of all three methods.

pub mod dataset;
pub mod engine;
pub mod error;
pub mod interval;
pub mod jackknife;
pub mod jel;
pub mod kernel;
pub mod normal_ci;
pub mod numeric;
pub mod sim;
pub mod smoothed;

pub use dataset::{Matrix, MultiSampleDataset};
pub use engine::{leave_one_out, u_statistic, EvalPath, EvalStats, UStatResult};
pub use error::{Error, Result};
pub use interval::{CiDiagnostics, CiMethod, ConfidenceInterval};
pub use jackknife::{
    combined_pseudo_values, ev_coefficients, group_pseudo_values, jackknife_variance,
    JackknifeVariance, PseudoValueSet,
};
pub use jel::{jel_confidence_interval, log_jel_ratio, solve_lambda, JelEvaluation};
pub use kernel::{KernelSpec, KernelStructure, BUILTIN_KERNELS};
pub use normal_ci::{normal_ci, NormalCiResult};
pub use sim::{
    run_coverage, true_theta, CoverageReport, FgmParetoParams, GroupModel, MobveParams,
    Scenario, TrueTheta,
};
pub use smoothed::{
    bandwidths, bootstrap_percentile_ci, silverman_bandwidth, smoothed_theta, BandwidthSet,
    BootstrapCi,
};

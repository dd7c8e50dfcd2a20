//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by dataset validation, the evaluation engine, and the
/// inference routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),

    #[error("group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("ragged matrix: row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("dimension mismatch: group {group} has q={found}, expected q={expected}")]
    DimensionMismatch {
        group: usize,
        found: usize,
        expected: usize,
    },

    #[error("non-finite value in group {group} at row {row}, column {col}")]
    NonFinite {
        group: usize,
        row: usize,
        col: usize,
    },

    #[error("unknown kernel '{name}'; built-ins: {available}")]
    UnknownKernel { name: String, available: String },

    #[error("kernel '{name}' takes {expected} groups, dataset has {found}")]
    GroupCountMismatch {
        name: String,
        expected: String,
        found: usize,
    },

    #[error("kernel '{name}' requires q={expected}, dataset has q={found}")]
    CoordinateMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("kernel degree {degree} exceeds size {size} of group {group}")]
    DegreeExceedsGroup {
        group: usize,
        degree: usize,
        size: usize,
    },

    #[error("cannot delete an observation from group {group}: size {size} equals the kernel degree")]
    DeletionImpossible { group: usize, size: usize },

    #[error("pooled degree m={m} must be smaller than pooled size n={n}")]
    PooledDegreeTooLarge { n: usize, m: usize },

    #[error("count overflow: groups are too large for exact 128-bit chain counting")]
    CountOverflow,

    #[error("theta={theta} lies outside the convex hull of the pseudo-value constraints")]
    OutsideConvexHull { theta: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: u64, residual: f64 },

    #[error("confidence level {0} must lie strictly inside (0, 1)")]
    InvalidLevel(f64),

    #[error("degenerate pseudo-values: jackknife variance is zero, no interval can be formed")]
    DegenerateSpread,

    #[error("group {group} needs at least {needed} observations, got {size}")]
    GroupTooSmall {
        group: usize,
        needed: usize,
        size: usize,
    },

    #[error("zero-spread column: bandwidth would be zero")]
    ZeroSpreadColumn,

    #[error("bootstrap replicate {replicate} failed after {attempts} resampling attempts: {source}")]
    BootstrapReplicate {
        replicate: usize,
        attempts: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("probability {0} must lie strictly inside (0, 1)")]
    InvalidProbability(f64),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

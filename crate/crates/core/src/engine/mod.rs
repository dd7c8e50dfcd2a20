//! Evaluation engine for k-sample U-statistics and their leave-one-out
//! family.
//!
//! Two paths produce identical results on ordering-indicator kernels:
//!
//! * an enumeration path that averages the kernel over every index
//!   combination (works for any kernel and degrees), and
//! * a counting path for degree-(1, ..., 1) chain indicators that counts
//!   strictly increasing chains with a forward/backward sweep in
//!   `O(k * n log n)` and removes each observation's chain contribution in
//!   O(1), instead of re-enumerating per deletion.
//!
//! Both are ratios of exact integer counts for indicator kernels, so they
//! agree to floating-point division error.

mod counting;
mod enumerate;

use serde::Serialize;

use crate::dataset::MultiSampleDataset;
use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, KernelStructure};

/// Which evaluation path produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Oracle,
    Counting,
}

/// Work accounting for one engine invocation.
#[derive(Debug, Clone, Serialize)]
pub struct EvalStats {
    pub kernel_calls: u64,
    pub path: EvalPath,
    pub warnings: Vec<String>,
}

/// Full U-statistic together with all `n` leave-one-out values in pooled
/// index order (groups concatenated).
#[derive(Debug, Clone)]
pub struct UStatResult {
    pub value: f64,
    pub leave_one_out: Vec<f64>,
    /// Prefix sums of group sizes, length `k + 1`.
    pub group_offsets: Vec<usize>,
    pub stats: EvalStats,
}

impl UStatResult {
    /// Leave-one-out values for one group.
    pub fn group_leave_one_out(&self, g: usize) -> &[f64] {
        &self.leave_one_out[self.group_offsets[g]..self.group_offsets[g + 1]]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.group_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn n_total(&self) -> usize {
        *self.group_offsets.last().unwrap()
    }
}

/// Kernels the counting path understands: degree one per group with an
/// ordering-indicator structure.
fn counting_eligible(kernel: &KernelSpec) -> bool {
    kernel.is_degree_one() && !matches!(kernel.structure(), KernelStructure::Generic)
}

/// The exact average of the kernel over all index combinations.
pub fn u_statistic(data: &MultiSampleDataset, kernel: &KernelSpec) -> Result<f64> {
    kernel.check_compatible(data)?;
    if counting_eligible(kernel) {
        counting::u_statistic(data, kernel)
    } else {
        enumerate::u_statistic(data, kernel)
    }
}

/// The U-statistic plus every single-deletion value.
///
/// Requires `n_g >= m_g + 1` in each group so that deletion leaves a valid
/// sample.
pub fn leave_one_out(data: &MultiSampleDataset, kernel: &KernelSpec) -> Result<UStatResult> {
    kernel.check_compatible(data)?;
    for (g, (&m, &n)) in kernel
        .degrees()
        .iter()
        .zip(&data.group_sizes())
        .enumerate()
    {
        if n == m {
            return Err(Error::DeletionImpossible { group: g, size: n });
        }
    }
    if counting_eligible(kernel) {
        counting::leave_one_out(data, kernel)
    } else {
        enumerate::leave_one_out(data, kernel)
    }
}

/// Forces the enumeration path regardless of kernel structure. Slow on
/// purpose; used for cross-checks.
pub fn leave_one_out_enumerated(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
) -> Result<UStatResult> {
    kernel.check_compatible(data)?;
    for (g, (&m, &n)) in kernel
        .degrees()
        .iter()
        .zip(&data.group_sizes())
        .enumerate()
    {
        if n == m {
            return Err(Error::DeletionImpossible { group: g, size: n });
        }
    }
    enumerate::leave_one_out(data, kernel)
}

/// Exact binomial coefficient in 128 bits.
pub(crate) fn binomial(n: usize, m: usize) -> Result<u128> {
    if m > n {
        return Ok(0);
    }
    let m = m.min(n - m);
    let mut acc: u128 = 1;
    for i in 1..=m {
        acc = acc
            .checked_mul((n - m + i) as u128)
            .ok_or(Error::CountOverflow)?;
        acc /= i as u128;
    }
    Ok(acc)
}

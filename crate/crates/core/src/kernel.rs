//! Kernel abstraction for multi-sample U-statistics, with built-in ordering
//! indicators for ROC-style measures.

use std::fmt;
use std::sync::Arc;

use crate::dataset::MultiSampleDataset;
use crate::error::{Error, Result};

/// Evaluator signature: receives `m_1` rows from group 1, then `m_2` rows
/// from group 2, and so on, concatenated in group order. Must be pure.
pub type KernelFn = dyn Fn(&[&[f64]]) -> f64 + Send + Sync;

/// Shape information the evaluation engine can exploit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelStructure {
    /// No structure assumed; evaluated by combination enumeration.
    Generic,
    /// Indicator of a strictly increasing chain on one coordinate,
    /// one observation per group.
    OrderIndicator { coord: usize },
    /// Difference of two chain indicators on two coordinates.
    OrderIndicatorDiff { plus_coord: usize, minus_coord: usize },
}

/// A symmetric kernel of degree `(m_1, ..., m_k)` whose expectation is the
/// inference target.
///
/// Symmetry within each group's arguments is a documented contract on the
/// evaluator, not something the library can check for user kernels.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    degrees: Vec<usize>,
    required_q: Option<usize>,
    structure: KernelStructure,
    eval: Arc<KernelFn>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("degrees", &self.degrees)
            .field("required_q", &self.required_q)
            .field("structure", &self.structure)
            .finish_non_exhaustive()
    }
}

pub const BUILTIN_KERNELS: [&str; 4] = ["vus-diff", "hum-diff", "vus", "prob-order"];

impl KernelSpec {
    /// Wraps a user-supplied evaluator. `required_q` of `None` accepts any
    /// coordinate dimension.
    pub fn new(
        name: impl Into<String>,
        degrees: Vec<usize>,
        required_q: Option<usize>,
        eval: Arc<KernelFn>,
    ) -> Result<Self> {
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::Invalid(
                "kernel degrees must be positive and nonempty".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            degrees,
            required_q,
            structure: KernelStructure::Generic,
            eval,
        })
    }

    /// Built-in ordering-indicator kernels, all of degree `(1, ..., 1)`:
    ///
    /// * `vus` — three-class chain indicator on a single coordinate (q = 1);
    /// * `prob-order` — the same indicator for any `k >= 2` (q = 1);
    /// * `vus-diff` — paired difference of two three-class chain indicators
    ///   over coordinates 1 and 2 (k = 3, q = 2);
    /// * `hum-diff` — the k-class generalization of `vus-diff` (q = 2).
    ///
    /// Chains use strict inequalities; any tie makes the indicator 0.
    pub fn builtin(name: &str, k: usize) -> Result<Self> {
        let check_k = |expect: Option<usize>| -> Result<()> {
            match expect {
                Some(e) if k != e => Err(Error::GroupCountMismatch {
                    name: name.to_string(),
                    expected: e.to_string(),
                    found: k,
                }),
                _ if k < 2 => Err(Error::GroupCountMismatch {
                    name: name.to_string(),
                    expected: "at least 2".to_string(),
                    found: k,
                }),
                _ => Ok(()),
            }
        };
        let spec = match name {
            "vus" => {
                check_k(Some(3))?;
                Self {
                    name: name.to_string(),
                    degrees: vec![1; 3],
                    required_q: Some(1),
                    structure: KernelStructure::OrderIndicator { coord: 0 },
                    eval: Arc::new(|rows: &[&[f64]]| chain_indicator(rows, 0)),
                }
            }
            "prob-order" => {
                check_k(None)?;
                Self {
                    name: name.to_string(),
                    degrees: vec![1; k],
                    required_q: Some(1),
                    structure: KernelStructure::OrderIndicator { coord: 0 },
                    eval: Arc::new(|rows: &[&[f64]]| chain_indicator(rows, 0)),
                }
            }
            "vus-diff" => {
                check_k(Some(3))?;
                Self {
                    name: name.to_string(),
                    degrees: vec![1; 3],
                    required_q: Some(2),
                    structure: KernelStructure::OrderIndicatorDiff {
                        plus_coord: 0,
                        minus_coord: 1,
                    },
                    eval: Arc::new(|rows: &[&[f64]]| {
                        chain_indicator(rows, 0) - chain_indicator(rows, 1)
                    }),
                }
            }
            "hum-diff" => {
                check_k(None)?;
                Self {
                    name: name.to_string(),
                    degrees: vec![1; k],
                    required_q: Some(2),
                    structure: KernelStructure::OrderIndicatorDiff {
                        plus_coord: 0,
                        minus_coord: 1,
                    },
                    eval: Arc::new(|rows: &[&[f64]]| {
                        chain_indicator(rows, 0) - chain_indicator(rows, 1)
                    }),
                }
            }
            other => {
                return Err(Error::UnknownKernel {
                    name: other.to_string(),
                    available: BUILTIN_KERNELS.join(", "),
                })
            }
        };
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn k(&self) -> usize {
        self.degrees.len()
    }

    /// Pooled degree `m = sum m_g`.
    pub fn pooled_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn required_q(&self) -> Option<usize> {
        self.required_q
    }

    pub fn structure(&self) -> &KernelStructure {
        &self.structure
    }

    /// All degrees equal to one, i.e. one observation per group.
    pub fn is_degree_one(&self) -> bool {
        self.degrees.iter().all(|&m| m == 1)
    }

    /// Evaluates the kernel on rows concatenated in group order.
    pub fn evaluate(&self, rows: &[&[f64]]) -> f64 {
        debug_assert_eq!(rows.len(), self.pooled_degree());
        (self.eval)(rows)
    }

    /// Checks this kernel against a dataset's shape.
    pub fn check_compatible(&self, data: &MultiSampleDataset) -> Result<()> {
        if data.k() != self.k() {
            return Err(Error::GroupCountMismatch {
                name: self.name.clone(),
                expected: self.k().to_string(),
                found: data.k(),
            });
        }
        if let Some(q) = self.required_q {
            if data.q() != q {
                return Err(Error::CoordinateMismatch {
                    name: self.name.clone(),
                    expected: q,
                    found: data.q(),
                });
            }
        }
        for (g, (&m, &n)) in self.degrees.iter().zip(&data.group_sizes()).enumerate() {
            if m > n {
                return Err(Error::DegreeExceedsGroup {
                    group: g,
                    degree: m,
                    size: n,
                });
            }
        }
        Ok(())
    }
}

/// 1 when the given coordinate strictly increases along the rows, else 0.
/// The negated comparison keeps ties and unordered values at zero.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
#[inline]
fn chain_indicator(rows: &[&[f64]], coord: usize) -> f64 {
    for w in rows.windows(2) {
        if !(w[0][coord] < w[1][coord]) {
            return 0.0;
        }
    }
    1.0
}

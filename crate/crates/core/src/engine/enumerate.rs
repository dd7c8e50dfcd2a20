//! Enumeration path: averages the kernel over every index combination.
//!
//! Leave-one-out values come from one pass: each combination's kernel value
//! is also added to the running sum of every observation it contains, so
//! the deleted-observation statistic is `(total - involved) / count` rather
//! than a fresh enumeration per deletion.

use super::{binomial, EvalPath, EvalStats, UStatResult};
use crate::dataset::MultiSampleDataset;
use crate::error::Result;
use crate::kernel::KernelSpec;
use crate::numeric::KahanSum;

const KERNEL_CALL_WARN_THRESHOLD: u128 = 100_000_000;

/// Lexicographic m-combinations of 0..n.
struct Combinations {
    n: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            indices: (0..m).collect(),
            done: m > n,
        }
    }

    fn advance(&mut self) {
        let m = self.indices.len();
        if m == 0 {
            self.done = true;
            return;
        }
        let mut i = m;
        while i > 0 {
            i -= 1;
            if self.indices[i] != i + self.n - m {
                self.indices[i] += 1;
                for j in i + 1..m {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

fn collect_combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c = Combinations::new(n, m);
    while !c.done {
        out.push(c.indices.clone());
        c.advance();
    }
    out
}

struct Sums {
    total: KahanSum,
    involved: Option<Vec<KahanSum>>,
    calls: u64,
    warnings: Vec<String>,
}

fn enumerate_sums(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
    with_involved: bool,
) -> Result<Sums> {
    let k = data.k();
    let sizes = data.group_sizes();
    let offsets = data.group_offsets();
    let degrees = kernel.degrees();

    let mut expected_calls: u128 = 1;
    for g in 0..k {
        expected_calls = expected_calls.saturating_mul(binomial(sizes[g], degrees[g])?);
    }
    let mut warnings = Vec::new();
    if expected_calls > KERNEL_CALL_WARN_THRESHOLD {
        warnings.push(format!(
            "enumeration needs {expected_calls} kernel calls; expect a long run"
        ));
    }

    let combos: Vec<Vec<Vec<usize>>> = (0..k)
        .map(|g| collect_combinations(sizes[g], degrees[g]))
        .collect();

    let mut total = KahanSum::new();
    let mut involved = with_involved.then(|| vec![KahanSum::new(); data.n_total()]);
    let mut calls: u64 = 0;

    // Odometer over per-group combination lists; order fixed, so the
    // compensated sums are deterministic.
    let mut pos = vec![0usize; k];
    let mut rows: Vec<&[f64]> = Vec::with_capacity(kernel.pooled_degree());
    loop {
        rows.clear();
        for g in 0..k {
            for &i in &combos[g][pos[g]] {
                rows.push(data.group(g).row(i));
            }
        }
        let value = kernel.evaluate(&rows);
        calls += 1;
        total.add(value);
        if let Some(acc) = involved.as_mut() {
            for g in 0..k {
                for &i in &combos[g][pos[g]] {
                    acc[offsets[g] + i].add(value);
                }
            }
        }

        let mut g = k;
        loop {
            if g == 0 {
                return Ok(Sums {
                    total,
                    involved,
                    calls,
                    warnings,
                });
            }
            g -= 1;
            pos[g] += 1;
            if pos[g] < combos[g].len() {
                break;
            }
            pos[g] = 0;
        }
    }
}

pub(super) fn u_statistic(data: &MultiSampleDataset, kernel: &KernelSpec) -> Result<f64> {
    let sums = enumerate_sums(data, kernel, false)?;
    let mut denom: u128 = 1;
    for (g, &m) in kernel.degrees().iter().enumerate() {
        denom = denom
            .checked_mul(binomial(data.group(g).n_rows(), m)?)
            .ok_or(crate::error::Error::CountOverflow)?;
    }
    Ok(sums.total.value() / denom as f64)
}

pub(super) fn leave_one_out(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
) -> Result<UStatResult> {
    let sums = enumerate_sums(data, kernel, true)?;
    let sizes = data.group_sizes();
    let offsets = data.group_offsets();
    let degrees = kernel.degrees();

    let mut full_count: u128 = 1;
    for (g, &m) in degrees.iter().enumerate() {
        full_count = full_count
            .checked_mul(binomial(sizes[g], m)?)
            .ok_or(crate::error::Error::CountOverflow)?;
    }
    let value = sums.total.value() / full_count as f64;

    // Combination count after deleting one observation from group g:
    // the group's binomial shrinks from C(n_g, m_g) to C(n_g - 1, m_g).
    let mut deleted_counts = Vec::with_capacity(data.k());
    for g in 0..data.k() {
        let mut c: u128 = 1;
        for (h, &mh) in degrees.iter().enumerate() {
            let n = if h == g { sizes[h] - 1 } else { sizes[h] };
            c = c
                .checked_mul(binomial(n, mh)?)
                .ok_or(crate::error::Error::CountOverflow)?;
        }
        deleted_counts.push(c as f64);
    }

    let involved = sums.involved.expect("requested involved sums");
    let total = sums.total.value();
    let mut loo = Vec::with_capacity(data.n_total());
    for g in 0..data.k() {
        for i in 0..sizes[g] {
            let s = involved[offsets[g] + i].value();
            loo.push((total - s) / deleted_counts[g]);
        }
    }

    Ok(UStatResult {
        value,
        leave_one_out: loo,
        group_offsets: offsets,
        stats: EvalStats {
            kernel_calls: sums.calls,
            path: EvalPath::Oracle,
            warnings: sums.warnings,
        },
    })
}

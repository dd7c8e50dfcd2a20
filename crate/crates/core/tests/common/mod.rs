// Each integration target compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

//! Brute-force oracles for the integration suites.
//!
//! Everything here recomputes statistics straight from their definitions —
//! fresh enumeration per deletion, pooled-sample construction materialized
//! verbatim — and stays independent of the library's evaluation paths.

use rand::Rng;
use ujel_core::{KernelSpec, Matrix, MultiSampleDataset};

/// Simple recursive combination visitor.
fn for_each_combination(n: usize, m: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, left: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=n - left {
            acc.push(i);
            rec(i + 1, n, left - 1, acc, f);
            acc.pop();
        }
    }
    if m > n {
        return;
    }
    rec(0, n, m, &mut Vec::new(), f);
}

fn binom(n: usize, m: usize) -> f64 {
    if m > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 1..=m.min(n - m) {
        acc = acc * (n - m.min(n - m) + i) as f64 / i as f64;
    }
    acc
}

/// Direct average of the kernel over all index combinations, with plain
/// accumulation and per-group recursion.
pub fn brute_u(data: &MultiSampleDataset, kernel: &KernelSpec) -> f64 {
    let k = data.k();
    let degrees = kernel.degrees();
    let mut total = 0.0f64;
    let mut count = 0u64;

    fn walk(
        data: &MultiSampleDataset,
        kernel: &KernelSpec,
        degrees: &[usize],
        g: usize,
        rows: &mut Vec<Vec<f64>>,
        total: &mut f64,
        count: &mut u64,
    ) {
        if g == data.k() {
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            *total += kernel.evaluate(&refs);
            *count += 1;
            return;
        }
        let n = data.group(g).n_rows();
        for_each_combination(n, degrees[g], &mut |combo| {
            let before = rows.len();
            for &i in combo {
                rows.push(data.group(g).row(i).to_vec());
            }
            walk(data, kernel, degrees, g + 1, rows, total, count);
            rows.truncate(before);
        });
    }

    let _ = k;
    walk(data, kernel, degrees, 0, &mut Vec::new(), &mut total, &mut count);
    total / count as f64
}

/// Removes one row from one group, returning a fresh dataset.
pub fn delete_observation(data: &MultiSampleDataset, group: usize, row: usize) -> MultiSampleDataset {
    let groups: Vec<Matrix> = data
        .groups()
        .iter()
        .enumerate()
        .map(|(g, m)| {
            let rows: Vec<Vec<f64>> = (0..m.n_rows())
                .filter(|&i| !(g == group && i == row))
                .map(|i| m.row(i).to_vec())
                .collect();
            Matrix::from_rows(&rows).unwrap()
        })
        .collect();
    MultiSampleDataset::new(groups).unwrap()
}

/// Leave-one-out by fresh enumeration of every reduced dataset.
pub fn brute_leave_one_out(data: &MultiSampleDataset, kernel: &KernelSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(data.n_total());
    for g in 0..data.k() {
        for i in 0..data.group(g).n_rows() {
            out.push(brute_u(&delete_observation(data, g, i), kernel));
        }
    }
    out
}

/// Combined pseudo-values from the pooled-sample construction materialized
/// literally: the pooled kernel is the group kernel scaled by the ratio of
/// combination counts on subsets that split into the group pattern, zero
/// otherwise, and the single-deletion statistic enumerates m-subsets of the
/// pooled sample without the deleted index.
pub fn pooled_deletion_pseudo_values(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
) -> Vec<f64> {
    let offsets = data.group_offsets();
    let sizes = data.group_sizes();
    let degrees = kernel.degrees();
    let n = data.n_total();
    let m: usize = degrees.iter().sum();

    let mut denom_groups = 1.0f64;
    for (g, &mg) in degrees.iter().enumerate() {
        denom_groups *= binom(sizes[g], mg);
    }
    let c_star = binom(n, m) / denom_groups;

    // Pooled kernel on a sorted index subset of the pooled sample.
    let pooled_eval = |subset: &[usize]| -> f64 {
        let mut counts = vec![0usize; data.k()];
        for &l in subset {
            let g = offsets.partition_point(|&o| o <= l) - 1;
            counts[g] += 1;
        }
        if counts != degrees {
            return 0.0;
        }
        let rows: Vec<&[f64]> = subset
            .iter()
            .map(|&l| {
                let g = offsets.partition_point(|&o| o <= l) - 1;
                data.group(g).row(l - offsets[g])
            })
            .collect();
        c_star * kernel.evaluate(&rows)
    };

    let u_n = {
        let mut total = 0.0;
        for_each_combination(n, m, &mut |subset| {
            total += pooled_eval(subset);
        });
        total / binom(n, m)
    };

    let mut pseudo = Vec::with_capacity(n);
    for l in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&x| x != l).collect();
        let mut total = 0.0;
        for_each_combination(n - 1, m, &mut |subset| {
            let mapped: Vec<usize> = subset.iter().map(|&i| keep[i]).collect();
            total += pooled_eval(&mapped);
        });
        let u_minus = total / binom(n - 1, m);
        pseudo.push(n as f64 * u_n - (n as f64 - 1.0) * u_minus);
    }
    pseudo
}

/// Random dataset with the requested shape bounds.
pub fn random_dataset<R: Rng>(
    rng: &mut R,
    k: usize,
    q: usize,
    size_lo: usize,
    size_hi: usize,
) -> MultiSampleDataset {
    let groups: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            let n = rng.random_range(size_lo..=size_hi);
            (0..n)
                .map(|_| (0..q).map(|_| rng.random::<f64>()).collect())
                .collect()
        })
        .collect();
    MultiSampleDataset::from_rows(&groups).unwrap()
}

//! Counting path for degree-(1, ..., 1) chain-indicator kernels.
//!
//! A strictly increasing chain picks one observation per group with values
//! ascending in group order. After sorting each group once:
//!
//! * forward sweep: `fwd[g][i]` counts chains over groups `1..=g` ending at
//!   observation `i` (prefix sums over the previous group's sorted values);
//! * backward sweep: `bwd[g][i]` counts chains over groups `g..=k` starting
//!   at `i`;
//! * the full chain count is `sum(fwd[k])`, and the chains through a given
//!   observation are `fwd[g][i] * bwd[g][i]`, so deleting it subtracts that
//!   product from the numerator.
//!
//! Everything is exact 128-bit integer arithmetic until the final division.

use super::{EvalPath, EvalStats, UStatResult};
use crate::dataset::MultiSampleDataset;
use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, KernelStructure};

/// Chain counts for one coordinate: the total and, per pooled observation,
/// the number of chains passing through it.
struct ChainCounts {
    total: u128,
    through: Vec<u128>,
}

fn chain_counts(data: &MultiSampleDataset, coord: usize) -> Result<ChainCounts> {
    let k = data.k();
    let values: Vec<Vec<f64>> = (0..k).map(|g| data.group(g).column(coord)).collect();

    // Sorted views, one per group: values ascending with the sort permutation.
    let sorted: Vec<(Vec<f64>, Vec<usize>)> = values
        .iter()
        .map(|v| {
            let mut order: Vec<usize> = (0..v.len()).collect();
            order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
            let vals = order.iter().map(|&i| v[i]).collect();
            (vals, order)
        })
        .collect();

    let checked_add = |a: u128, b: u128| a.checked_add(b).ok_or(Error::CountOverflow);

    // fwd[g][i]: chains over groups 0..=g ending at observation i of group g.
    let mut fwd: Vec<Vec<u128>> = Vec::with_capacity(k);
    fwd.push(vec![1u128; values[0].len()]);
    for g in 1..k {
        let (prev_vals, prev_order) = &sorted[g - 1];
        let mut prefix = Vec::with_capacity(prev_vals.len() + 1);
        prefix.push(0u128);
        for (rank, &orig) in prev_order.iter().enumerate() {
            prefix.push(checked_add(prefix[rank], fwd[g - 1][orig])?);
        }
        let cur = values[g]
            .iter()
            .map(|&x| {
                // strictly-less count in the previous group
                let lt = prev_vals.partition_point(|&v| v < x);
                prefix[lt]
            })
            .collect();
        fwd.push(cur);
    }

    // bwd[g][i]: chains over groups g..k starting at observation i of group g.
    let mut bwd: Vec<Vec<u128>> = vec![Vec::new(); k];
    bwd[k - 1] = vec![1u128; values[k - 1].len()];
    for g in (0..k - 1).rev() {
        let (next_vals, next_order) = &sorted[g + 1];
        // suffix[r] = sum of bwd over sorted ranks r..end of group g+1
        let mut suffix = vec![0u128; next_vals.len() + 1];
        for rank in (0..next_vals.len()).rev() {
            suffix[rank] = checked_add(suffix[rank + 1], bwd[g + 1][next_order[rank]])?;
        }
        bwd[g] = values[g]
            .iter()
            .map(|&x| {
                // strictly-greater count in the next group
                let le = next_vals.partition_point(|&v| v <= x);
                suffix[le]
            })
            .collect();
    }

    let mut total: u128 = 0;
    for &f in &fwd[k - 1] {
        total = checked_add(total, f)?;
    }

    let mut through = Vec::with_capacity(data.n_total());
    for g in 0..k {
        for i in 0..values[g].len() {
            let t = fwd[g][i]
                .checked_mul(bwd[g][i])
                .ok_or(Error::CountOverflow)?;
            debug_assert!(t <= total);
            through.push(t);
        }
    }

    Ok(ChainCounts { total, through })
}

fn coordinate_pair(kernel: &KernelSpec) -> (usize, Option<usize>) {
    match *kernel.structure() {
        KernelStructure::OrderIndicator { coord } => (coord, None),
        KernelStructure::OrderIndicatorDiff {
            plus_coord,
            minus_coord,
        } => (plus_coord, Some(minus_coord)),
        KernelStructure::Generic => unreachable!("counting path requires structure"),
    }
}

pub(super) fn u_statistic(data: &MultiSampleDataset, kernel: &KernelSpec) -> Result<f64> {
    let (plus, minus) = coordinate_pair(kernel);
    let sizes = data.group_sizes();
    let mut denom: u128 = 1;
    for &n in &sizes {
        denom = denom.checked_mul(n as u128).ok_or(Error::CountOverflow)?;
    }
    let pos = chain_counts(data, plus)?;
    let neg = match minus {
        Some(c) => chain_counts(data, c)?.total,
        None => 0,
    };
    Ok((pos.total as f64 - neg as f64) / denom as f64)
}

pub(super) fn leave_one_out(
    data: &MultiSampleDataset,
    kernel: &KernelSpec,
) -> Result<UStatResult> {
    let (plus, minus) = coordinate_pair(kernel);
    let sizes = data.group_sizes();
    let offsets = data.group_offsets();

    let mut denom: u128 = 1;
    for &n in &sizes {
        denom = denom.checked_mul(n as u128).ok_or(Error::CountOverflow)?;
    }
    // Tuple count after deleting one observation from group g.
    let deleted_denoms: Vec<f64> = sizes
        .iter()
        .map(|&n| (denom / n as u128 * (n as u128 - 1)) as f64)
        .collect();

    let pos = chain_counts(data, plus)?;
    let neg = minus.map(|c| chain_counts(data, c)).transpose()?;

    let value = match &neg {
        Some(n) => (pos.total as f64 - n.total as f64) / denom as f64,
        None => pos.total as f64 / denom as f64,
    };

    let n_total = data.n_total();
    let mut loo = Vec::with_capacity(n_total);
    for g in 0..data.k() {
        for i in 0..sizes[g] {
            let l = offsets[g] + i;
            let remaining_pos = (pos.total - pos.through[l]) as f64;
            let remaining_neg = match &neg {
                Some(n) => (n.total - n.through[l]) as f64,
                None => 0.0,
            };
            loo.push((remaining_pos - remaining_neg) / deleted_denoms[g]);
        }
    }

    Ok(UStatResult {
        value,
        leave_one_out: loo,
        group_offsets: offsets,
        stats: EvalStats {
            kernel_calls: 0,
            path: EvalPath::Counting,
            warnings: Vec::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;
    use crate::kernel::KernelSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Counting and enumeration must agree exactly on indicator kernels,
    /// ties included.
    #[test]
    fn counting_matches_enumeration_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..120 {
            let k = if trial % 3 == 0 { 4 } else { 3 };
            let sizes: Vec<usize> =
                (0..k).map(|_| rng.random_range(2..=9)).collect();
            let q = 2;
            let groups: Vec<Vec<Vec<f64>>> = sizes
                .iter()
                .map(|&n| {
                    (0..n)
                        .map(|_| {
                            (0..q)
                                // small integer support forces plenty of ties
                                .map(|_| rng.random_range(0..6) as f64)
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let data = crate::dataset::MultiSampleDataset::from_rows(&groups).unwrap();
            let kernel = if k == 3 {
                KernelSpec::builtin("vus-diff", 3).unwrap()
            } else {
                KernelSpec::builtin("hum-diff", k).unwrap()
            };
            let fast = engine::leave_one_out(&data, &kernel).unwrap();
            let slow = engine::leave_one_out_enumerated(&data, &kernel).unwrap();
            assert_eq!(fast.stats.path, EvalPath::Counting);
            assert_eq!(slow.stats.path, EvalPath::Oracle);
            assert!((fast.value - slow.value).abs() <= 1e-12);
            for (a, b) in fast.leave_one_out.iter().zip(&slow.leave_one_out) {
                assert!((a - b).abs() <= 1e-12, "loo mismatch: {a} vs {b}");
            }
        }
    }

    #[test]
    fn large_groups_stay_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut col = |n: usize| (0..n).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
        let data = crate::dataset::MultiSampleDataset::from_columns(&[
            col(4000),
            col(5000),
            col(3000),
        ])
        .unwrap();
        let k = KernelSpec::builtin("vus", 3).unwrap();
        let res = engine::leave_one_out(&data, &k).unwrap();
        assert!(res.value > 0.0 && res.value < 1.0);
        assert_eq!(res.leave_one_out.len(), 12000);
        assert_eq!(res.stats.kernel_calls, 0);
    }
}

//! Kernel-smoothed estimator of the paired three-class ordering difference,
//! with rule-of-thumb bandwidths and a percentile bootstrap interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{Matrix, MultiSampleDataset};
use crate::error::{Error, Result};
use crate::interval::{CiDiagnostics, CiMethod, ConfidenceInterval};
use crate::numeric::{normal_cdf, quantile_type7, sample_sd, KahanSum};

const RESAMPLE_ATTEMPTS: usize = 10;

/// One bandwidth per column-sample pair, ordered first coordinate across the
/// three groups, then second coordinate: (X1, Y1, Z1, X2, Y2, Z2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSet {
    values: [f64; 6],
}

impl BandwidthSet {
    pub fn new(values: [f64; 6]) -> Result<Self> {
        if values.iter().any(|&h| h.is_nan() || h <= 0.0) {
            return Err(Error::ZeroSpreadColumn);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64; 6] {
        &self.values
    }

    /// Same bandwidths scaled by a positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut v = self.values;
        for h in &mut v {
            *h *= factor;
        }
        Self::new(v)
    }
}

/// Rule-of-thumb bandwidth `0.9 min(sd, iqr/1.34) n^(-1/5)`.
///
/// `sd` uses the n-1 denominator, `iqr` the linear-interpolation quantile
/// convention, both fixed for reproducibility.
pub fn silverman_bandwidth(column: &[f64]) -> Result<f64> {
    if column.len() < 2 {
        return Err(Error::Invalid(
            "bandwidth needs at least 2 observations".into(),
        ));
    }
    let sd = sample_sd(column);
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_type7(&sorted, 0.75) - quantile_type7(&sorted, 0.25);
    let spread = sd.min(iqr / 1.34);
    if spread.is_nan() || spread <= 0.0 {
        return Err(Error::ZeroSpreadColumn);
    }
    Ok(0.9 * spread * (column.len() as f64).powf(-0.2))
}

fn check_shape(data: &MultiSampleDataset) -> Result<()> {
    if data.k() != 3 || data.q() != 2 {
        return Err(Error::Invalid(format!(
            "kernel-smoothed estimator needs k=3 and q=2, got k={} q={}",
            data.k(),
            data.q()
        )));
    }
    Ok(())
}

/// All six bandwidths for a three-group bivariate dataset; each column uses
/// its own group's sample size.
pub fn bandwidths(data: &MultiSampleDataset) -> Result<BandwidthSet> {
    check_shape(data)?;
    let mut values = [0.0f64; 6];
    for coord in 0..2 {
        for g in 0..3 {
            values[coord * 3 + g] = silverman_bandwidth(&data.group(g).column(coord))?;
        }
    }
    BandwidthSet::new(values)
}

/// Smoothed ordering-difference estimate.
///
/// The triple sum factors through the middle group: for each of its
/// observations the first-group and third-group sums are independent, so the
/// work is `O(n_2 (n_1 + n_3))` per coordinate instead of `O(n_1 n_2 n_3)`.
pub fn smoothed_theta(data: &MultiSampleDataset, bw: &BandwidthSet) -> Result<f64> {
    check_shape(data)?;
    let h = bw.values();
    let mut total = KahanSum::new();
    for coord in 0..2 {
        let x = data.group(0).column(coord);
        let y = data.group(1).column(coord);
        let z = data.group(2).column(coord);
        let s_xy = (h[coord * 3].powi(2) + h[coord * 3 + 1].powi(2)).sqrt();
        let s_yz = (h[coord * 3 + 1].powi(2) + h[coord * 3 + 2].powi(2)).sqrt();
        let sign = if coord == 0 { 1.0 } else { -1.0 };
        for &yj in &y {
            let mut left = KahanSum::new();
            for &xi in &x {
                left.add(normal_cdf((yj - xi) / s_xy));
            }
            let mut right = KahanSum::new();
            for &zk in &z {
                right.add(normal_cdf((zk - yj) / s_yz));
            }
            total.add(sign * left.value() * right.value());
        }
    }
    let denom =
        data.group(0).n_rows() as f64 * data.group(1).n_rows() as f64 * data.group(2).n_rows() as f64;
    Ok(total.value() / denom)
}

/// Bootstrap percentile interval for the smoothed estimate.
#[derive(Debug, Clone)]
pub struct BootstrapCi {
    /// Replicate estimates in replicate order.
    pub replicates: Vec<f64>,
    pub interval: ConfidenceInterval,
    pub b: usize,
    pub seed: u64,
}

fn resample_group(m: &Matrix, rng: &mut ChaCha8Rng) -> Matrix {
    let n = m.n_rows();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| m.row(rng.random_range(0..n)).to_vec())
        .collect();
    Matrix::from_rows(&rows).expect("resampled rows are rectangular")
}

fn resample_dataset(data: &MultiSampleDataset, rng: &mut ChaCha8Rng) -> MultiSampleDataset {
    let groups = data
        .groups()
        .iter()
        .map(|m| resample_group(m, rng))
        .collect();
    MultiSampleDataset::new(groups).expect("resample preserves validity")
}

fn replicate_estimate(
    data: &MultiSampleDataset,
    seed: u64,
    replicate: usize,
) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    let mut attempts = 0usize;
    loop {
        attempts += 1;
        let resample = resample_dataset(data, &mut rng);
        // Bandwidths are recomputed on every resample, not frozen from the
        // original data.
        match bandwidths(&resample).and_then(|bw| smoothed_theta(&resample, &bw)) {
            Ok(est) => return Ok((est, attempts)),
            Err(Error::ZeroSpreadColumn) if attempts < RESAMPLE_ATTEMPTS => continue,
            Err(e) => {
                return Err(Error::BootstrapReplicate {
                    replicate,
                    attempts,
                    source: Box::new(e),
                })
            }
        }
    }
}

/// One-indexed order-statistic ranks of the percentile interval:
/// ceil(B a/2) and ceil(B (1 - a/2)) for a two-sided level.
fn percentile_ranks(b: usize, level: f64) -> (usize, usize) {
    let alpha = 1.0 - level;
    let lo = ((b as f64 * alpha / 2.0).ceil() as usize).clamp(1, b);
    let hi = ((b as f64 * (1.0 - alpha / 2.0)).ceil() as usize).clamp(1, b);
    (lo, hi)
}

/// Resamples each group with replacement at its own size `b` times and
/// takes the percentile interval of the replicate estimates.
///
/// Deterministic for a fixed seed: replicate `r` draws from its own RNG
/// stream, so results do not depend on scheduling or thread count.
pub fn bootstrap_percentile_ci(
    data: &MultiSampleDataset,
    level: f64,
    b: usize,
    seed: u64,
) -> Result<BootstrapCi> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    if b < 2 {
        return Err(Error::Invalid(format!(
            "bootstrap needs at least 2 replicates, got {b}"
        )));
    }
    let point = smoothed_theta(data, &bandwidths(data)?)?;

    let outcomes: Vec<(f64, usize)> = (0..b)
        .into_par_iter()
        .map(|r| replicate_estimate(data, seed, r))
        .collect::<Result<_>>()?;
    let replicates: Vec<f64> = outcomes.iter().map(|&(est, _)| est).collect();
    let retries: usize = outcomes.iter().map(|&(_, a)| a - 1).sum();

    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let (lo_rank, hi_rank) = percentile_ranks(b, level);
    let mut diagnostics = CiDiagnostics {
        iterations: b as u64,
        ..Default::default()
    };
    if retries > 0 {
        diagnostics.warn(format!(
            "{retries} zero-spread resamples were redrawn across replicates"
        ));
    }
    Ok(BootstrapCi {
        interval: ConfidenceInterval {
            method: CiMethod::KernelBootstrap,
            level,
            lower: sorted[lo_rank - 1],
            upper: sorted[hi_rank - 1],
            point_estimate: point,
            diagnostics,
        },
        replicates,
        b,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_dataset(seed: u64, sizes: [usize; 3]) -> MultiSampleDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups: Vec<Vec<Vec<f64>>> = sizes
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|_| vec![rng.random::<f64>(), rng.random::<f64>() * 2.0])
                    .collect()
            })
            .collect();
        MultiSampleDataset::from_rows(&groups).unwrap()
    }

    #[test]
    fn bandwidth_reference_value() {
        let h = silverman_bandwidth(&[0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(h, 0.29234906976362374, epsilon = 1e-12);
    }

    #[test]
    fn bandwidth_scale_equivariance() {
        let col = [0.3, 1.9, -0.4, 2.2, 0.8];
        let h = silverman_bandwidth(&col).unwrap();
        let scaled: Vec<f64> = col.iter().map(|&x| 7.5 * x).collect();
        let hs = silverman_bandwidth(&scaled).unwrap();
        assert_abs_diff_eq!(hs, 7.5 * h, epsilon = 1e-12);
    }

    #[test]
    fn constant_column_is_zero_spread() {
        assert!(matches!(
            silverman_bandwidth(&[2.0, 2.0, 2.0]),
            Err(Error::ZeroSpreadColumn)
        ));
    }

    #[test]
    fn identical_coordinates_cancel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let groups: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|_| {
                (0..6)
                    .map(|_| {
                        let v = rng.random::<f64>();
                        vec![v, v]
                    })
                    .collect()
            })
            .collect();
        let data = MultiSampleDataset::from_rows(&groups).unwrap();
        let bw = bandwidths(&data).unwrap();
        assert_abs_diff_eq!(smoothed_theta(&data, &bw).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_observation_symmetry() {
        let data = MultiSampleDataset::from_rows(&[
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0]],
        ])
        .unwrap();
        let bw = BandwidthSet::new([1.0; 6]).unwrap();
        assert_abs_diff_eq!(smoothed_theta(&data, &bw).unwrap(), 0.0, epsilon = 1e-15);
    }

    /// Direct triple-loop oracle for the separable evaluation.
    fn smoothed_theta_direct(data: &MultiSampleDataset, bw: &BandwidthSet) -> f64 {
        let h = bw.values();
        let mut total = KahanSum::new();
        for i in 0..data.group(0).n_rows() {
            for j in 0..data.group(1).n_rows() {
                for k in 0..data.group(2).n_rows() {
                    let x = data.group(0).row(i);
                    let y = data.group(1).row(j);
                    let z = data.group(2).row(k);
                    let a = normal_cdf((y[0] - x[0]) / (h[0].powi(2) + h[1].powi(2)).sqrt())
                        * normal_cdf((z[0] - y[0]) / (h[1].powi(2) + h[2].powi(2)).sqrt());
                    let b = normal_cdf((y[1] - x[1]) / (h[3].powi(2) + h[4].powi(2)).sqrt())
                        * normal_cdf((z[1] - y[1]) / (h[4].powi(2) + h[5].powi(2)).sqrt());
                    total.add(a - b);
                }
            }
        }
        total.value()
            / (data.group(0).n_rows() * data.group(1).n_rows() * data.group(2).n_rows()) as f64
    }

    #[test]
    fn separable_path_matches_triple_loop() {
        for seed in 0..10 {
            let data = random_dataset(seed, [3, 3, 3]);
            let bw = bandwidths(&data).unwrap();
            let fast = smoothed_theta(&data, &bw).unwrap();
            let slow = smoothed_theta_direct(&data, &bw);
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-10);
        }
    }

    #[test]
    fn estimate_stays_strictly_inside_unit_band() {
        let data = random_dataset(33, [8, 9, 7]);
        let bw = bandwidths(&data).unwrap();
        let theta = smoothed_theta(&data, &bw).unwrap();
        assert!(theta > -1.0 && theta < 1.0);
    }

    #[test]
    fn vanishing_bandwidths_recover_the_indicator_statistic() {
        let data = random_dataset(7, [12, 10, 11]);
        let bw = bandwidths(&data).unwrap().scaled(1e-6).unwrap();
        let smoothed = smoothed_theta(&data, &bw).unwrap();
        let kernel = crate::kernel::KernelSpec::builtin("vus-diff", 3).unwrap();
        let exact = crate::engine::u_statistic(&data, &kernel).unwrap();
        assert!((smoothed - exact).abs() < 1e-3, "{smoothed} vs {exact}");
    }

    #[test]
    fn bootstrap_is_deterministic_for_a_seed() {
        let data = random_dataset(9, [10, 10, 10]);
        let a = bootstrap_percentile_ci(&data, 0.95, 100, 77).unwrap();
        let b = bootstrap_percentile_ci(&data, 0.95, 100, 77).unwrap();
        assert_eq!(a.replicates, b.replicates);
        assert_eq!(a.interval.lower, b.interval.lower);
        assert_eq!(a.interval.upper, b.interval.upper);
        let c = bootstrap_percentile_ci(&data, 0.95, 100, 78).unwrap();
        assert_ne!(a.replicates, c.replicates);
    }

    #[test]
    fn percentile_ranks_match_convention_and_degenerate_lists() {
        assert_eq!(percentile_ranks(100, 0.95), (3, 98));
        assert_eq!(percentile_ranks(100, 0.90), (5, 95));
        assert_eq!(percentile_ranks(2, 0.95), (1, 2));
        // A constant replicate list collapses to a zero-width interval.
        let constant = vec![0.4; 100];
        let (lo, hi) = percentile_ranks(100, 0.95);
        assert_eq!(constant[lo - 1], constant[hi - 1]);
    }

    #[test]
    fn percentile_positions_are_order_statistics() {
        let data = random_dataset(4, [8, 8, 8]);
        let ci = bootstrap_percentile_ci(&data, 0.95, 100, 5).unwrap();
        let mut sorted = ci.replicates.clone();
        sorted.sort_by(f64::total_cmp);
        // ceil(100 * 0.025) = 3rd and ceil(100 * 0.975) = 98th order stats
        assert_eq!(ci.interval.lower, sorted[2]);
        assert_eq!(ci.interval.upper, sorted[97]);
        assert!(ci.interval.lower <= ci.interval.upper);
    }

    #[test]
    fn replicate_bandwidths_are_recomputed_not_frozen() {
        // One extreme row: resamples that multiply it change the replicate
        // spread, so a recomputed bandwidth must differ from the original.
        let mut rows: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![i as f64 / 10.0, 0.5 + i as f64 / 100.0])
            .collect();
        rows.push(vec![40.0, 0.9]);
        let data = MultiSampleDataset::from_rows(&[
            rows,
            (0..10)
                .map(|i| vec![1.0 + i as f64 / 10.0, 1.0 + i as f64 / 20.0])
                .collect(),
            (0..10)
                .map(|i| vec![2.0 + i as f64 / 10.0, 2.0 + i as f64 / 20.0])
                .collect(),
        ])
        .unwrap();
        let seed = 1234;
        let ci = bootstrap_percentile_ci(&data, 0.95, 8, seed).unwrap();

        let frozen = bandwidths(&data).unwrap();
        let mut any_bandwidth_changed = false;
        for r in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let resample = resample_dataset(&data, &mut rng);
            let recomputed = bandwidths(&resample).unwrap();
            // The recorded replicate must equal the recomputed-bandwidth
            // estimate on the same resample.
            let expected = smoothed_theta(&resample, &recomputed).unwrap();
            assert_abs_diff_eq!(ci.replicates[r], expected, epsilon = 1e-14);
            if recomputed != frozen {
                any_bandwidth_changed = true;
            }
        }
        assert!(any_bandwidth_changed);
    }
}

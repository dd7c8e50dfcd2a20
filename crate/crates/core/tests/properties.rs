//! Property tests for the engine and pseudo-value identities.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ujel_core::{
    combined_pseudo_values, ev_coefficients, jackknife_variance, jel, leave_one_out,
    u_statistic, KernelSpec, MultiSampleDataset,
};

fn group_strategy(q: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(-5.0f64..5.0, q..=q),
        2..=max_n,
    )
}

fn dataset_strategy(k: usize, q: usize, max_n: usize) -> impl Strategy<Value = MultiSampleDataset> {
    prop::collection::vec(group_strategy(q, max_n), k..=k)
        .prop_map(|groups| MultiSampleDataset::from_rows(&groups).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Counting path and a fresh per-deletion enumeration agree to 1e-12 on
    /// datasets up to n_g = 15.
    #[test]
    fn fast_path_matches_brute_force(data in dataset_strategy(3, 2, 15)) {
        let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
        let fast = leave_one_out(&data, &kernel).unwrap();
        let brute_u = common::brute_u(&data, &kernel);
        prop_assert!((fast.value - brute_u).abs() <= 1e-12);
        let brute_loo = common::brute_leave_one_out(&data, &kernel);
        for (a, b) in fast.leave_one_out.iter().zip(&brute_loo) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    /// Shuffling rows within one group leaves the statistic unchanged and
    /// permutes the leave-one-out entries correspondingly.
    #[test]
    fn within_group_permutation_invariance(
        data in dataset_strategy(3, 2, 10),
        seed in any::<u64>(),
    ) {
        let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
        let base = leave_one_out(&data, &kernel).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let shuffled: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|g| {
                let m = data.group(g);
                let mut idx: Vec<usize> = (0..m.n_rows()).collect();
                idx.shuffle(&mut rng);
                perms.push(idx.clone());
                idx.iter().map(|&i| m.row(i).to_vec()).collect()
            })
            .collect();
        let permuted = MultiSampleDataset::from_rows(&shuffled).unwrap();
        let shuffled_res = leave_one_out(&permuted, &kernel).unwrap();

        prop_assert!((base.value - shuffled_res.value).abs() <= 1e-12);
        let offsets = data.group_offsets();
        for g in 0..3 {
            for (new_i, &old_i) in perms[g].iter().enumerate() {
                let a = shuffled_res.leave_one_out[offsets[g] + new_i];
                let b = base.leave_one_out[offsets[g] + old_i];
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        // Variance is permutation invariant too.
        let pv_a = combined_pseudo_values(&base, kernel.degrees()).unwrap();
        let pv_b = combined_pseudo_values(&shuffled_res, kernel.degrees()).unwrap();
        let va = jackknife_variance(&pv_a).unwrap().sigma_hat_sq;
        let vb = jackknife_variance(&pv_b).unwrap().sigma_hat_sq;
        prop_assert!((va - vb).abs() <= 1e-12);
    }

    /// Difference kernels stay inside [-1, 1] and the combined pseudo-value
    /// mean reproduces the statistic.
    #[test]
    fn pseudo_value_identities(data in dataset_strategy(3, 2, 12)) {
        let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
        let res = leave_one_out(&data, &kernel).unwrap();
        prop_assert!((-1.0..=1.0).contains(&res.value));
        let pv = combined_pseudo_values(&res, kernel.degrees()).unwrap();
        let mean = pv.combined().iter().sum::<f64>() / pv.n_total() as f64;
        prop_assert!((mean - res.value).abs() <= 1e-10);
        for g in pv.group_pseudo() {
            let gm = g.iter().sum::<f64>() / g.len() as f64;
            prop_assert!((gm - res.value).abs() <= 1e-10);
        }
        let c_mean = pv.ev_coefficients().iter().sum::<f64>() / pv.n_total() as f64;
        prop_assert!((c_mean - 1.0).abs() <= 1e-12);
    }

    /// Coefficient mean stays one for arbitrary shapes and degrees.
    #[test]
    fn coefficient_mean_is_always_one(
        sizes in prop::collection::vec(2usize..14, 2..5),
        bump in prop::collection::vec(0usize..2, 2..5),
    ) {
        let k = sizes.len().min(bump.len());
        let sizes = &sizes[..k];
        let degrees: Vec<usize> = bump[..k]
            .iter()
            .zip(sizes)
            .map(|(&b, &n)| 1 + b.min(n.saturating_sub(2)))
            .collect();
        let n: usize = sizes.iter().sum();
        let m: usize = degrees.iter().sum();
        prop_assume!(n > m);
        let c = ev_coefficients(sizes, &degrees).unwrap();
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        prop_assert!((mean - 1.0).abs() <= 1e-12);
    }

    /// At every feasible trial value the maximizing weights form a
    /// probability vector satisfying the moment constraint.
    #[test]
    fn jel_weights_satisfy_constraints(
        data in dataset_strategy(3, 2, 10),
        offset in -0.8f64..0.8,
    ) {
        let kernel = KernelSpec::builtin("vus-diff", 3).unwrap();
        let res = leave_one_out(&data, &kernel).unwrap();
        let pv = combined_pseudo_values(&res, kernel.degrees()).unwrap();
        let sigma = jackknife_variance(&pv).unwrap().sigma_hat();
        prop_assume!(sigma > 1e-9);
        let theta = pv.u_value() + offset * sigma;
        match jel::evaluate(&pv, theta, true) {
            Ok(eval) => {
                let w = eval.weights.unwrap();
                let total: f64 = w.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-10);
                prop_assert!(w.iter().all(|&p| p > 0.0));
                let constraint: f64 = w
                    .iter()
                    .zip(pv.centered(theta))
                    .map(|(&p, d)| p * d)
                    .sum();
                prop_assert!(constraint.abs() <= 1e-8);
                prop_assert!(eval.minus_2_log_r >= -1e-10);
            }
            Err(ujel_core::Error::OutsideConvexHull { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    /// One-dimensional chain indicators on 4 groups: counting matches the
    /// generic enumeration.
    #[test]
    fn k_sample_prob_order_matches_brute(data in dataset_strategy(4, 1, 8)) {
        let kernel = KernelSpec::builtin("prob-order", 4).unwrap();
        let fast = u_statistic(&data, &kernel).unwrap();
        let brute = common::brute_u(&data, &kernel);
        prop_assert!((fast - brute).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fast));
    }
}

//! Shared data generation for the benchmark targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ujel_core::{Matrix, MobveParams, MultiSampleDataset};

/// Uniform bivariate groups of the given sizes.
pub fn uniform_dataset(seed: u64, sizes: &[usize]) -> MultiSampleDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Vec<Vec<f64>>> = sizes
        .iter()
        .map(|&n| {
            (0..n)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect()
        })
        .collect();
    MultiSampleDataset::from_rows(&groups).unwrap()
}

/// Symmetric exponential-model draw at the given sizes.
pub fn mobve_dataset(seed: u64, sizes: &[usize]) -> MultiSampleDataset {
    let params = MobveParams::new(1.0, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<Matrix> = sizes.iter().map(|&n| params.sample(n, &mut rng)).collect();
    MultiSampleDataset::new(groups).unwrap()
}

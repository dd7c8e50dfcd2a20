//! Bivariate Pareto sampler with Farlie-Gumbel-Morgenstern dependence.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::sim::Marginal;

/// Two Pareto marginals `1 - (scale/x)^shape` coupled by an FGM copula with
/// dependence parameter in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgmParetoParams {
    pub scale1: f64,
    pub scale2: f64,
    pub shape1: f64,
    pub shape2: f64,
    pub dependence: f64,
}

impl FgmParetoParams {
    pub fn new(
        scale1: f64,
        scale2: f64,
        shape1: f64,
        shape2: f64,
        dependence: f64,
    ) -> Result<Self> {
        let p = Self {
            scale1,
            scale2,
            shape1,
            shape2,
            dependence,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("scale1", self.scale1),
            ("scale2", self.scale2),
            ("shape1", self.shape1),
            ("shape2", self.shape2),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "fgm-pareto {name} must be a finite positive number, got {v}"
                )));
            }
        }
        if self.dependence.is_nan() || self.dependence.abs() > 1.0 {
            return Err(Error::InvalidParams(format!(
                "fgm-pareto dependence must lie in [-1, 1], got {}",
                self.dependence
            )));
        }
        Ok(())
    }

    /// Conditional inversion: given the first uniform `u`, the second
    /// conditional CDF is `v (1 + a (1 - v))` with `a = dependence (1 - 2u)`,
    /// a quadratic solved with the root form `2w / (1 + a + sqrt(...))` that
    /// stays stable as `a` approaches zero. Uniforms are then pushed through
    /// the Pareto quantile functions.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Matrix {
        let mut data = Vec::with_capacity(n * 2);
        for _ in 0..n {
            let u: f64 = rng.random();
            let w: f64 = rng.random();
            let a = self.dependence * (1.0 - 2.0 * u);
            let disc = (1.0 + a) * (1.0 + a) - 4.0 * a * w;
            let v = 2.0 * w / (1.0 + a + disc.sqrt());
            data.push(self.scale1 * (1.0 - u).powf(-1.0 / self.shape1));
            data.push(self.scale2 * (1.0 - v).powf(-1.0 / self.shape2));
        }
        Matrix::from_flat(n, 2, data).expect("row-major buffer sized to n x 2")
    }

    pub fn coordinate_marginal(&self, coord: usize) -> Marginal {
        match coord {
            0 => Marginal::Pareto {
                scale: self.scale1,
                shape: self.shape1,
            },
            _ => Marginal::Pareto {
                scale: self.scale2,
                shape: self.shape2,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ks_distance_pareto(col: &mut [f64], scale: f64, shape: f64) -> f64 {
        col.sort_by(f64::total_cmp);
        let n = col.len() as f64;
        let mut sup: f64 = 0.0;
        for (i, &x) in col.iter().enumerate() {
            let f = 1.0 - (scale / x).powf(shape);
            sup = sup
                .max((f - i as f64 / n).abs())
                .max(((i as f64 + 1.0) / n - f).abs());
        }
        sup
    }

    fn spearman(a: &[f64], b: &[f64]) -> f64 {
        let rank = |xs: &[f64]| {
            let mut order: Vec<usize> = (0..xs.len()).collect();
            order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
            let mut ranks = vec![0.0; xs.len()];
            for (r, &i) in order.iter().enumerate() {
                ranks[i] = r as f64;
            }
            ranks
        };
        let (ra, rb) = (rank(a), rank(b));
        let n = a.len() as f64;
        let mean = (n - 1.0) / 2.0;
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for i in 0..a.len() {
            cov += (ra[i] - mean) * (rb[i] - mean);
            va += (ra[i] - mean).powi(2);
            vb += (rb[i] - mean).powi(2);
        }
        cov / (va.sqrt() * vb.sqrt())
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FgmParetoParams::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(FgmParetoParams::new(1.0, 1.0, -2.0, 1.0, 0.0).is_err());
        assert!(FgmParetoParams::new(1.0, 1.0, 1.0, 1.0, 1.5).is_err());
        assert!(FgmParetoParams::new(1.0, 1.0, 1.0, 1.0, -1.0).is_ok());
    }

    #[test]
    fn independent_case_matches_pareto_marginals() {
        let p = FgmParetoParams::new(1.0, 2.0, 3.0, 1.5, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 10_000;
        let m = p.sample(n, &mut rng);
        // 5% Kolmogorov-Smirnov band 1.36/sqrt(n) for each marginal.
        let band = 1.36 / (n as f64).sqrt();
        let d0 = ks_distance_pareto(&mut m.column(0), 1.0, 3.0);
        let d1 = ks_distance_pareto(&mut m.column(1), 2.0, 1.5);
        assert!(d0 < band, "ks col0 {d0} vs band {band}");
        assert!(d1 < band, "ks col1 {d1} vs band {band}");
    }

    #[test]
    fn shape_three_mean() {
        let p = FgmParetoParams::new(1.0, 1.0, 3.0, 3.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let m = p.sample(n, &mut rng);
        let mean: f64 = m.column(0).iter().sum::<f64>() / n as f64;
        // Pareto(1, 3): mean 3/2, variance 3/4.
        let band = 3.0 * (0.75f64 / n as f64).sqrt();
        assert!((mean - 1.5).abs() < band, "mean {mean}");
    }

    #[test]
    fn dependence_reaches_the_fgm_rank_correlation() {
        // FGM rank correlation is dependence/3 at the extremes.
        let n = 10_000;
        for (dep, target) in [(1.0, 1.0 / 3.0), (-1.0, -1.0 / 3.0)] {
            let p = FgmParetoParams::new(1.0, 1.0, 2.0, 2.0, dep).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let m = p.sample(n, &mut rng);
            let rho = spearman(&m.column(0), &m.column(1));
            let band = 3.0 / (n as f64).sqrt();
            assert!((rho - target).abs() < band, "dep {dep}: rho {rho}");
        }
    }
}

//! Marshall-Olkin bivariate exponential sampler.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::sim::Marginal;

/// Rates of the two individual shocks and the shared shock.
///
/// Both marginals are exponential: coordinate one with rate
/// `rate1 + shared`, coordinate two with rate `rate2 + shared`; the shared
/// shock puts positive mass on exactly equal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobveParams {
    pub rate1: f64,
    pub rate2: f64,
    pub shared: f64,
}

impl MobveParams {
    pub fn new(rate1: f64, rate2: f64, shared: f64) -> Result<Self> {
        let p = Self {
            rate1,
            rate2,
            shared,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rate1", self.rate1),
            ("rate2", self.rate2),
            ("shared", self.shared),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "mobve {name} must be a finite nonnegative rate, got {v}"
                )));
            }
        }
        if self.rate1 + self.shared <= 0.0 || self.rate2 + self.shared <= 0.0 {
            return Err(Error::InvalidParams(
                "mobve marginal rates must be positive: rate1+shared and rate2+shared".into(),
            ));
        }
        Ok(())
    }

    /// Componentwise minima of three independent exponential shocks; a zero
    /// rate means the shock never fires.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Matrix {
        let mut data = Vec::with_capacity(n * 2);
        for _ in 0..n {
            let e1 = exp_draw(self.rate1, rng);
            let e2 = exp_draw(self.rate2, rng);
            let e3 = exp_draw(self.shared, rng);
            data.push(e1.min(e3));
            data.push(e2.min(e3));
        }
        Matrix::from_flat(n, 2, data).expect("row-major buffer sized to n x 2")
    }

    pub fn coordinate_marginal(&self, coord: usize) -> Marginal {
        let rate = match coord {
            0 => self.rate1 + self.shared,
            _ => self.rate2 + self.shared,
        };
        Marginal::Exponential { rate }
    }
}

#[inline]
fn exp_draw<R: Rng>(rate: f64, rng: &mut R) -> f64 {
    if rate > 0.0 {
        let u: f64 = rng.random();
        -(-u).ln_1p() / rate
    } else {
        f64::INFINITY
    }
}

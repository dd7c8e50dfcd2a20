//! Jackknife pseudo-values for multi-sample U-statistics: per-group
//! pseudo-values, pooled (combined-sample) pseudo-values, their expectation
//! coefficients, and the pseudo-value variance estimator.

use crate::engine::UStatResult;
use crate::error::{Error, Result};
use crate::numeric::{kahan_mean, KahanSum};

/// Combined-sample jackknife pseudo-values along with everything empirical
/// likelihood needs to form a mean-type constraint for any trial parameter.
#[derive(Debug, Clone)]
pub struct PseudoValueSet {
    /// Pooled pseudo-values `V_l`, groups concatenated in order.
    combined: Vec<f64>,
    /// Per-group pseudo-values from single-group deletion.
    group_pseudo: Vec<Vec<f64>>,
    /// Coefficients `c_l` with `E[V_l] = theta * c_l`.
    ev_coefficients: Vec<f64>,
    u_value: f64,
    group_sizes: Vec<usize>,
    degrees: Vec<usize>,
}

impl PseudoValueSet {
    pub fn combined(&self) -> &[f64] {
        &self.combined
    }

    pub fn group_pseudo(&self) -> &[Vec<f64>] {
        &self.group_pseudo
    }

    pub fn ev_coefficients(&self) -> &[f64] {
        &self.ev_coefficients
    }

    pub fn u_value(&self) -> f64 {
        self.u_value
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_total(&self) -> usize {
        self.combined.len()
    }

    /// Centered constraint terms `V_l - theta * c_l` for a trial parameter.
    pub fn centered(&self, theta: f64) -> Vec<f64> {
        self.combined
            .iter()
            .zip(&self.ev_coefficients)
            .map(|(&v, &c)| v - theta * c)
            .collect()
    }

    /// Mean squared centered pseudo-value at a trial parameter; consistency
    /// diagnostic against `n` times the variance estimator.
    pub fn s_n_sq(&self, theta: f64) -> f64 {
        let mut acc = KahanSum::new();
        for (&v, &c) in self.combined.iter().zip(&self.ev_coefficients) {
            let d = v - theta * c;
            acc.add(d * d);
        }
        acc.value() / self.combined.len() as f64
    }
}

/// Pseudo-value variance estimator and its per-group components.
#[derive(Debug, Clone)]
pub struct JackknifeVariance {
    pub sigma_hat_sq: f64,
    pub per_group_terms: Vec<f64>,
}

impl JackknifeVariance {
    pub fn sigma_hat(&self) -> f64 {
        self.sigma_hat_sq.sqrt()
    }
}

/// Expectation coefficients `c_l` of the combined pseudo-values, pooled
/// order: for an observation in group `g`,
/// `c = n/(n-m) * [n - m - (n-1)(n_g - m_g)/n_g]`.
///
/// Their average is exactly 1, and they are all 1 when sizes and degrees
/// are equal across groups.
pub fn ev_coefficients(sizes: &[usize], degrees: &[usize]) -> Result<Vec<f64>> {
    if sizes.len() != degrees.len() {
        return Err(Error::Invalid(format!(
            "{} group sizes but {} degrees",
            sizes.len(),
            degrees.len()
        )));
    }
    let n: usize = sizes.iter().sum();
    let m: usize = degrees.iter().sum();
    if n <= m {
        return Err(Error::PooledDegreeTooLarge { n, m });
    }
    for (g, (&ng, &mg)) in sizes.iter().zip(degrees).enumerate() {
        if ng <= mg {
            return Err(Error::GroupTooSmall {
                group: g,
                needed: mg + 1,
                size: ng,
            });
        }
    }
    let nf = n as f64;
    let mf = m as f64;
    let mut out = Vec::with_capacity(n);
    for (&ng, &mg) in sizes.iter().zip(degrees) {
        let c = nf / (nf - mf)
            * ((nf - mf) - (nf - 1.0) * (ng as f64 - mg as f64) / ng as f64);
        out.extend(std::iter::repeat(c).take(ng));
    }
    Ok(out)
}

/// Per-group pseudo-values `n_g * U - (n_g - 1) * U(without observation)`.
pub fn group_pseudo_values(ustat: &UStatResult) -> Vec<Vec<f64>> {
    let sizes = ustat.group_sizes();
    sizes
        .iter()
        .enumerate()
        .map(|(g, &ng)| {
            ustat
                .group_leave_one_out(g)
                .iter()
                .map(|&loo| ng as f64 * ustat.value - (ng as f64 - 1.0) * loo)
                .collect()
        })
        .collect()
}

/// Combined-sample pseudo-values `V_l = n * U - (n - 1) * U_pooled(-l)`.
///
/// The pooled single-deletion statistic never needs its own enumeration:
/// deleting observation `l` of group `g` scales the group-deletion value by
/// `rho_g = n (n_g - m_g) / ((n - m) n_g)`, the ratio of the surviving
/// combination counts. This turns the pooled construction into O(n) scalar
/// work after [`crate::engine::leave_one_out`].
pub fn combined_pseudo_values(
    ustat: &UStatResult,
    degrees: &[usize],
) -> Result<PseudoValueSet> {
    let sizes = ustat.group_sizes();
    let ev = ev_coefficients(&sizes, degrees)?;
    let n: usize = sizes.iter().sum();
    let m: usize = degrees.iter().sum();
    let nf = n as f64;
    let mf = m as f64;

    let mut combined = Vec::with_capacity(n);
    for (g, &ng) in sizes.iter().enumerate() {
        let rho = nf * (ng as f64 - degrees[g] as f64) / ((nf - mf) * ng as f64);
        for &loo in ustat.group_leave_one_out(g) {
            combined.push(nf * ustat.value - (nf - 1.0) * rho * loo);
        }
    }

    Ok(PseudoValueSet {
        combined,
        group_pseudo: group_pseudo_values(ustat),
        ev_coefficients: ev,
        u_value: ustat.value,
        group_sizes: sizes,
        degrees: degrees.to_vec(),
    })
}

/// Variance estimator summing per-group pseudo-value spreads, each scaled by
/// `1 / (n_g (n_g - 1))`.
pub fn jackknife_variance(pv: &PseudoValueSet) -> Result<JackknifeVariance> {
    let mut per_group_terms = Vec::with_capacity(pv.group_pseudo.len());
    let mut total = KahanSum::new();
    for (g, values) in pv.group_pseudo.iter().enumerate() {
        let ng = values.len();
        if ng < 2 {
            return Err(Error::GroupTooSmall {
                group: g,
                needed: 2,
                size: ng,
            });
        }
        let mean = kahan_mean(values);
        let mut ss = KahanSum::new();
        for &v in values {
            let d = v - mean;
            ss.add(d * d);
        }
        let term = ss.value() / (ng as f64 * (ng as f64 - 1.0));
        per_group_terms.push(term);
        total.add(term);
    }
    Ok(JackknifeVariance {
        sigma_hat_sq: total.value(),
        per_group_terms,
    })
}

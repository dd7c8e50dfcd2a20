//! Jackknife empirical likelihood: the Lagrange-multiplier equation, the
//! log-likelihood ratio, and its inversion into a chi-square calibrated
//! confidence interval.

use crate::error::{Error, Result};
use crate::interval::{CiDiagnostics, CiMethod, ConfidenceInterval};
use crate::jackknife::{jackknife_variance, PseudoValueSet};
use crate::numeric::{chi_square_quantile_1df, KahanSum};

const LAMBDA_RESIDUAL_TOL: f64 = 1e-10;
const MAX_NEWTON_ITER: u64 = 100;
const MAX_BISECT_ITER: u64 = 200;
const THETA_TOL: f64 = 1e-8;
/// Outward scan step, in units of the estimated standard deviation.
const SCAN_STEP_SIGMA: f64 = 0.5;
const MAX_SCAN_STEPS: usize = 4000;

/// One evaluation of the empirical likelihood machinery at a trial `theta`.
#[derive(Debug, Clone)]
pub struct JelEvaluation {
    pub theta: f64,
    pub lambda: f64,
    pub log_r: f64,
    pub minus_2_log_r: f64,
    /// Maximizing probability weights, populated on request.
    pub weights: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: u64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct LambdaSolution {
    lambda: f64,
    iterations: u64,
    residual: f64,
}

/// Mean constraint value and its derivative in the multiplier.
fn constraint_and_slope(d: &[f64], lambda: f64) -> (f64, f64) {
    let mut g = KahanSum::new();
    let mut slope = KahanSum::new();
    for &di in d {
        let denom = 1.0 + lambda * di;
        let t = di / denom;
        g.add(t);
        slope.add(-t * t);
    }
    let n = d.len() as f64;
    (g.value() / n, slope.value() / n)
}

/// Solves the multiplier equation `mean(d_i / (1 + lambda d_i)) = 0` for
/// centered terms `d_i`.
///
/// The solution is unique on `(-1/max d, -1/min d)` where the constraint is
/// strictly decreasing; safeguarded Newton with a bisection fallback keeps
/// every iterate inside that bracket. Requires `min d < 0 < max d`.
fn solve_lambda_centered(d: &[f64], theta_for_error: f64) -> Result<LambdaSolution> {
    let (dmin, dmax) = d
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !(dmin < 0.0 && dmax > 0.0) {
        return Err(Error::OutsideConvexHull {
            theta: theta_for_error,
        });
    }
    // Open bracket, shrunk relatively so every log argument stays positive.
    let mut lo = (-1.0 / dmax) * (1.0 - 1e-12);
    let mut hi = (-1.0 / dmin) * (1.0 - 1e-12);
    let mut lambda = 0.0;
    let mut iterations = 0u64;
    let mut residual = f64::INFINITY;

    for _ in 0..MAX_NEWTON_ITER {
        let (g, slope) = constraint_and_slope(d, lambda);
        iterations += 1;
        residual = g.abs();
        if residual <= LAMBDA_RESIDUAL_TOL {
            return Ok(LambdaSolution {
                lambda,
                iterations,
                residual,
            });
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - g / slope;
        lambda = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    for _ in 0..MAX_BISECT_ITER {
        let (g, _) = constraint_and_slope(d, lambda);
        iterations += 1;
        residual = g.abs();
        if residual <= LAMBDA_RESIDUAL_TOL || hi - lo <= f64::EPSILON * lambda.abs().max(1.0) {
            return Ok(LambdaSolution {
                lambda,
                iterations,
                residual,
            });
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        lambda = 0.5 * (lo + hi);
    }
    Err(Error::NoConvergence {
        iterations,
        residual,
    })
}

/// Solves the multiplier equation at a trial parameter.
pub fn solve_lambda(pv: &PseudoValueSet, theta: f64) -> Result<f64> {
    let d = pv.centered(theta);
    Ok(solve_lambda_centered(&d, theta)?.lambda)
}

/// Test-support entry point: solve directly for given centered terms.
pub fn solve_lambda_for_terms(d: &[f64]) -> Result<f64> {
    Ok(solve_lambda_centered(d, f64::NAN)?.lambda)
}

/// Evaluates the log likelihood ratio at `theta`, optionally materializing
/// the maximizing weights.
pub fn evaluate(pv: &PseudoValueSet, theta: f64, with_weights: bool) -> Result<JelEvaluation> {
    let d = pv.centered(theta);
    let sol = solve_lambda_centered(&d, theta)?;
    let n = d.len() as f64;
    let mut log_sum = KahanSum::new();
    for &di in &d {
        let arg = sol.lambda * di;
        // Inside the solver bracket 1 + lambda d_i is strictly positive.
        assert!(arg > -1.0, "log argument out of range");
        log_sum.add(arg.ln_1p());
    }
    let weights = with_weights.then(|| {
        d.iter()
            .map(|&di| 1.0 / (n * (1.0 + sol.lambda * di)))
            .collect()
    });
    let minus_2_log_r = 2.0 * log_sum.value();
    Ok(JelEvaluation {
        theta,
        lambda: sol.lambda,
        log_r: -log_sum.value(),
        minus_2_log_r,
        weights,
        converged: sol.residual <= LAMBDA_RESIDUAL_TOL,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

/// Log likelihood ratio at `theta` (weights omitted).
pub fn log_jel_ratio(pv: &PseudoValueSet, theta: f64) -> Result<JelEvaluation> {
    evaluate(pv, theta, false)
}

struct Inverter<'a> {
    pv: &'a PseudoValueSet,
    iterations: u64,
    residual: f64,
}

impl<'a> Inverter<'a> {
    /// `-2 log R(theta)`, or `None` when `theta` is infeasible.
    fn eval(&mut self, theta: f64) -> Result<Option<f64>> {
        match evaluate(self.pv, theta, false) {
            Ok(e) => {
                self.iterations += e.iterations;
                self.residual = self.residual.max(e.residual);
                Ok(Some(e.minus_2_log_r))
            }
            Err(Error::OutsideConvexHull { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn is_feasible(&self, theta: f64) -> bool {
        let d = self.pv.centered(theta);
        let (dmin, dmax) = d
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        dmin < 0.0 && dmax > 0.0
    }
}

/// Inverts the likelihood ratio into the set where `-2 log R` stays below
/// the chi-square(1) quantile, reported as an interval.
///
/// The ratio vanishes at the point estimate (where the centered constraint
/// sums to zero), so the inversion scans outward from there in half-sigma
/// steps, brackets the crossing on each side, and bisects. If the cut level
/// extends past the feasible parameter range, the endpoint is truncated at
/// the feasibility boundary and flagged.
pub fn jel_confidence_interval(
    pv: &PseudoValueSet,
    level: f64,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let cut = chi_square_quantile_1df(level)?;
    let sigma = jackknife_variance(pv)?.sigma_hat();
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::DegenerateSpread);
    }

    let mut inv = Inverter {
        pv,
        iterations: 0,
        residual: 0.0,
    };
    let mut diagnostics = CiDiagnostics::default();

    let mut center = pv.u_value();
    let f_center = inv
        .eval(center)?
        .ok_or(Error::DegenerateSpread)?;
    if f_center > 1e-7 {
        // The ratio should vanish at the point estimate up to rounding;
        // chase the minimizer if it does not.
        diagnostics.warn(format!(
            "likelihood ratio at the point estimate is {f_center:.3e}; refining minimizer"
        ));
        center = golden_minimize(&mut inv, center, sigma)?;
        let refined = inv.eval(center)?.ok_or(Error::DegenerateSpread)?;
        if refined > cut {
            return Err(Error::Invalid(format!(
                "minimum of -2 log R is {refined:.6}, above the level-{level} cut {cut:.6}"
            )));
        }
    }

    let lower = scan_and_bisect(&mut inv, center, sigma, cut, -1.0, &mut diagnostics)?;
    let upper = scan_and_bisect(&mut inv, center, sigma, cut, 1.0, &mut diagnostics)?;

    diagnostics.iterations = inv.iterations;
    diagnostics.residual = inv.residual;
    Ok(ConfidenceInterval {
        method: CiMethod::Jel,
        level,
        lower,
        upper,
        point_estimate: pv.u_value(),
        diagnostics,
    })
}

/// Walks outward from the minimizer until the ratio crosses the cut (or the
/// feasible range ends), then bisects the crossing to absolute tolerance.
fn scan_and_bisect(
    inv: &mut Inverter,
    center: f64,
    sigma: f64,
    cut: f64,
    direction: f64,
    diagnostics: &mut CiDiagnostics,
) -> Result<f64> {
    let step = SCAN_STEP_SIGMA * sigma * direction;
    let mut inside = center;
    let mut f_prev = 0.0;
    let mut warned_monotone = false;

    for j in 1..=MAX_SCAN_STEPS {
        let theta = center + step * j as f64;
        match inv.eval(theta)? {
            Some(f) => {
                if f > cut {
                    return bisect_crossing(inv, inside, theta, cut);
                }
                if f < f_prev - 1e-9 && !warned_monotone {
                    diagnostics.warn(format!(
                        "non-monotone likelihood ratio detected while scanning {} of the estimate",
                        if direction < 0.0 { "left" } else { "right" }
                    ));
                    warned_monotone = true;
                }
                f_prev = f;
                inside = theta;
            }
            None => {
                // Crossed the feasibility boundary; locate it, then decide
                // whether the cut is reached before it.
                let boundary = bisect_feasibility(inv, inside, theta);
                match inv.eval(boundary)? {
                    Some(f) if f > cut => {
                        return bisect_crossing(inv, inside, boundary, cut);
                    }
                    _ => {
                        diagnostics.warn(format!(
                            "{} endpoint truncated at the feasibility boundary {boundary}",
                            if direction < 0.0 { "lower" } else { "upper" }
                        ));
                        return Ok(boundary);
                    }
                }
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: inv.iterations,
        residual: f64::INFINITY,
    })
}

/// Bisection for `-2 log R = cut` between a point below and a point above.
fn bisect_crossing(inv: &mut Inverter, mut inside: f64, mut outside: f64, cut: f64) -> Result<f64> {
    for _ in 0..MAX_BISECT_ITER {
        if (outside - inside).abs() <= THETA_TOL {
            break;
        }
        let mid = 0.5 * (inside + outside);
        match inv.eval(mid)? {
            Some(f) if f <= cut => inside = mid,
            // Infeasible midpoints are treated as beyond the cut.
            _ => outside = mid,
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Last feasible point between a feasible and an infeasible theta.
fn bisect_feasibility(inv: &Inverter, mut feasible: f64, mut infeasible: f64) -> f64 {
    for _ in 0..100 {
        if (infeasible - feasible).abs() <= THETA_TOL * 1e-2 {
            break;
        }
        let mid = 0.5 * (feasible + infeasible);
        if inv.is_feasible(mid) {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    feasible
}

/// Golden-section minimizer of the ratio on an expanding bracket around a
/// starting point. Only exercised when the ratio fails to vanish at the
/// point estimate.
fn golden_minimize(inv: &mut Inverter, start: f64, sigma: f64) -> Result<f64> {
    let eval_or_inf = |inv: &mut Inverter, t: f64| -> Result<f64> {
        Ok(inv.eval(t)?.unwrap_or(f64::INFINITY))
    };
    let mut half = sigma;
    let (mut a, mut b) = (start - half, start + half);
    for _ in 0..60 {
        let fa = eval_or_inf(inv, a)?;
        let fm = eval_or_inf(inv, start)?;
        let fb = eval_or_inf(inv, b)?;
        if fm <= fa && fm <= fb {
            break;
        }
        half *= 2.0;
        a = start - half;
        b = start + half;
    }
    let phi = 0.5 * (3.0 - 5f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = eval_or_inf(inv, x1)?;
    let mut f2 = eval_or_inf(inv, x2)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-10 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = eval_or_inf(inv, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = eval_or_inf(inv, x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

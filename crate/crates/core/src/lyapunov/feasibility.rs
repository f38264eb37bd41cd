//! Admissible `(θ, σ)`: `θ > A₁₂` and
//! `(θ² − A₁₂²)(θ²σ² − A₁₃²) > (A₂₃θ² − A₁₂A₁₃)²`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::DiffusionTriple;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exact decision of both strict inequalities for rational `θ, σ`.
///
/// Only `A_ij²` are rational, so the cross term `2θ²A₁₂A₁₃A₂₃` is handled by
/// squaring: with `X` the rational part, `X + 2θ²√Q > 0` where
/// `Q = A₁₂²A₁₃²A₂₃² ≥ 1`.
pub fn theta_sigma_feasible(d: &DiffusionTriple, theta: &Rational, sigma: &Rational) -> bool {
    if !theta.is_positive() || !sigma.is_positive() {
        return false;
    }
    let a12 = d.a_squared(1, 2);
    let a13 = d.a_squared(1, 3);
    let a23 = d.a_squared(2, 3);
    let t2 = theta * theta;
    let s2 = sigma * sigma;
    if t2 <= a12 {
        return false;
    }
    let lhs = (&t2 - &a12) * (&t2 * &s2 - &a13);
    let x = lhs - &a23 * &t2 * &t2 - &a12 * &a13;
    if !x.is_negative() {
        return true;
    }
    let q = &a12 * &a13 * &a23;
    rational::int(4) * &t2 * &t2 * q > &x * &x
}

/// Floating-point version used inside searches.
pub fn theta_sigma_feasible_f64(d: &DiffusionTriple, theta: f64, sigma: f64) -> bool {
    let (a12, a13, a23) = (d.a(1, 2), d.a(1, 3), d.a(2, 3));
    let t2 = theta * theta;
    if !(theta > a12) {
        return false;
    }
    let rhs = a23 * t2 - a12 * a13;
    (t2 - a12 * a12) * (t2 * sigma * sigma - a13 * a13) > rhs * rhs
}

/// Pairs are pushed this far inside the feasible region.
pub const MARGIN_FACTOR: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    /// Number of log-grid points `θ_k = A₁₂·1.1^k`.
    pub grid_steps: u32,
    pub bisection_iters: u32,
    /// Upper bracket for `σ` before the search gives up.
    pub sigma_max: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { grid_steps: 40, bisection_iters: 200, sigma_max: 1e6 }
    }
}

/// Infimum of feasible `σ` at fixed `θ > A₁₂`, by bisection on the predicate.
pub fn infimum_sigma(d: &DiffusionTriple, theta: f64, budget: &SearchBudget) -> Option<f64> {
    if !(theta > d.a(1, 2)) {
        return None;
    }
    let mut hi = 1.0;
    while !theta_sigma_feasible_f64(d, theta, hi) {
        hi *= 2.0;
        if hi > budget.sigma_max {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..budget.bisection_iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if theta_sigma_feasible_f64(d, theta, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Rounds to six decimals, then steps up by `10⁻⁶` until `accept` holds.
fn round_up_until(x: f64, accept: impl Fn(&Rational) -> bool) -> Option<Rational> {
    let unit = rational::ratio(1, 1_000_000);
    let mut q = rational::parse(&format!("{:.6}", x)).ok()?;
    for _ in 0..1000 {
        if accept(&q) {
            return Some(q);
        }
        q += &unit;
    }
    None
}

/// Admissible `(θ, σ)` with the smallest product `θσ` over the log grid
/// `θ_k = A₁₂·1.1^k`, where each `σ` is `1.1` times the bisected infimum.
/// Both values are six-decimal rationals and pass [`theta_sigma_feasible`].
pub fn find_theta_sigma(d: &DiffusionTriple, budget: &SearchBudget) -> Result<(Rational, Rational)> {
    let a12 = d.a(1, 2);
    let a12_sq = d.a_squared(1, 2);
    let mut best: Option<(Rational, Rational, Rational)> = None;
    for k in 1..=budget.grid_steps {
        let theta_f = a12 * MARGIN_FACTOR.powi(k as i32);
        let Some(theta) = round_up_until(theta_f, |t| t * t > a12_sq) else { continue };
        let theta_f = rational::to_f64(&theta);
        let Some(sigma_inf) = infimum_sigma(d, theta_f, budget) else { continue };
        let Some(sigma) = round_up_until(MARGIN_FACTOR * sigma_inf, |s| theta_sigma_feasible(d, &theta, s)) else {
            continue;
        };
        let product = &theta * &sigma;
        if best.as_ref().is_none_or(|(_, _, p)| product < *p) {
            best = Some((theta, sigma, product));
        }
    }
    match best {
        Some((t, s, p)) if !p.is_zero() => Ok((t, s)),
        _ => Err(Error::SearchFailed(format!(
            "no admissible pair within {} grid steps and sigma <= {}",
            budget.grid_steps, budget.sigma_max
        ))),
    }
}

use serde::{Deserialize, Serialize};

use super::{find_theta_sigma, DiffusionTriple, SearchBudget, Variant};
use crate::checker::{Branch, IwscWeights};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Smallest integer strictly greater than `m(N+2)/2`.
pub fn compute_p(m: u32, space_dim: u32) -> Result<u32> {
    if m < 1 || space_dim < 1 {
        return Err(Error::invalid("m and N must be at least 1"));
    }
    Ok(m * (space_dim + 2) / 2 + 1)
}

/// Which global-existence statement a parameter set serves. Theorem 1 takes
/// weights above its thresholds, Theorem 2 weights below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Theorem {
    One,
    Two,
}

impl TryFrom<u8> for Theorem {
    type Error = Error;
    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Theorem::One),
            2 => Ok(Theorem::Two),
            _ => Err(Error::invalid(format!("theorem must be 1 or 2, got {n}"))),
        }
    }
}

impl From<Theorem> for u8 {
    fn from(t: Theorem) -> u8 {
        match t {
            Theorem::One => 1,
            Theorem::Two => 2,
        }
    }
}

impl Theorem {
    pub fn variant(self) -> Variant {
        match self {
            Theorem::One => Variant::Thm1,
            Theorem::Two => Variant::Thm2,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Theorem::One => Branch::Above1,
            Theorem::Two => Branch::Below1,
        }
    }

    pub fn for_branch(b: Branch) -> Theorem {
        match b {
            Branch::Above1 => Theorem::One,
            Branch::Below1 => Theorem::Two,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub theorem: Theorem,
    pub m: u32,
    pub space_dim: u32,
    pub p: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub theta: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub sigma: Rational,
    /// `θ^(2(p-1))` for theorem 1 (lower bound on λ₁), `θ^(-2p)` for theorem 2 (upper bound).
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda1_threshold: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda2_threshold: Rational,
    pub thresholds_f64: [f64; 2],
}

impl TheoremParams {
    /// Whether `weights` sit on the admissible side of both thresholds.
    pub fn admits(&self, weights: &IwscWeights) -> bool {
        match self.theorem {
            Theorem::One => {
                weights.lambda1() >= &self.lambda1_threshold && weights.lambda2() >= &self.lambda2_threshold
            }
            Theorem::Two => {
                weights.lambda1() <= &self.lambda1_threshold && weights.lambda2() <= &self.lambda2_threshold
            }
        }
    }

    /// The thresholds themselves as weights, the least demanding admissible choice.
    pub fn threshold_weights(&self) -> Result<IwscWeights> {
        IwscWeights::new(self.lambda1_threshold.clone(), self.lambda2_threshold.clone())
    }
}

pub fn theorem_params(
    theorem: Theorem,
    d: &DiffusionTriple,
    m: u32,
    space_dim: u32,
    budget: &SearchBudget,
) -> Result<TheoremParams> {
    let p = compute_p(m, space_dim)?;
    let (theta, sigma) = find_theta_sigma(d, budget)?;
    let exponent = match theorem {
        Theorem::One => 2 * (p as i64 - 1),
        Theorem::Two => -2 * p as i64,
    };
    let l1 = rational::pow(&theta, exponent);
    let l2 = rational::pow(&sigma, exponent);
    Ok(TheoremParams {
        theorem,
        m,
        space_dim,
        p,
        thresholds_f64: [rational::to_f64(&l1), rational::to_f64(&l2)],
        theta,
        sigma,
        lambda1_threshold: l1,
        lambda2_threshold: l2,
    })
}

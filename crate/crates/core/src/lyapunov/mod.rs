//! `L^p`-energy polynomials and the parameter rules that make them Lyapunov
//! functionals.
//!
//! The energy is the homogeneous polynomial
//!
//! ```text
//! Ĥ_p(u,v,w) = Σ_{j=0}^{p} Σ_{i=0}^{j} C(p,j) C(j,i) θ_i σ_j u^i v^(j-i) w^(p-j)
//! ```
//!
//! with `θ_i = θ^(i²-i)`, `σ_j = σ^(j²-j)` for the first variant and
//! `θ_i = θ^((p-i)²-i)`, `σ_j = σ^((p-j)²-j)` for the second. Everything here
//! is stated in `(u, v, w)` coordinates.

mod bij;
mod feasibility;
mod params;

pub use bij::{build_bij, leading_minors_positive, minors_audit, BijMatrix, MinorsAuditRow};
pub use feasibility::{
    find_theta_sigma, infimum_sigma, theta_sigma_feasible, theta_sigma_feasible_f64, SearchBudget, MARGIN_FACTOR,
};
pub use params::{compute_p, theorem_params, Theorem, TheoremParams};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Axis, Poly3};
use crate::rational::{self, Rational};

/// Diffusion coefficients `(d₁, d₂, d₃)`, all positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct DiffusionTriple([f64; 3]);

impl TryFrom<[f64; 3]> for DiffusionTriple {
    type Error = Error;
    fn try_from(d: [f64; 3]) -> Result<Self> {
        DiffusionTriple::new(d)
    }
}

impl From<DiffusionTriple> for [f64; 3] {
    fn from(d: DiffusionTriple) -> Self {
        d.0
    }
}

impl DiffusionTriple {
    pub fn new(d: [f64; 3]) -> Result<Self> {
        if d.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::invalid(format!("diffusion coefficients must be positive, got {d:?}")));
        }
        Ok(DiffusionTriple(d))
    }

    pub fn equal() -> Self {
        DiffusionTriple([1.0; 3])
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Exact rational coefficients (each f64 is dyadic).
    pub fn exact(&self) -> [Rational; 3] {
        self.0.map(|x| rational::from_f64(x).expect("validated finite"))
    }

    /// `A_ij = (d_i + d_j) / (2 √(d_i d_j))` for 1-based `i, j`.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        let (di, dj) = (self.0[i - 1], self.0[j - 1]);
        (di + dj) / (2.0 * (di * dj).sqrt())
    }

    /// `A_ij²`, exact.
    pub fn a_squared(&self, i: usize, j: usize) -> Rational {
        let d = self.exact();
        let (di, dj) = (&d[i - 1], &d[j - 1]);
        let s = di + dj;
        &s * &s / (rational::int(4) * di * dj)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Weights `θ^(i²-i) σ^(j²-j)`; pairs with weights above the thresholds.
    Thm1,
    /// Weights `θ^((p-i)²-i) σ^((p-j)²-j)`; pairs with weights below the thresholds.
    Thm2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpSpec {
    pub p: u32,
    #[serde(with = "crate::rational::serde_rational")]
    pub theta: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub sigma: Rational,
    pub variant: Variant,
}

impl HpSpec {
    pub fn new(p: u32, theta: Rational, sigma: Rational, variant: Variant) -> Result<Self> {
        let spec = HpSpec { p, theta, sigma, variant };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::invalid("energy exponent p must be at least 1"));
        }
        if !self.theta.is_positive() || !self.sigma.is_positive() {
            return Err(Error::invalid("theta and sigma must be positive"));
        }
        Ok(())
    }

    /// The weight sequences `(θ_i)_{0..=p}` and `(σ_j)_{0..=p}`.
    pub fn sequences(&self) -> (Vec<Rational>, Vec<Rational>) {
        let p = self.p as i64;
        let exponent = |k: i64| match self.variant {
            Variant::Thm1 => k * k - k,
            Variant::Thm2 => (p - k) * (p - k) - k,
        };
        let th = (0..=p).map(|i| rational::pow(&self.theta, exponent(i))).collect();
        let sg = (0..=p).map(|j| rational::pow(&self.sigma, exponent(j))).collect();
        (th, sg)
    }

    /// `(θσ)^p`, the factor between `L` and `L̃`.
    pub fn tilde_scale(&self) -> Rational {
        rational::pow(&(&self.theta * &self.sigma), self.p as i64)
    }

    /// Smallest `C` with `(u+v+w)^p ≤ C·H_p(u,v,w)` on `ℝ₊³`: the largest
    /// ratio of a multinomial coefficient to the matching energy coefficient.
    pub fn domination_constant(&self) -> Rational {
        let (th, sg) = self.sequences();
        let mut best = Rational::zero();
        for j in 0..=self.p as usize {
            for i in 0..=j {
                let ratio = (&th[i] * &sg[j]).recip();
                if ratio > best {
                    best = ratio;
                }
            }
        }
        best
    }
}

/// Pascal's triangle up to row `n`.
pub fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut row = vec![BigInt::one(); r + 1];
        for k in 1..r {
            row[k] = &rows[r - 1][k - 1] + &rows[r - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// `factor · Σ_{j=0}^{n} Σ_{i=0}^{j} C(n,j) C(j,i) θ_{i+a} σ_{j+b} u^i v^(j-i) w^(n-j)`.
fn shifted_double_sum(n: u32, factor: &Rational, th: &[Rational], sg: &[Rational], a: usize, b: usize) -> Poly3 {
    let binom = binomials(n as usize);
    let n = n as usize;
    let mut terms = Vec::new();
    for j in 0..=n {
        for i in 0..=j {
            let c = Rational::from_integer(&binom[n][j] * &binom[j][i]);
            let coeff = factor * c * &th[i + a] * &sg[j + b];
            terms.push(([i as u32, (j - i) as u32, (n - j) as u32], coeff));
        }
    }
    Poly3::from_terms(terms)
}

/// `H_p` (or `H_p*` for [`Variant::Thm2`]) as an exact polynomial.
pub fn build_energy(spec: &HpSpec) -> Poly3 {
    let (th, sg) = spec.sequences();
    shifted_double_sum(spec.p, &Rational::one(), &th, &sg, 0, 0)
}

/// First derivatives from the shifted-index closed forms:
/// `∂_u` uses `θ_{i+1} σ_{j+1}`, `∂_v` uses `θ_i σ_{j+1}`, `∂_w` uses `θ_i σ_j`,
/// each over the degree `p-1` double sum times `p`.
pub fn grad_energy_closed_form(spec: &HpSpec) -> [Poly3; 3] {
    let (th, sg) = spec.sequences();
    let p = spec.p;
    let factor = rational::int(p as i64);
    let shifts = [(1, 1), (0, 1), (0, 0)];
    shifts.map(|(a, b)| shifted_double_sum(p - 1, &factor, &th, &sg, a, b))
}

/// Upper-triangular Hessian `[∂uu, ∂vv, ∂ww, ∂uv, ∂uw, ∂vw]` from the
/// closed forms over the degree `p-2` double sum times `p(p-1)`.
pub fn hess_energy_closed_form(spec: &HpSpec) -> Result<[Poly3; 6]> {
    if spec.p < 2 {
        return Err(Error::invalid("second derivatives need p >= 2"));
    }
    let (th, sg) = spec.sequences();
    let p = spec.p;
    let factor = rational::int((p * (p - 1)) as i64);
    let shifts = [(2, 2), (0, 2), (0, 0), (1, 2), (1, 1), (0, 1)];
    Ok(shifts.map(|(a, b)| shifted_double_sum(p - 2, &factor, &th, &sg, a, b)))
}

/// Index pairs matching the order of [`hess_energy_closed_form`].
pub const HESSIAN_ORDER: [(Axis, Axis); 6] = [
    (Axis::U, Axis::U),
    (Axis::V, Axis::V),
    (Axis::W, Axis::W),
    (Axis::U, Axis::V),
    (Axis::U, Axis::W),
    (Axis::V, Axis::W),
];

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::DiffusionTriple;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Symmetric 3×3 matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijMatrix {
    entries: [[Rational; 3]; 3],
}

impl BijMatrix {
    pub fn from_rows(entries: [[Rational; 3]; 3]) -> Result<Self> {
        for r in 0..3 {
            for c in 0..r {
                if entries[r][c] != entries[c][r] {
                    return Err(Error::invalid("matrix is not symmetric"));
                }
            }
        }
        Ok(BijMatrix { entries })
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        self.entries.each_ref().map(|r| r.each_ref().map(rational::to_f64))
    }

    /// Determinants of the leading 1×1, 2×2 and 3×3 blocks.
    pub fn leading_minors(&self) -> [Rational; 3] {
        let m = &self.entries;
        let d1 = m[0][0].clone();
        let d2 = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        let d3 = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        [d1, d2, d3]
    }
}

/// The gradient-form matrix for indices `0 ≤ i ≤ j`:
///
/// ```text
/// ⎡ d₁θ^(i+2)²σ^(j+2)²       ½(d₁+d₂)θ^(i+1)²σ^(j+2)²   ½(d₁+d₃)θ^(i+1)²σ^(j+1)² ⎤
/// ⎢ ·                        d₂θ^(i²)σ^(j+2)²           ½(d₂+d₃)θ^(i²)σ^(j+1)²   ⎥
/// ⎣ ·                        ·                          d₃θ^(i²)σ^(j²)           ⎦
/// ```
pub fn build_bij(d: &DiffusionTriple, theta: &Rational, sigma: &Rational, i: u32, j: u32) -> Result<BijMatrix> {
    if i > j {
        return Err(Error::invalid(format!("B_ij needs i <= j, got ({i}, {j})")));
    }
    if !theta.is_positive() || !sigma.is_positive() {
        return Err(Error::invalid("theta and sigma must be positive"));
    }
    let [d1, d2, d3] = d.exact();
    let half = rational::ratio(1, 2);
    let t = |k: u32| rational::pow(theta, (k * k) as i64);
    let s = |k: u32| rational::pow(sigma, (k * k) as i64);
    let b11 = &d1 * t(i + 2) * s(j + 2);
    let b12 = &half * (&d1 + &d2) * t(i + 1) * s(j + 2);
    let b13 = &half * (&d1 + &d3) * t(i + 1) * s(j + 1);
    let b22 = &d2 * t(i) * s(j + 2);
    let b23 = &half * (&d2 + &d3) * t(i) * s(j + 1);
    let b33 = &d3 * t(i) * s(j);
    Ok(BijMatrix { entries: [[b11, b12.clone(), b13.clone()], [b12, b22, b23.clone()], [b13, b23, b33]] })
}

/// Sylvester's criterion on exact determinants.
pub fn leading_minors_positive(m: &BijMatrix) -> bool {
    m.leading_minors().iter().all(Signed::is_positive)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorsAuditRow {
    pub i: u32,
    pub j: u32,
    /// Leading minors rounded to f64, for display.
    pub minors: [f64; 3],
    pub positive: bool,
}

/// Minors of every `B_ij`, `0 ≤ i ≤ j ≤ p − 2`.
pub fn minors_audit(d: &DiffusionTriple, theta: &Rational, sigma: &Rational, p: u32) -> Result<Vec<MinorsAuditRow>> {
    let mut rows = Vec::new();
    if p < 2 {
        return Ok(rows);
    }
    for j in 0..=p - 2 {
        for i in 0..=j {
            let m = build_bij(d, theta, sigma, i, j)?;
            let minors = m.leading_minors();
            rows.push(MinorsAuditRow {
                i,
                j,
                minors: minors.each_ref().map(rational::to_f64),
                positive: minors.iter().all(Signed::is_positive),
            });
        }
    }
    Ok(rows)
}

//! Sparse polynomials in three variables with exact rational coefficients.
//!
//! [`Poly3`] is the common currency of the crate: reaction terms, the weight
//! `Λ(ξ) = 1 + ξ₁ + ξ₂ + ξ₃`, and the energy polynomials are all `Poly3`.
//! Values are kept in canonical form (no zero coefficients, terms ordered
//! graded-lexicographically) so structural equality is polynomial equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// One of the three state variables `(ξ₁, ξ₂, ξ₃) = (u, v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    U = 0,
    V = 1,
    W = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::U, Axis::V, Axis::W];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Axis from a 1-based index, matching the `ξ₁, ξ₂, ξ₃` numbering.
    pub fn from_one_based(k: usize) -> Option<Axis> {
        match k {
            1 => Some(Axis::U),
            2 => Some(Axis::V),
            3 => Some(Axis::W),
            _ => None,
        }
    }
}

/// Exponent triple, ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A point of `ℝ₊³` in floating point.
pub type Point3 = [f64; 3];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly3 {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Poly3::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly3::term(c, [0, 0, 0])
    }

    pub fn term(c: Rational, exponents: [u32; 3]) -> Self {
        let mut p = Poly3::zero();
        p.add_term(Monomial(exponents), c);
        p
    }

    pub fn var(axis: Axis) -> Self {
        let mut e = [0; 3];
        e[axis.index()] = 1;
        Poly3::term(Rational::one(), e)
    }

    /// `Λ(ξ) = 1 + ξ₁ + ξ₂ + ξ₃`.
    pub fn lambda() -> Self {
        Poly3::from_terms([
            ([0, 0, 0], rational::int(1)),
            ([1, 0, 0], rational::int(1)),
            ([0, 1, 0], rational::int(1)),
            ([0, 0, 1], rational::int(1)),
        ])
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ([u32; 3], Rational)>,
    {
        let mut p = Poly3::zero();
        for (e, c) in terms {
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(m).or_insert_with(Rational::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: [u32; 3]) -> Rational {
        self.terms.get(&Monomial(exponents)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest `e₁+e₂+e₃` over stored terms; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    pub fn scale(&self, k: &Rational) -> Poly3 {
        if k.is_zero() {
            return Poly3::zero();
        }
        Poly3 { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly3 {
        let mut acc = Poly3::constant(Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial_derivative(&self, axis: Axis) -> Poly3 {
        let k = axis.index();
        let mut out = Poly3::zero();
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut d = m.0;
            d[k] -= 1;
            out.add_term(Monomial(d), c * rational::int(e as i64));
        }
        out
    }

    /// The polynomial with `axis` set to zero (terms containing it dropped).
    pub fn restrict_zero(&self, axis: Axis) -> Poly3 {
        let k = axis.index();
        Poly3 { terms: self.terms.iter().filter(|(m, _)| m.0[k] == 0).map(|(m, c)| (*m, c.clone())).collect() }
    }

    /// Coefficientwise certificate that `other ≤ self` on `ℝ₊³`: every
    /// coefficient of `other − self` is nonpositive. The converse does not hold.
    pub fn dominates(&self, other: &Poly3) -> bool {
        (other - self).terms.values().all(|c| !c.is_positive())
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn all_coefficients_nonpositive(&self) -> bool {
        self.terms.values().all(|c| !c.is_positive())
    }

    pub fn eval_exact(&self, x: &[Rational; 3]) -> Rational {
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for k in 0..3 {
                if m.0[k] > 0 {
                    t *= num_traits::pow(x[k].clone(), m.0[k] as usize);
                }
            }
            sum += t;
        }
        sum
    }

    pub fn eval(&self, x: &Point3) -> f64 {
        self.terms.iter().map(|(m, c)| rational::to_f64(c) * monomial_value(m, x)).sum()
    }

    /// Float view for hot loops.
    pub fn compile(&self) -> FloatPoly {
        FloatPoly { terms: self.terms.iter().map(|(m, c)| (rational::to_f64(c), m.0)).collect() }
    }
}

fn monomial_value(m: &Monomial, x: &Point3) -> f64 {
    let mut v = 1.0;
    for k in 0..3 {
        if m.0[k] > 0 {
            v *= x[k].powi(m.0[k] as i32);
        }
    }
    v
}

/// Floating-point snapshot of a [`Poly3`], used by the simulator.
#[derive(Clone, Debug, Default)]
pub struct FloatPoly {
    terms: Vec<(f64, [u32; 3])>,
}

impl FloatPoly {
    #[inline]
    pub fn eval(&self, x: &Point3) -> f64 {
        let mut sum = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for k in 0..3 {
                match e[k] {
                    0 => {}
                    1 => t *= x[k],
                    2 => t *= x[k] * x[k],
                    n => t *= x[k].powi(n as i32),
                }
            }
            sum += t;
        }
        sum
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for &Poly3 {
    type Output = Poly3;
    fn add(self, rhs: &Poly3) -> Poly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly3 {
    type Output = Poly3;
    fn sub(self, rhs: &Poly3) -> Poly3 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &Poly3 {
    type Output = Poly3;
    fn mul(self, rhs: &Poly3) -> Poly3 {
        let mut out = Poly3::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly3 {
    type Output = Poly3;
    fn neg(self) -> Poly3 {
        Poly3 { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly3 {
            type Output = Poly3;
            fn $method(self, rhs: Poly3) -> Poly3 {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly3 {
    type Output = Poly3;
    fn neg(self) -> Poly3 {
        -&self
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 3] = ["u", "v", "w"];
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let unit = mag.is_one() && m.degree() > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            let mut first = unit;
            for k in 0..3 {
                let e = m.0[k];
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", NAMES[k])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    e: [u32; 3],
    #[serde(with = "crate::rational::serde_rational")]
    c: Rational,
}

impl Serialize for Poly3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self.terms.iter().map(|(m, c)| TermRecord { e: m.0, c: c.clone() }).collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        Ok(Poly3::from_terms(records.into_iter().map(|r| (r.e, r.c))))
    }
}

//! Certificates and falsifiers for the structural assumptions on `(f, g, h)`.
//!
//! Every check follows the same pattern. A coefficientwise domination
//! certificate ([`Poly3::dominates`]) proves the inequality on all of `ℝ₊³`.
//! When it does not apply, a deterministic sampler searches for a point that
//! violates the inequality even with the largest ladder constant. If neither
//! succeeds the verdict is `Unknown`. A `Certified` verdict is never produced
//! from sampling alone.

pub mod sampling;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Axis, Point3, Poly3};
use crate::rational::{self, Rational};
pub use sampling::{SamplerConfig, Witness};

/// Constants are searched over `{0, 1, 2, 4, ..., 2^LADDER_MAX_LOG2}`.
pub const LADDER_MAX_LOG2: u32 = 64;

/// `0, 1, 2, 4, ..., 2^64`.
pub fn ladder() -> impl Iterator<Item = Rational> {
    std::iter::once(Rational::zero())
        .chain((0..=LADDER_MAX_LOG2).map(|k| num_traits::pow(rational::int(2), k as usize)))
}

pub fn ladder_cap() -> Rational {
    num_traits::pow(rational::int(2), LADDER_MAX_LOG2 as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityTriple {
    pub f: Poly3,
    pub g: Poly3,
    pub h: Poly3,
}

impl NonlinearityTriple {
    pub fn new(f: Poly3, g: Poly3, h: Poly3) -> Self {
        NonlinearityTriple { f, g, h }
    }

    pub fn zero() -> Self {
        NonlinearityTriple::new(Poly3::zero(), Poly3::zero(), Poly3::zero())
    }

    pub fn components(&self) -> [&Poly3; 3] {
        [&self.f, &self.g, &self.h]
    }

    pub fn sum(&self) -> Poly3 {
        &(&self.f + &self.g) + &self.h
    }

    /// `a·f + b·g + c·h`.
    pub fn combination(&self, a: &Rational, b: &Rational, c: &Rational) -> Poly3 {
        &(&self.f.scale(a) + &self.g.scale(b)) + &self.h.scale(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Above1,
    Below1,
}

/// Weights `(λ₁, λ₂)` of the intermediate weighted-sum condition. Both lie
/// strictly above 1 or both strictly below 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr", into = "WeightsRepr")]
pub struct IwscWeights {
    lambda1: Rational,
    lambda2: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsRepr {
    #[serde(with = "crate::rational::serde_rational")]
    lambda1: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    lambda2: Rational,
}

impl TryFrom<WeightsRepr> for IwscWeights {
    type Error = Error;
    fn try_from(r: WeightsRepr) -> Result<Self> {
        IwscWeights::new(r.lambda1, r.lambda2)
    }
}

impl From<IwscWeights> for WeightsRepr {
    fn from(w: IwscWeights) -> Self {
        WeightsRepr { lambda1: w.lambda1, lambda2: w.lambda2 }
    }
}

impl IwscWeights {
    pub fn new(lambda1: Rational, lambda2: Rational) -> Result<Self> {
        let one = Rational::one();
        let above = lambda1 > one && lambda2 > one;
        let below = lambda1 < one && lambda2 < one && lambda1.is_positive() && lambda2.is_positive();
        if !(above || below) {
            return Err(Error::invalid(format!(
                "weights must both exceed 1 or both lie in (0, 1); got {} and {}",
                rational::format(&lambda1),
                rational::format(&lambda2)
            )));
        }
        Ok(IwscWeights { lambda1, lambda2 })
    }

    pub fn lambda1(&self) -> &Rational {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &Rational {
        &self.lambda2
    }

    pub fn branch(&self) -> Branch {
        if self.lambda1 > Rational::one() {
            Branch::Above1
        } else {
            Branch::Below1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Falsified { witness: Witness },
    Unknown,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }

    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::Falsified { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Falsified { witness } => Some(witness),
            _ => None,
        }
    }

    /// Conjunction: any falsified part falsifies, then any unknown part.
    pub fn all<I: IntoIterator<Item = Verdict>>(parts: I) -> Verdict {
        let mut unknown = false;
        for v in parts {
            match v {
                Verdict::Falsified { .. } => return v,
                Verdict::Unknown => unknown = true,
                Verdict::Certified => {}
            }
        }
        if unknown {
            Verdict::Unknown
        } else {
            Verdict::Certified
        }
    }
}

/// Result of bounding one polynomial by `K·Λ^n` over the constant ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Least certified ladder constant.
    #[serde(with = "opt_rational")]
    pub constant: Option<Rational>,
}

/// Least ladder constant `K` with `K·base` dominating `q`.
pub fn least_ladder_constant(q: &Poly3, base: &Poly3) -> Option<Rational> {
    ladder().find(|k| base.scale(k).dominates(q))
}

/// Decides `q ≤ K·Λ^n` for some ladder constant `K`. Falsification uses the
/// cap constant and `Λ^falsify_power`, which must be at least `n`.
fn bound_by_lambda_power(
    q: &Poly3,
    certify_power: u32,
    falsify_power: u32,
    points: &[Point3],
    label: &str,
) -> BoundCheck {
    let lambda = Poly3::lambda();
    let base = lambda.pow(certify_power);
    if let Some(k) = least_ladder_constant(q, &base) {
        return BoundCheck { verdict: Verdict::Certified, constant: Some(k) };
    }
    let excess = q - &lambda.pow(falsify_power).scale(&ladder_cap());
    let verdict = match sampling::find_positive(&excess, points, label) {
        Some(witness) => Verdict::Falsified { witness },
        None => Verdict::Unknown,
    };
    BoundCheck { verdict, constant: None }
}

/// Quasi-positivity: `f(0,v,w), g(u,0,w), h(u,v,0) ≥ 0` on `ℝ₊³`.
pub fn check_quasi_positivity(n: &NonlinearityTriple, sampler: &SamplerConfig) -> Verdict {
    const LABELS: [&str; 3] = ["f(0,v,w)", "g(u,0,w)", "h(u,v,0)"];
    let parts = Axis::ALL.iter().zip(n.components()).zip(LABELS).map(|((&axis, p), label)| {
        let restricted = p.restrict_zero(axis);
        if restricted.all_coefficients_nonnegative() {
            return Verdict::Certified;
        }
        let mut free = [true; 3];
        free[axis.index()] = false;
        let points = sampler.points(free);
        match sampling::find_positive(&-&restricted, &points, label) {
            Some(witness) => Verdict::Falsified { witness },
            None => Verdict::Unknown,
        }
    });
    Verdict::all(parts.collect::<Vec<_>>())
}

/// Mass control: `f + g + h ≤ K₁·Λ`.
pub fn check_mass_control(n: &NonlinearityTriple, sampler: &SamplerConfig) -> BoundCheck {
    let points = sampler.points([true; 3]);
    bound_by_lambda_power(&n.sum(), 1, 1, &points, "f+g+h")
}

/// The three weighted sums of the intermediate weighted-sum condition.
pub fn iwsc_rows(n: &NonlinearityTriple, w: &IwscWeights) -> [Poly3; 3] {
    let one = Rational::one();
    let l1 = w.lambda1();
    let l2 = w.lambda2();
    [n.combination(l1, &one, &one), n.combination(l2, l2, &one), n.combination(&(l1 * l2), l2, &one)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IwscCheck {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub branch: Branch,
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda1: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda2: Rational,
    /// `K₂, K₃, K₄`; `None` for rows that did not certify.
    #[serde(with = "opt_rational_array")]
    pub constants: [Option<Rational>; 3],
    pub rows: [BoundCheck; 3],
}

impl IwscCheck {
    pub fn all_constants_zero(&self) -> bool {
        self.constants.iter().all(|k| k.as_ref().is_some_and(Zero::is_zero))
    }
}

pub fn check_iwsc(n: &NonlinearityTriple, w: &IwscWeights, sampler: &SamplerConfig) -> IwscCheck {
    let points = sampler.points([true; 3]);
    let labels = ["row 1: l1*f+g+h", "row 2: l2*f+l2*g+h", "row 3: l1*l2*f+l2*g+h"];
    let rows_poly = iwsc_rows(n, w);
    let rows: [BoundCheck; 3] = std::array::from_fn(|k| bound_by_lambda_power(&rows_poly[k], 1, 1, &points, labels[k]));
    IwscCheck {
        verdict: Verdict::all(rows.iter().map(|r| r.verdict.clone()).collect::<Vec<_>>()),
        branch: w.branch(),
        lambda1: w.lambda1().clone(),
        lambda2: w.lambda2().clone(),
        constants: std::array::from_fn(|k| rows[k].constant.clone()),
        rows,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub m: u32,
    /// Least power-of-two `M` with `M·Λ^m` dominating each of `f, g, h`.
    #[serde(with = "opt_rational")]
    pub big_m: Option<Rational>,
}

pub fn check_growth(n: &NonlinearityTriple) -> GrowthCheck {
    let m = n.components().iter().map(|p| p.total_degree()).max().unwrap_or(0).max(1);
    let base = Poly3::lambda().pow(m);
    let big_m = ladder().skip(1).find(|k| n.components().iter().all(|p| base.scale(k).dominates(p)));
    let verdict = if big_m.is_some() { Verdict::Certified } else { Verdict::Unknown };
    GrowthCheck { verdict, m, big_m }
}

/// Lower-triangular weight matrix of the intermediate sum condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IscMatrix(pub [[crate::rational::Q; 3]; 3]);

impl IscMatrix {
    pub fn identity() -> Self {
        use crate::rational::Q;
        let z = || Q(Rational::zero());
        let o = || Q(Rational::one());
        IscMatrix([[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]])
    }

    pub fn new(a: [[Rational; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let x = &a[i][j];
                if j > i && !x.is_zero() {
                    return Err(Error::invalid("ISC matrix must be lower triangular"));
                }
                if x.is_negative() {
                    return Err(Error::invalid("ISC matrix entries must be nonnegative"));
                }
            }
            if !a[i][i].is_positive() {
                return Err(Error::invalid("ISC matrix diagonal must be positive"));
            }
        }
        Ok(IscMatrix(a.map(|row| row.map(crate::rational::Q))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IscCheck {
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(with = "crate::rational::serde_rational")]
    pub r: Rational,
    pub rows: [BoundCheck; 3],
}

/// Intermediate sum condition with exponent `r ≥ 1`. Certification uses
/// `Λ^⌊r⌋ ≤ Λ^r` and falsification uses `Λ^r ≤ Λ^⌈r⌉`, both valid since `Λ ≥ 1`.
pub fn check_isc(
    n: &NonlinearityTriple,
    r: &Rational,
    matrix: &IscMatrix,
    sampler: &SamplerConfig,
) -> Result<IscCheck> {
    if *r < Rational::one() {
        return Err(Error::invalid("ISC exponent r must be at least 1"));
    }
    let lo = r.floor().to_integer().try_into().map_err(|_| Error::invalid("r too large"))?;
    let hi = r.ceil().to_integer().try_into().map_err(|_| Error::invalid("r too large"))?;
    let points = sampler.points([true; 3]);
    let a = &matrix.0;
    let labels = ["row 1", "row 2", "row 3"];
    let rows: [BoundCheck; 3] = std::array::from_fn(|i| {
        let q = n.combination(&a[i][0].0, &a[i][1].0, &a[i][2].0);
        bound_by_lambda_power(&q, lo, hi, &points, labels[i])
    });
    Ok(IscCheck {
        verdict: Verdict::all(rows.iter().map(|b| b.verdict.clone()).collect::<Vec<_>>()),
        r: r.clone(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub quasi_positive: Verdict,
    pub mass_control: BoundCheck,
    pub iwsc: IwscCheck,
    pub growth: GrowthCheck,
    /// Informational only; does not enter [`ConditionReport::overall`].
    pub isc: IscCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    AllCertified,
    AnyFalsified,
    AnyUnknown,
}

impl ConditionReport {
    pub fn overall(&self) -> Overall {
        let v = Verdict::all([
            self.quasi_positive.clone(),
            self.mass_control.verdict.clone(),
            self.iwsc.verdict.clone(),
            self.growth.verdict.clone(),
        ]);
        match v {
            Verdict::Certified => Overall::AllCertified,
            Verdict::Falsified { .. } => Overall::AnyFalsified,
            Verdict::Unknown => Overall::AnyUnknown,
        }
    }

    /// `K₁ = K₂ = K₃ = K₄ = 0`: the uniform-in-time regime.
    pub fn all_constants_zero(&self) -> bool {
        self.mass_control.constant.as_ref().is_some_and(Zero::is_zero) && self.iwsc.all_constants_zero()
    }
}

pub fn check_all(
    n: &NonlinearityTriple,
    weights: &IwscWeights,
    isc_r: &Rational,
    sampler: &SamplerConfig,
) -> Result<ConditionReport> {
    Ok(ConditionReport {
        quasi_positive: check_quasi_positivity(n, sampler),
        mass_control: check_mass_control(n, sampler),
        iwsc: check_iwsc(n, weights, sampler),
        growth: check_growth(n),
        isc: check_isc(n, isc_r, &IscMatrix::identity(), sampler)?,
    })
}

/// Outcome of sampling the weighted-sum interpolation lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct LiwsProbe {
    pub checked: usize,
    pub counterexample: Option<Point3>,
}

impl LiwsProbe {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Samples `α*Φ + Ψ ≤ max(C₁, C₂)·Λ` given certified premises
/// `Φ + Ψ ≤ C₁Λ` and `αΦ + Ψ ≤ C₂Λ`, for `α*` between 1 and `α`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_liws_probe(
    phi: &Poly3,
    psi: &Poly3,
    alpha: &Rational,
    c1: &Rational,
    c2: &Rational,
    alpha_star: &Rational,
    samples: &[[Rational; 3]],
) -> Result<LiwsProbe> {
    if !alpha.is_positive() {
        return Err(Error::invalid("alpha must be positive"));
    }
    if c1.is_negative() || c2.is_negative() {
        return Err(Error::invalid("C1 and C2 must be nonnegative"));
    }
    let one = Rational::one();
    let (lo, hi) = if *alpha >= one { (&one, alpha) } else { (alpha, &one) };
    if alpha_star < lo || alpha_star > hi {
        return Err(Error::invalid("alpha* must lie between 1 and alpha"));
    }
    let lambda = Poly3::lambda();
    if !lambda.scale(c1).dominates(&(phi + psi)) {
        return Err(Error::invalid("premise phi + psi <= C1*Lambda is not certified"));
    }
    if !lambda.scale(c2).dominates(&(&phi.scale(alpha) + psi)) {
        return Err(Error::invalid("premise alpha*phi + psi <= C2*Lambda is not certified"));
    }
    let cmax = if c1 > c2 { c1 } else { c2 };
    let excess = &(&phi.scale(alpha_star) + psi) - &lambda.scale(cmax);
    let counterexample =
        samples.iter().find(|x| excess.eval_exact(x).is_positive()).map(|x| x.each_ref().map(rational::to_f64));
    Ok(LiwsProbe { checked: samples.len(), counterexample })
}

mod opt_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(crate::rational::format).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| crate::rational::parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

mod opt_rational_array {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[Option<Rational>; 3], s: S) -> Result<S::Ok, S::Error> {
        x.each_ref().map(|k| k.as_ref().map(crate::rational::format)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Option<Rational>; 3], D::Error> {
        let v = <[Option<String>; 3]>::deserialize(d)?;
        let mut out: [Option<Rational>; 3] = Default::default();
        for (slot, s) in out.iter_mut().zip(v) {
            *slot = s.map(|s| crate::rational::parse(&s).map_err(serde::de::Error::custom)).transpose()?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;

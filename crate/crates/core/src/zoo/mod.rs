//! Constructors for the example families and a registry of named models.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::checker::{IwscWeights, NonlinearityTriple};
use crate::error::{Error, Result};
use crate::lyapunov::DiffusionTriple;
use crate::poly::{Axis, Poly3};
use crate::rational::{self, Rational, Q};
use crate::sim::{BoundarySpec, SimModel};

/// A reaction-diffusion model. Serializes to the inline-model schema of run configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub diffusion: DiffusionTriple,
    pub reactions: NonlinearityTriple,
    #[serde(default)]
    pub boundary: BoundarySpec,
    /// Weights for which the weighted-sum condition is expected to hold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<IwscWeights>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Value>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, reactions: NonlinearityTriple) -> Self {
        ModelSpec {
            name: name.into(),
            diffusion: DiffusionTriple::equal(),
            reactions,
            boundary: BoundarySpec::neumann(),
            weights: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_diffusion(mut self, d: DiffusionTriple) -> Self {
        self.diffusion = d;
        self
    }

    pub fn with_boundary(mut self, bc: BoundarySpec) -> Self {
        self.boundary = bc;
        self
    }

    pub fn with_weights(mut self, w: Option<IwscWeights>) -> Self {
        self.weights = w;
        self
    }

    fn meta(mut self, key: &str, value: Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn sim_model(&self) -> Result<SimModel> {
        SimModel::new(self.diffusion.values(), &self.reactions, self.boundary)
    }
}

fn var(a: Axis) -> Poly3 {
    Poly3::var(a)
}

fn mono(a: Axis, e: u32) -> Poly3 {
    var(a).pow(e)
}

fn q(x: &Rational) -> Value {
    Value::String(rational::format(x))
}

/// Weights `(a, b)` when both exceed 1.
fn weights_above_one(a: &Rational, b: &Rational) -> Option<IwscWeights> {
    (*a > Rational::one() && *b > Rational::one()).then(|| IwscWeights::new(a.clone(), b.clone()).ok()).flatten()
}

/// `(v^l − u^q, w^r − Bv^l, Au^q − Cw^r)`.
pub fn example1(l: u32, q_exp: u32, r: u32, a: Rational, b: Rational, c: Rational) -> Result<ModelSpec> {
    if l < 1 || q_exp < 1 || r < 1 {
        return Err(Error::invalid("exponents l, q, r must be at least 1"));
    }
    if !(a.is_positive() && b.is_positive() && c.is_positive()) {
        return Err(Error::invalid("A, B, C must be positive"));
    }
    if a >= b.clone().min(c.clone()) {
        return Err(Error::invalid(format!(
            "need A < min(B, C); got A = {}, B = {}, C = {}",
            rational::format(&a),
            rational::format(&b),
            rational::format(&c)
        )));
    }
    let (vl, uq, wr) = (mono(Axis::V, l), mono(Axis::U, q_exp), mono(Axis::W, r));
    let n = NonlinearityTriple::new(&vl - &uq, &wr - &vl.scale(&b), &uq.scale(&a) - &wr.scale(&c));
    Ok(ModelSpec::new("example1", n)
        .with_weights(weights_above_one(&b, &c))
        .meta("l", json!(l))
        .meta("q", json!(q_exp))
        .meta("r", json!(r))
        .meta("A", q(&a))
        .meta("B", q(&b))
        .meta("C", q(&c)))
}

/// `f = Ψ₂ − Ψ₁ − s₁Ψ₃`, `g = Ψ₃ − ζ₂Ψ₂ − s₂Ψ₁`, `h = ζ₁Ψ₁ − ζ₃Ψ₃ − s₃Ψ₂`,
/// with each `Ψᵢ` a nonnegative combination of monomials divisible by `uvw`.
pub fn example2(psi: [Poly3; 3], zeta: [Rational; 3], s: [Rational; 3]) -> Result<ModelSpec> {
    if s.iter().any(Signed::is_negative) {
        return Err(Error::invalid("s1, s2, s3 must be nonnegative"));
    }
    if zeta[0] > Rational::one() {
        return Err(Error::invalid("zeta1 must be at most 1"));
    }
    for (k, p) in psi.iter().enumerate() {
        if !p.all_coefficients_nonnegative() {
            return Err(Error::invalid(format!("Psi{} has a negative coefficient", k + 1)));
        }
        if p.terms().any(|(m, _)| m.0.contains(&0)) {
            return Err(Error::invalid(format!("Psi{} is not divisible by uvw", k + 1)));
        }
    }
    let [p1, p2, p3] = &psi;
    let f = &(p2 - p1) - &p3.scale(&s[0]);
    let g = &(p3 - &p2.scale(&zeta[1])) - &p1.scale(&s[1]);
    let h = &(&p1.scale(&zeta[0]) - &p3.scale(&zeta[2])) - &p2.scale(&s[2]);
    Ok(ModelSpec::new("example2", NonlinearityTriple::new(f, g, h))
        .with_weights(weights_above_one(&zeta[1], &zeta[2]))
        .meta("zeta", Value::Array(zeta.iter().map(q).collect()))
        .meta("s", Value::Array(s.iter().map(q).collect())))
}

/// 3×3 interaction matrix of the Lotka–Volterra family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionMatrix(pub [[Q; 3]; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionClass {
    pub sk: bool,
    pub sk_plus: bool,
    pub sk_minus: bool,
}

impl InteractionMatrix {
    pub fn new(a: [[Rational; 3]; 3]) -> Self {
        InteractionMatrix(a.map(|r| r.map(Q)))
    }

    pub fn from_i64(a: [[i64; 3]; 3]) -> Self {
        InteractionMatrix::new(a.map(|r| r.map(rational::int)))
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.0[i][j].0
    }

    /// `A + Aᵀ ≤ 0` entrywise.
    pub fn in_sk(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| !(self.entry(i, j) + self.entry(j, i)).is_positive()))
    }

    fn upper(&self) -> impl Iterator<Item = &Rational> {
        [(0, 1), (0, 2), (1, 2)].into_iter().map(|(i, j)| self.entry(i, j))
    }

    pub fn in_sk_plus(&self) -> bool {
        self.in_sk() && self.upper().all(|x| !x.is_negative())
    }

    pub fn in_sk_minus(&self) -> bool {
        self.in_sk() && self.upper().all(|x| !x.is_positive())
    }

    pub fn class(&self) -> InteractionClass {
        InteractionClass { sk: self.in_sk(), sk_plus: self.in_sk_plus(), sk_minus: self.in_sk_minus() }
    }
}

/// The five sufficient inequalities for the weighted-sum condition of the
/// Lotka–Volterra family, evaluated exactly.
pub fn lv_weights_feasible(a: &InteractionMatrix, lambda1: &Rational, lambda2: &Rational) -> bool {
    let e = |i: usize, j: usize| a.entry(i - 1, j - 1);
    let l12 = lambda1 * lambda2;
    [
        lambda1 * e(1, 2) + e(2, 1),
        lambda1 * e(1, 3) + e(3, 1),
        lambda2 * e(1, 3) + e(3, 1),
        lambda2 * e(2, 3) + e(3, 2),
        &l12 * e(1, 3) + e(3, 1),
    ]
    .iter()
    .all(|x| !x.is_positive())
}

/// `τᵢxᵢ + xᵢ^γᵢ Σⱼ aᵢⱼ xⱼ^γⱼ`.
pub fn example3_lv(tau: [Rational; 3], gamma: [u32; 3], a: InteractionMatrix, bc: BoundarySpec) -> Result<ModelSpec> {
    if gamma.contains(&0) {
        return Err(Error::invalid("gamma exponents must be at least 1"));
    }
    let powered: Vec<Poly3> = Axis::ALL.iter().zip(gamma).map(|(&ax, g)| mono(ax, g)).collect();
    let species: [Poly3; 3] = std::array::from_fn(|i| {
        let inner = (0..3).fold(Poly3::zero(), |acc, j| &acc + &powered[j].scale(a.entry(i, j)));
        &var(Axis::ALL[i]).scale(&tau[i]) + &(&powered[i] * &inner)
    });
    let [f, g, h] = species;
    let class = a.class();
    let weights = if class.sk_minus {
        IwscWeights::new(rational::int(2), rational::int(2)).ok()
    } else if class.sk_plus {
        IwscWeights::new(rational::ratio(1, 2), rational::ratio(1, 2)).ok()
    } else {
        None
    };
    let name = match (class.sk_minus, class.sk_plus) {
        (true, _) => "lv_sk_minus",
        (false, true) => "lv_sk_plus",
        _ => "lv",
    };
    Ok(ModelSpec::new(name, NonlinearityTriple::new(f, g, h))
        .with_boundary(bc)
        .with_weights(weights)
        .meta("tau", Value::Array(tau.iter().map(q).collect()))
        .meta("gamma", json!(gamma))
        .meta("matrix", serde_json::to_value(&a).expect("serializable"))
        .meta("class", serde_json::to_value(class).expect("serializable")))
}

/// `(v⁵ − u⁶, w⁷ − Bv⁵, u⁶ − Cw⁷)`: satisfies the weighted-sum condition for
/// `1 < λ₁ ≤ B`, `1 < λ₂ ≤ C` but not the unweighted intermediate sum condition.
pub fn intro_counterexample(b: Rational, c: Rational) -> Result<ModelSpec> {
    if !(b.is_positive() && c.is_positive()) {
        return Err(Error::invalid("B and C must be positive"));
    }
    let (u6, v5, w7) = (mono(Axis::U, 6), mono(Axis::V, 5), mono(Axis::W, 7));
    let n = NonlinearityTriple::new(&v5 - &u6, &w7 - &v5.scale(&b), &u6 - &w7.scale(&c));
    Ok(ModelSpec::new("weighted_sum_counterexample", n)
        .with_weights(weights_above_one(&b, &c))
        .meta("B", q(&b))
        .meta("C", q(&c)))
}

/// `(v − u, w − v, u − w)`: total mass is conserved.
pub fn mass_exchange() -> ModelSpec {
    let (u, v, w) = (var(Axis::U), var(Axis::V), var(Axis::W));
    ModelSpec::new("mass_exchange", NonlinearityTriple::new(&v - &u, &w - &v, &u - &w))
}

/// `f = g = h = uvw`; uniform data blow up in finite time.
pub fn cubic_blowup() -> ModelSpec {
    let m = &(&var(Axis::U) * &var(Axis::V)) * &var(Axis::W);
    ModelSpec::new("cubic_blowup", NonlinearityTriple::new(m.clone(), m.clone(), m))
}

pub fn sk_minus_matrix() -> InteractionMatrix {
    InteractionMatrix::from_i64([[-1, -1, 0], [-1, -2, -1], [0, -1, -1]])
}

pub fn sk_plus_matrix() -> InteractionMatrix {
    InteractionMatrix::from_i64([[-1, 1, 0], [-2, -1, 0], [0, 0, -1]])
}

pub struct RegistryEntry {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> ModelSpec,
}

impl RegistryEntry {
    pub fn build(&self) -> ModelSpec {
        (self.build)()
    }
}

fn zeros() -> [Rational; 3] {
    std::array::from_fn(|_| Rational::zero())
}

/// Named models with default parameters.
pub fn registry() -> &'static [RegistryEntry] {
    &[
        RegistryEntry {
            name: "example1",
            description: "power cascade (v^2 - u^2, w^2 - 2v^2, u^2 - 2w^2)",
            build: || example1(2, 2, 2, rational::int(1), rational::int(2), rational::int(2)).expect("valid"),
        },
        RegistryEntry {
            name: "example2",
            description: "trimolecular exchange with Psi_i = uvw, zeta = (1, 2, 2), s = 0",
            build: || {
                let m = &(&var(Axis::U) * &var(Axis::V)) * &var(Axis::W);
                let zeta = [rational::int(1), rational::int(2), rational::int(2)];
                example2([m.clone(), m.clone(), m], zeta, zeros()).expect("valid")
            },
        },
        RegistryEntry {
            name: "lv_sk_minus",
            description: "Lotka-Volterra, A = [[-1,-1,0],[-1,-2,-1],[0,-1,-1]], tau = 0, gamma = 1",
            build: || example3_lv(zeros(), [1; 3], sk_minus_matrix(), BoundarySpec::neumann()).expect("valid"),
        },
        RegistryEntry {
            name: "lv_sk_plus",
            description: "Lotka-Volterra, A = [[-1,1,0],[-2,-1,0],[0,0,-1]], tau = 0, gamma = 1",
            build: || example3_lv(zeros(), [1; 3], sk_plus_matrix(), BoundarySpec::neumann()).expect("valid"),
        },
        RegistryEntry {
            name: "weighted_sum_counterexample",
            description: "(v^5 - u^6, w^7 - 5v^5, u^6 - 5w^7), weighted sums hold, plain sums fail",
            build: || intro_counterexample(rational::int(5), rational::int(5)).expect("valid"),
        },
        RegistryEntry {
            name: "mass_exchange",
            description: "(v - u, w - v, u - w), conserves total mass",
            build: mass_exchange,
        },
        RegistryEntry { name: "cubic_blowup", description: "f = g = h = uvw, blows up", build: cubic_blowup },
    ]
}

pub fn find(name: &str) -> Result<ModelSpec> {
    registry().iter().find(|e| e.name == name).map(RegistryEntry::build).ok_or_else(|| {
        let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        Error::config(format!("unknown model `{name}`; known models: {}", names.join(", ")))
    })
}

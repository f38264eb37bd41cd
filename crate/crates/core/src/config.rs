//! Run configuration shared by every CLI workflow.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::checker::{IwscWeights, SamplerConfig};
use crate::error::{Error, Result};
use crate::lyapunov::{DiffusionTriple, HpSpec, SearchBudget, Theorem, Variant};
use crate::poly::Poly3;
use crate::rational::{self, Rational};
use crate::sim::{BoundarySpec, DomainGrid, InitialData, SimConfig};
use crate::zoo::{self, InteractionMatrix, ModelSpec};

/// A model given by registry name, by constructor parameters, or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Named(String),
    Builder(ModelBuilder),
    Inline(Box<ModelSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelBuilder {
    Example1 {
        l: u32,
        q: u32,
        r: u32,
        #[serde(with = "rational::serde_rational")]
        a: Rational,
        #[serde(with = "rational::serde_rational")]
        b: Rational,
        #[serde(with = "rational::serde_rational")]
        c: Rational,
    },
    Example2 {
        psi: [Poly3; 3],
        zeta: [rational::Q; 3],
        s: [rational::Q; 3],
    },
    Example3Lv {
        tau: [rational::Q; 3],
        gamma: [u32; 3],
        matrix: InteractionMatrix,
    },
    IntroCounterexample {
        #[serde(with = "rational::serde_rational")]
        b: Rational,
        #[serde(with = "rational::serde_rational")]
        c: Rational,
    },
}

impl ModelRef {
    pub fn resolve(&self) -> Result<ModelSpec> {
        let unq = |a: &[rational::Q; 3]| a.clone().map(|x| x.0);
        match self {
            ModelRef::Named(name) => zoo::find(name),
            ModelRef::Inline(spec) => Ok((**spec).clone()),
            ModelRef::Builder(b) => match b {
                ModelBuilder::Example1 { l, q, r, a, b, c } => {
                    zoo::example1(*l, *q, *r, a.clone(), b.clone(), c.clone())
                }
                ModelBuilder::Example2 { psi, zeta, s } => zoo::example2(psi.clone(), unq(zeta), unq(s)),
                ModelBuilder::Example3Lv { tau, gamma, matrix } => {
                    zoo::example3_lv(unq(tau), *gamma, matrix.clone(), BoundarySpec::neumann())
                }
                ModelBuilder::IntroCounterexample { b, c } => zoo::intro_counterexample(b.clone(), c.clone()),
            },
        }
    }
}

/// How the energy `H_p` monitored during a run is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergyMode {
    /// Parameters from the theorem rule; the theorem follows the weight
    /// branch when not given.
    Auto {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theorem: Option<Theorem>,
    },
    Explicit {
        p: u32,
        #[serde(with = "rational::serde_rational")]
        theta: Rational,
        #[serde(with = "rational::serde_rational")]
        sigma: Rational,
        #[serde(default = "default_variant")]
        variant: Variant,
    },
}

fn default_variant() -> Variant {
    Variant::Thm1
}

impl Default for EnergyMode {
    fn default() -> Self {
        EnergyMode::Auto { theorem: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub trajectory: String,
    pub monitor: String,
    pub report: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            trajectory: "trajectory.csv".into(),
            monitor: "monitor.json".into(),
            report: "report.json".into(),
        }
    }
}

fn default_model() -> ModelRef {
    ModelRef::Named("example1".into())
}

fn one() -> Rational {
    Rational::one()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: ModelRef,
    /// Overrides the model's diffusion coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionTriple>,
    /// Overrides the model's boundary conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    /// Overrides the model's suggested weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<IwscWeights>,
    #[serde(default = "one", with = "rational::serde_rational")]
    pub isc_r: Rational,
    #[serde(default)]
    pub energy: EnergyMode,
    #[serde(default)]
    pub grid: DomainGrid,
    #[serde(default = "defaults::t_end")]
    pub t_end: f64,
    #[serde(default = "defaults::record_dt")]
    pub record_dt: f64,
    #[serde(default = "defaults::safety")]
    pub safety: f64,
    #[serde(default = "defaults::blowup_threshold")]
    pub blowup_threshold: f64,
    #[serde(default = "defaults::pos_tol")]
    pub pos_tol: f64,
    #[serde(default = "defaults::k0_tol")]
    pub k0_tol: f64,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub seed: u64,
    /// Falsification sampler; its seed defaults to `seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub search: SearchBudget,
    #[serde(default)]
    pub output: OutputPaths,
}

mod defaults {
    use crate::sim::SimConfig;
    pub fn t_end() -> f64 {
        SimConfig::default().t_end
    }
    pub fn record_dt() -> f64 {
        SimConfig::default().record_dt
    }
    pub fn safety() -> f64 {
        SimConfig::default().safety
    }
    pub fn blowup_threshold() -> f64 {
        SimConfig::default().blowup_threshold
    }
    pub fn pos_tol() -> f64 {
        SimConfig::default().pos_tol
    }
    pub fn k0_tol() -> f64 {
        SimConfig::default().k0_tol
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn for_model(model: ModelRef) -> Self {
        RunConfig { model, ..RunConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config().validate().map_err(|e| Error::config(e.to_string()))?;
        self.initial.validate().map_err(|e| Error::config(e.to_string()))?;
        if self.isc_r < Rational::one() {
            return Err(Error::config("isc_r must be at least 1"));
        }
        if let EnergyMode::Explicit { p, theta, sigma, variant } = &self.energy {
            HpSpec::new(*p, theta.clone(), sigma.clone(), *variant).map_err(|e| Error::config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            grid: self.grid.clone(),
            t_end: self.t_end,
            record_dt: self.record_dt,
            safety: self.safety,
            blowup_threshold: self.blowup_threshold,
            pos_tol: self.pos_tol,
            k0_tol: self.k0_tol,
            ..SimConfig::default()
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        self.sampler.clone().unwrap_or_else(|| SamplerConfig::with_seed(self.seed))
    }

    /// The model with config overrides applied.
    pub fn resolve_model(&self) -> Result<ModelSpec> {
        let mut m = self.model.resolve()?;
        if let Some(d) = self.diffusion {
            m.diffusion = d;
        }
        if let Some(bc) = self.boundary {
            m.boundary = bc;
        }
        if let Some(w) = &self.weights {
            m.weights = Some(w.clone());
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn empty_config_uses_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.model, ModelRef::Named("example1".into()));
        assert_eq!(cfg.grid, DomainGrid::default());
        assert_eq!(cfg.energy, EnergyMode::Auto { theorem: None });
        assert_eq!(cfg.sim_config(), SimConfig::default());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_json(r#"{"t_end": 1.0, "tend": 2.0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"energy": {"mode": "auto", "p": 2}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"output": {"csv": "x"}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"t_end": -1.0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"t_end": 1.0"#).is_err());
    }

    #[test]
    fn model_references() {
        let named = RunConfig::from_json(r#"{"model": "lv_sk_minus"}"#).unwrap();
        assert_eq!(named.resolve_model().unwrap().name, "lv_sk_minus");

        let built =
            RunConfig::from_json(r#"{"model": {"example1": {"l": 2, "q": 2, "r": 2, "a": 1, "b": "3/2", "c": 1.5}}}"#)
                .unwrap();
        let m = built.resolve_model().unwrap();
        assert_eq!(m.metadata["B"], "3/2");
        assert_eq!(m.weights.unwrap().lambda2(), &ratio(3, 2));

        let inline = serde_json::to_string(&zoo::mass_exchange()).unwrap();
        let cfg = RunConfig::from_json(&format!(r#"{{"model": {inline}, "weights": {{"lambda1": 2, "lambda2": 3}}}}"#))
            .unwrap();
        let m = cfg.resolve_model().unwrap();
        assert_eq!(m.reactions, zoo::mass_exchange().reactions);
        assert_eq!(m.weights.unwrap().lambda2(), &int(3));

        assert!(RunConfig::from_json(r#"{"model": "nope"}"#).unwrap().resolve_model().is_err());
        assert!(RunConfig::from_json(r#"{"model": {"example9": {}}}"#).is_err());
    }

    #[test]
    fn explicit_energy_is_validated() {
        let ok = r#"{"energy": {"mode": "explicit", "p": 3, "theta": "11/10", "sigma": 2}}"#;
        assert!(RunConfig::from_json(ok).is_ok());
        let bad = r#"{"energy": {"mode": "explicit", "p": 0, "theta": 1, "sigma": 1}}"#;
        assert!(RunConfig::from_json(bad).is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::from_json(r#"{"model": "cubic_blowup", "seed": 9, "t_end": 0.5}"#).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }
}

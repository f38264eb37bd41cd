//! The `check → params → simulate` workflows behind the CLI.

use serde::{Deserialize, Serialize};

use crate::checker::{check_all, check_growth, check_mass_control, Branch, ConditionReport, IwscWeights, Overall};
use crate::config::{EnergyMode, RunConfig};
use crate::error::{Error, Result};
use crate::lyapunov::{
    minors_audit, theorem_params, DiffusionTriple, HpSpec, MinorsAuditRow, SearchBudget, Theorem, TheoremParams,
};
use crate::rational;
use crate::sim::{self, BoundaryFamily, MonitorVerdict, TrajectoryRecord};
use crate::zoo::ModelSpec;

/// Where the weights used by a workflow came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsSource {
    Config,
    Model,
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub model: String,
    pub weights: IwscWeights,
    pub overall: Overall,
    pub all_constants_zero: bool,
    pub conditions: ConditionReport,
}

/// Weights from the config, else the model's suggestion.
fn stated_weights(cfg: &RunConfig, model: &ModelSpec) -> Option<(IwscWeights, WeightsSource)> {
    match (&cfg.weights, &model.weights) {
        (Some(w), _) => Some((w.clone(), WeightsSource::Config)),
        (None, Some(w)) => Some((w.clone(), WeightsSource::Model)),
        _ => None,
    }
}

pub fn run_check(cfg: &RunConfig) -> Result<CheckReport> {
    let model = cfg.resolve_model()?;
    let (weights, _) = stated_weights(cfg, &model)
        .ok_or_else(|| Error::config("no weights: set `weights` in the config (the model suggests none)"))?;
    let conditions = check_all(&model.reactions, &weights, &cfg.isc_r, &cfg.sampler())?;
    Ok(CheckReport {
        model: model.name,
        weights,
        overall: conditions.overall(),
        all_constants_zero: conditions.all_constants_zero(),
        conditions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsReport {
    pub diffusion: DiffusionTriple,
    #[serde(flatten)]
    pub params: TheoremParams,
    pub minors_audit: Vec<MinorsAuditRow>,
}

pub fn run_params(
    d: &DiffusionTriple,
    m: u32,
    space_dim: u32,
    theorem: Theorem,
    budget: &SearchBudget,
) -> Result<ParamsReport> {
    let params = theorem_params(theorem, d, m, space_dim, budget)?;
    let minors_audit = minors_audit(d, &params.theta, &params.sigma, params.p)?;
    Ok(ParamsReport { diffusion: *d, params, minors_audit })
}

pub fn hp_spec(params: &TheoremParams) -> HpSpec {
    HpSpec { p: params.p, theta: params.theta.clone(), sigma: params.sigma.clone(), variant: params.theorem.variant() }
}

#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub model: ModelSpec,
    pub energy: HpSpec,
    pub records: Vec<TrajectoryRecord>,
    pub monitor: MonitorVerdict,
}

impl SimulationOutput {
    pub fn csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        sim::write_csv(&self.records, &mut buf)?;
        Ok(buf)
    }
}

/// Energy for a run: explicit, or from the theorem rule with `m` from the
/// growth check and `N` the grid dimension.
pub fn resolve_energy(cfg: &RunConfig, model: &ModelSpec) -> Result<HpSpec> {
    match &cfg.energy {
        EnergyMode::Explicit { p, theta, sigma, variant } => HpSpec::new(*p, theta.clone(), sigma.clone(), *variant),
        EnergyMode::Auto { theorem } => {
            let theorem = theorem.unwrap_or_else(|| match stated_weights(cfg, model) {
                Some((w, _)) => Theorem::for_branch(w.branch()),
                None => Theorem::One,
            });
            let m = check_growth(&model.reactions).m;
            let params = theorem_params(theorem, &model.diffusion, m, cfg.grid.dim() as u32, &cfg.search)?;
            Ok(hp_spec(&params))
        }
    }
}

pub fn simulate_with(cfg: &RunConfig, model: ModelSpec, energy: HpSpec) -> Result<SimulationOutput> {
    let sim_model = model.sim_model()?;
    let sim_cfg = cfg.sim_config();
    let initial = cfg.initial.build(&sim_cfg.grid, cfg.seed)?;
    let k1 = check_mass_control(&model.reactions, &cfg.sampler()).constant.map(|k| rational::to_f64(&k));
    let out = sim::run(&sim_model, &sim_cfg, initial, &energy, k1)?;
    Ok(SimulationOutput { model, energy, records: out.records, monitor: out.monitor })
}

pub fn run_simulate(cfg: &RunConfig) -> Result<SimulationOutput> {
    let model = cfg.resolve_model()?;
    let energy = resolve_energy(cfg, &model)?;
    simulate_with(cfg, model, energy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyOutcome {
    /// A theorem applies and the run stayed below the blow-up threshold.
    Bounded,
    /// A theorem applies but the run was flagged for blow-up.
    BlowUp,
    AnyFalsified,
    AnyUnknown,
    SearchFailed,
    NoneApplies,
}

impl VerifyOutcome {
    pub fn exit_code(self) -> i32 {
        match self {
            VerifyOutcome::Bounded => 0,
            VerifyOutcome::AnyFalsified => 2,
            VerifyOutcome::AnyUnknown => 3,
            VerifyOutcome::SearchFailed => 4,
            VerifyOutcome::BlowUp => 5,
            VerifyOutcome::NoneApplies => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub model: String,
    pub outcome: VerifyOutcome,
    /// 1 or 2 under homogeneous Neumann conditions, 3 or 4 otherwise.
    pub theorem: Option<u8>,
    pub boundary_family: BoundaryFamily,
    pub weights: Option<IwscWeights>,
    pub weights_source: Option<WeightsSource>,
    pub params: Option<TheoremParams>,
    /// `K₁..K₄ = 0` and all `β = 0`: the uniform-in-time regime.
    pub uniform_bound_expected: bool,
    pub reason: Option<String>,
    pub conditions: Option<ConditionReport>,
    pub monitor: Option<MonitorVerdict>,
}

/// Result of [`run_verify`]; `simulation` is present when a run happened.
pub struct Verified {
    pub report: VerifyReport,
    pub simulation: Option<SimulationOutput>,
}

fn theorem_label(theorem: Theorem, family: BoundaryFamily) -> u8 {
    let base = u8::from(theorem);
    if family == BoundaryFamily::Neumann {
        base
    } else {
        base + 2
    }
}

/// Checks, picks the theorem by weight branch, computes its parameters and
/// simulates with the matching energy.
///
/// Weights stated by the model that miss the thresholds are replaced by the
/// thresholds themselves when those still satisfy every condition. Weights
/// stated in the config are taken as given.
pub fn run_verify(cfg: &RunConfig) -> Result<Verified> {
    let model = cfg.resolve_model()?;
    let family = model.boundary.family();
    let sampler = cfg.sampler();
    let m = check_growth(&model.reactions).m;
    let n = cfg.grid.dim() as u32;
    let mut report = VerifyReport {
        model: model.name.clone(),
        outcome: VerifyOutcome::NoneApplies,
        theorem: None,
        boundary_family: family,
        weights: None,
        weights_source: None,
        params: None,
        uniform_bound_expected: false,
        reason: None,
        conditions: None,
        monitor: None,
    };
    let finish = |mut report: VerifyReport, outcome, reason: String| {
        report.outcome = outcome;
        report.reason = Some(reason);
        Ok(Verified { report, simulation: None })
    };

    let params_for = |branch: Branch| theorem_params(Theorem::for_branch(branch), &model.diffusion, m, n, &cfg.search);
    let check = |w: &IwscWeights| check_all(&model.reactions, w, &cfg.isc_r, &sampler);

    let stated = stated_weights(cfg, &model);
    let mut chosen: Option<(IwscWeights, WeightsSource, TheoremParams, ConditionReport)> = None;

    if let Some((w, source)) = &stated {
        let conditions = check(w)?;
        report.weights = Some(w.clone());
        report.weights_source = Some(*source);
        match conditions.overall() {
            Overall::AnyFalsified => {
                report.conditions = Some(conditions);
                return finish(report, VerifyOutcome::AnyFalsified, "a structural condition is falsified".into());
            }
            Overall::AnyUnknown => {
                report.conditions = Some(conditions);
                return finish(report, VerifyOutcome::AnyUnknown, "a structural condition is undecided".into());
            }
            Overall::AllCertified => {}
        }
        let params = match params_for(w.branch()) {
            Ok(p) => p,
            Err(Error::SearchFailed(msg)) => {
                report.conditions = Some(conditions);
                return finish(report, VerifyOutcome::SearchFailed, msg);
            }
            Err(e) => return Err(e),
        };
        if params.admits(w) {
            chosen = Some((w.clone(), *source, params, conditions));
        } else {
            let miss = format!(
                "weights ({}, {}) miss the thresholds ({:.6}, {:.6})",
                rational::format(w.lambda1()),
                rational::format(w.lambda2()),
                params.thresholds_f64[0],
                params.thresholds_f64[1]
            );
            if *source == WeightsSource::Model {
                let tw = params.threshold_weights()?;
                let tc = check(&tw)?;
                if tc.overall() == Overall::AllCertified {
                    chosen = Some((tw, WeightsSource::Threshold, params, tc));
                } else {
                    report.conditions = Some(conditions);
                    report.params = Some(params);
                    return finish(
                        report,
                        VerifyOutcome::NoneApplies,
                        format!("{miss}, and the threshold weights fail the conditions"),
                    );
                }
            } else {
                report.conditions = Some(conditions);
                report.params = Some(params);
                return finish(report, VerifyOutcome::NoneApplies, miss);
            }
        }
    } else {
        let mut last = None;
        for branch in [Branch::Above1, Branch::Below1] {
            let params = match params_for(branch) {
                Ok(p) => p,
                Err(Error::SearchFailed(msg)) => return finish(report, VerifyOutcome::SearchFailed, msg),
                Err(e) => return Err(e),
            };
            let tw = params.threshold_weights()?;
            let tc = check(&tw)?;
            if tc.overall() == Overall::AllCertified {
                chosen = Some((tw, WeightsSource::Threshold, params, tc));
                break;
            }
            last = Some(tc);
        }
        if chosen.is_none() {
            let conditions = last.expect("both branches tried");
            let non_weighted_falsified = conditions.quasi_positive.is_falsified()
                || conditions.mass_control.verdict.is_falsified()
                || conditions.growth.verdict.is_falsified();
            report.conditions = Some(conditions);
            if non_weighted_falsified {
                return finish(report, VerifyOutcome::AnyFalsified, "a structural condition is falsified".into());
            }
            return finish(report, VerifyOutcome::NoneApplies, "no threshold weights satisfy the conditions".into());
        }
    }

    let (weights, source, params, conditions) = chosen.expect("set above");
    report.theorem = Some(theorem_label(params.theorem, family));
    report.uniform_bound_expected = conditions.all_constants_zero() && model.boundary.homogeneous();
    report.weights = Some(weights);
    report.weights_source = Some(source);
    report.conditions = Some(conditions);
    let energy = hp_spec(&params);
    report.params = Some(params);
    let simulation = simulate_with(cfg, model, energy)?;
    report.outcome = if simulation.monitor.blowup_suspected { VerifyOutcome::BlowUp } else { VerifyOutcome::Bounded };
    report.monitor = Some(simulation.monitor.clone());
    Ok(Verified { report, simulation: Some(simulation) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelRef;
    use crate::rational::{int, ratio};

    fn quick(model: ModelRef) -> RunConfig {
        RunConfig {
            t_end: 1.0,
            record_dt: 0.1,
            grid: crate::sim::DomainGrid::interval(10.0, 32).unwrap(),
            ..RunConfig::for_model(model)
        }
    }

    fn example1(b: &str) -> ModelRef {
        let json = format!(r#"{{"example1": {{"l": 2, "q": 2, "r": 2, "a": 1, "b": "{b}", "c": "{b}"}}}}"#);
        serde_json::from_str(&json).unwrap()
    }

    #[test]
    fn check_examples() {
        let mut cfg = quick(ModelRef::Named("weighted_sum_counterexample".into()));
        cfg.weights = Some(IwscWeights::new(int(4), int(4)).unwrap());
        let r = run_check(&cfg).unwrap();
        assert_eq!(r.overall, Overall::AllCertified);
        cfg.weights = Some(IwscWeights::new(int(6), int(6)).unwrap());
        assert_eq!(run_check(&cfg).unwrap().overall, Overall::AnyFalsified);

        let no_weights = quick(ModelRef::Named("mass_exchange".into()));
        assert!(matches!(run_check(&no_weights), Err(Error::Config(_))));
    }

    #[test]
    fn params_examples() {
        let b = SearchBudget::default();
        let r = run_params(&DiffusionTriple::equal(), 1, 1, Theorem::One, &b).unwrap();
        assert_eq!(r.params.p, 2);
        assert_eq!(r.minors_audit.len(), 1);
        let r = run_params(&DiffusionTriple::new([1.0, 4.0, 9.0]).unwrap(), 1, 1, Theorem::One, &b).unwrap();
        assert!(r.params.theta > ratio(5, 4));
        assert!(r.minors_audit.iter().all(|row| row.positive));
        let r = run_params(&DiffusionTriple::equal(), 2, 2, Theorem::Two, &b).unwrap();
        assert!(r.params.thresholds_f64.iter().all(|t| *t < 1.0));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["p"], 5);
        assert!(json["minors_audit"].is_array());
    }

    #[test]
    fn verify_example1_applies_theorem_one() {
        let v = run_verify(&quick(example1("2"))).unwrap();
        let r = &v.report;
        assert_eq!(r.outcome, VerifyOutcome::Bounded, "{r:?}");
        assert_eq!(r.theorem, Some(1));
        let p = r.params.as_ref().unwrap();
        assert_eq!((p.p, p.theta.clone(), p.sigma.clone()), (4, ratio(11, 10), ratio(11, 10)));
        assert_eq!(r.weights_source, Some(WeightsSource::Model));
        assert!(r.uniform_bound_expected);
    }

    #[test]
    fn verify_example1_with_small_rates_applies_nothing() {
        let v = run_verify(&quick(example1("3/2"))).unwrap();
        assert_eq!(v.report.outcome, VerifyOutcome::NoneApplies);
        assert_eq!(v.report.outcome.exit_code(), 6);
        assert!(v.simulation.is_none());
    }

    #[test]
    fn verify_sk_plus_selects_theorem_two() {
        let v = run_verify(&quick(ModelRef::Named("lv_sk_plus".into()))).unwrap();
        assert_eq!(v.report.theorem, Some(2));
        assert_eq!(v.report.params.as_ref().unwrap().theorem, Theorem::Two);
        assert_eq!(v.report.weights_source, Some(WeightsSource::Threshold));
        assert_eq!(v.report.outcome, VerifyOutcome::Bounded);
    }

    #[test]
    fn verify_labels_general_boundary_theorems() {
        let mut cfg = quick(ModelRef::Named("lv_sk_minus".into()));
        cfg.boundary = Some(crate::sim::BoundarySpec::dirichlet());
        let v = run_verify(&cfg).unwrap();
        assert_eq!(v.report.theorem, Some(3));
        assert_eq!(v.report.boundary_family, BoundaryFamily::Dirichlet);
    }

    #[test]
    fn verify_falsified_weights() {
        let mut cfg = quick(ModelRef::Named("weighted_sum_counterexample".into()));
        cfg.weights = Some(IwscWeights::new(int(6), int(6)).unwrap());
        assert_eq!(run_verify(&cfg).unwrap().report.outcome, VerifyOutcome::AnyFalsified);
    }

    #[test]
    fn verify_flags_blowup() {
        let mut cfg = quick(ModelRef::Named("cubic_blowup".into()));
        cfg.initial = crate::sim::InitialData::Uniform { values: [2.0; 3] };
        let v = run_verify(&cfg).unwrap();
        // uvw has no weighted-sum bound with Λ, so no theorem applies
        assert_ne!(v.report.outcome, VerifyOutcome::Bounded);
    }

    #[test]
    fn simulate_is_deterministic() {
        let mut cfg = quick(ModelRef::Named("lv_sk_minus".into()));
        cfg.seed = 17;
        let a = run_simulate(&cfg).unwrap().csv().unwrap();
        assert_eq!(a, run_simulate(&cfg).unwrap().csv().unwrap());
        cfg.seed = 18;
        assert_ne!(a, run_simulate(&cfg).unwrap().csv().unwrap());
    }
}

use serde::{Deserialize, Serialize};

use super::{SimConfig, TrajectoryRecord};
use crate::lyapunov::{HpSpec, Variant};
use crate::rational;

pub(super) struct RunStats {
    pub steps: u64,
    pub rejections: u64,
    pub min_value: f64,
    pub blowup_time: Option<f64>,
}

/// Nonnegative least-squares fit of `ΔL̃/Δt ≈ M₁L̃ + M₂L̃^((p−1)/p)` over
/// forward differences. `max_residual` is the largest positive part of the
/// misfit, i.e. how far the fitted inequality fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallFit {
    pub m1: f64,
    pub m2: f64,
    pub max_residual: f64,
    pub samples: usize,
}

pub fn fit_gronwall(times: &[f64], tilde: &[f64], p: u32) -> GronwallFit {
    let expo = (p as f64 - 1.0) / p as f64;
    let mut rows = Vec::new();
    for k in 0..tilde.len().saturating_sub(1) {
        let dt = times[k + 1] - times[k];
        if dt > 0.0 && tilde[k].is_finite() && tilde[k + 1].is_finite() {
            let y = (tilde[k + 1] - tilde[k]) / dt;
            rows.push((tilde[k], tilde[k].max(0.0).powf(expo), y));
        }
    }
    let (mut saa, mut sab, mut sbb, mut say, mut sby) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, b, y) in &rows {
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        say += a * y;
        sby += b * y;
    }
    let sse = |m1: f64, m2: f64| rows.iter().map(|&(a, b, y)| (y - m1 * a - m2 * b).powi(2)).sum::<f64>();
    let mut candidates = vec![(0.0, 0.0)];
    if saa > 0.0 {
        candidates.push(((say / saa).max(0.0), 0.0));
    }
    if sbb > 0.0 {
        candidates.push((0.0, (sby / sbb).max(0.0)));
    }
    let det = saa * sbb - sab * sab;
    if det > 1e-12 * saa * sbb {
        let m1 = (say * sbb - sby * sab) / det;
        let m2 = (sby * saa - say * sab) / det;
        if m1 >= 0.0 && m2 >= 0.0 {
            candidates.push((m1, m2));
        }
    }
    let (m1, m2) = candidates.into_iter().min_by(|x, y| sse(x.0, x.1).total_cmp(&sse(y.0, y.1))).expect("nonempty");
    let max_residual = rows.iter().map(|&(a, b, y)| (y - m1 * a - m2 * b).max(0.0)).fold(0.0, f64::max);
    GronwallFit { m1, m2, max_residual, samples: rows.len() }
}

/// Largest `Δmass/Δt − K₁∫Λ` over the run; `∫Λ = |Ω| + mass`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassBudget {
    pub k1: f64,
    pub max_excess: f64,
    pub tol: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub completed: bool,
    pub t_final: f64,
    pub blowup_suspected: bool,
    pub blowup_time: Option<f64>,
    pub steps: u64,
    pub rejections: u64,
    pub records: usize,
    pub initial_linf: [f64; 3],
    pub final_linf: [f64; 3],
    pub sup_linf: [f64; 3],
    pub min_value: f64,
    pub energy_p: u32,
    pub energy_theta: String,
    pub energy_sigma: String,
    pub energy_variant: Variant,
    /// `L̃(t_{k+1}) ≤ L̃(t_k)·(1 + k0_tol)` at every record.
    pub k0_monotone: bool,
    pub k0_tol: f64,
    pub k0_max_rel_increase: f64,
    pub gronwall_fit: GronwallFit,
    pub mass_budget: Option<MassBudget>,
    /// `lp_sum^p ≤ energy·(1 + 10⁻¹⁰)` at every record.
    pub norm_energy_consistent: bool,
}

pub const MASS_BUDGET_TOL: f64 = 1e-8;

impl MonitorVerdict {
    pub(super) fn evaluate(
        records: &[TrajectoryRecord],
        energy: &HpSpec,
        tilde_scale: f64,
        cfg: &SimConfig,
        mass_k1: Option<f64>,
        stats: RunStats,
    ) -> MonitorVerdict {
        let first = records.first().expect("initial record");
        let last = records.last().expect("initial record");
        let times: Vec<f64> = records.iter().map(|r| r.t).collect();
        let tilde: Vec<f64> = records.iter().map(|r| r.energy * tilde_scale).collect();

        let mut max_inc = f64::NEG_INFINITY;
        let mut monotone = true;
        for w in tilde.windows(2) {
            let inc = if w[0] > 0.0 { (w[1] - w[0]) / w[0] } else { w[1] - w[0] };
            max_inc = max_inc.max(inc);
            if !(w[1] <= w[0] * (1.0 + cfg.k0_tol)) {
                monotone = false;
            }
        }
        if tilde.len() < 2 {
            max_inc = 0.0;
        }

        let mut sup = [0.0_f64; 3];
        for r in records {
            for s in 0..3 {
                sup[s] = sup[s].max(r.linf[s]);
            }
        }

        let mass_budget = mass_k1.map(|k1| {
            let volume = cfg.grid.volume();
            let mut worst = f64::NEG_INFINITY;
            let mut holds = true;
            for w in records.windows(2) {
                let dt = w[1].t - w[0].t;
                if dt <= 0.0 {
                    continue;
                }
                let lambda_int = volume + w[0].mass;
                let excess = (w[1].mass - w[0].mass) / dt - k1 * lambda_int;
                worst = worst.max(excess);
                if excess > MASS_BUDGET_TOL * (1.0 + lambda_int) {
                    holds = false;
                }
            }
            MassBudget { k1, max_excess: if worst.is_finite() { worst } else { 0.0 }, tol: MASS_BUDGET_TOL, holds }
        });

        let p = energy.p as i32;
        let norm_energy_consistent = records
            .iter()
            .filter(|r| r.energy.is_finite() && r.lp_sum.is_finite())
            .all(|r| r.lp_sum.powi(p) <= r.energy * (1.0 + 1e-10));

        MonitorVerdict {
            completed: stats.blowup_time.is_none(),
            t_final: last.t,
            blowup_suspected: last.blowup(),
            blowup_time: stats.blowup_time,
            steps: stats.steps,
            rejections: stats.rejections,
            records: records.len(),
            initial_linf: first.linf,
            final_linf: last.linf,
            sup_linf: sup,
            min_value: stats.min_value,
            energy_p: energy.p,
            energy_theta: rational::format(&energy.theta),
            energy_sigma: rational::format(&energy.sigma),
            energy_variant: energy.variant,
            k0_monotone: monotone,
            k0_tol: cfg.k0_tol,
            k0_max_rel_increase: max_inc,
            gronwall_fit: fit_gronwall(&times, &tilde, energy.p),
            mass_budget,
            norm_energy_consistent,
        }
    }
}

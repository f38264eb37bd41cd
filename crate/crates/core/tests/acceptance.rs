//! End-to-end acceptance suite. Prints one `PASS`/`FAIL` line per criterion
//! and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdx3_core::checker::{check_isc, check_iwsc, lemma_liws_probe, IscMatrix, IwscWeights, SamplerConfig};
use rdx3_core::config::ModelRef;
use rdx3_core::lyapunov::{
    build_bij, build_energy, grad_energy_closed_form, hess_energy_closed_form, leading_minors_positive,
    theta_sigma_feasible, DiffusionTriple, HpSpec, Variant, HESSIAN_ORDER,
};
use rdx3_core::pipeline::{self, VerifyOutcome};
use rdx3_core::poly::{Axis, Poly3};
use rdx3_core::rational::{int, ratio, to_f64};
use rdx3_core::sim::{choose_dt, laplacian_apply, step, BoundaryKind, DomainGrid, Workspace};
use rdx3_core::{zoo, Rational, RunConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rat(rng: &mut ChaCha8Rng, num: std::ops::RangeInclusive<i64>, den: std::ops::RangeInclusive<i64>) -> Rational {
    ratio(rng.random_range(num), rng.random_range(den))
}

fn derivative_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for p in 1..=6 {
        for _ in 0..20 {
            let theta = rat(&mut rng, 1..=60, 1..=20);
            let sigma = rat(&mut rng, 1..=60, 1..=20);
            for variant in [Variant::Thm1, Variant::Thm2] {
                let spec = HpSpec::new(p, theta.clone(), sigma.clone(), variant).map_err(|e| e.to_string())?;
                let h = build_energy(&spec);
                let grad = grad_energy_closed_form(&spec);
                for axis in Axis::ALL {
                    ensure(grad[axis.index()] == h.partial_derivative(axis), format!("gradient p={p} {axis:?}"))?;
                    compared += 1;
                }
                if p >= 2 {
                    let hess = hess_energy_closed_form(&spec).map_err(|e| e.to_string())?;
                    for (k, (a, b)) in HESSIAN_ORDER.iter().enumerate() {
                        let formal = h.partial_derivative(*a).partial_derivative(*b);
                        ensure(hess[k] == formal, format!("hessian p={p} ({a:?},{b:?})"))?;
                        compared += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{compared} exact polynomial comparisons"))
}

fn feasibility_implies_sylvester() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut accepted, mut drawn, mut matrices) = (0, 0, 0);
    while accepted < 200 {
        drawn += 1;
        let d = DiffusionTriple::new([0, 1, 2].map(|_| rng.random_range(1..=40) as f64 / 8.0))
            .map_err(|e| e.to_string())?;
        let theta = ratio(rng.random_range(17..=80), 16);
        let sigma = ratio(rng.random_range(17..=80), 16);
        if !theta_sigma_feasible(&d, &theta, &sigma) {
            continue;
        }
        accepted += 1;
        let p = rng.random_range(2..=8u32);
        for j in 0..=p - 2 {
            for i in 0..=j {
                let b = build_bij(&d, &theta, &sigma, i, j).map_err(|e| e.to_string())?;
                matrices += 1;
                ensure(
                    leading_minors_positive(&b),
                    format!("d={:?} theta={theta} sigma={sigma} (i,j)=({i},{j})", d.values()),
                )?;
            }
        }
    }
    Ok(format!("{accepted} feasible draws of {drawn}, {matrices} matrices, 0 failures"))
}

fn equal_diffusion_grid() -> Outcome {
    let d = DiffusionTriple::equal();
    let one = int(1);
    let mut checked = 0;
    for a in 1..=100 {
        for b in 1..=100 {
            let theta = ratio(a, 40);
            let sigma = ratio(b, 40);
            if theta == one || sigma == one {
                continue;
            }
            let expected = theta > one && sigma > one;
            ensure(theta_sigma_feasible(&d, &theta, &sigma) == expected, format!("theta={theta} sigma={sigma}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} grid points"))
}

fn iwsc_isc_separation() -> Outcome {
    let model = zoo::intro_counterexample(int(5), int(5)).map_err(|e| e.to_string())?;
    let weights = IwscWeights::new(int(4), int(4)).map_err(|e| e.to_string())?;
    let sampler = SamplerConfig::default();
    let run = || -> Result<String, String> {
        let iwsc = check_iwsc(&model.reactions, &weights, &sampler);
        ensure(iwsc.verdict.is_certified(), "IWSC not certified")?;
        ensure(iwsc.constants.iter().all(|k| k.as_ref().is_some_and(Zero::is_zero)), "IWSC constants not all zero")?;
        let isc = check_isc(&model.reactions, &int(1), &IscMatrix::identity(), &sampler).map_err(|e| e.to_string())?;
        let w = isc.verdict.witness().ok_or("ISC not falsified")?;
        let [u, v, x] = w.point;
        ensure(u == 0.0 && x == 0.0 && v > 0.0, format!("witness {:?} is off the second axis", w.point))?;
        Ok(format!("ISC witness {:?} ({})", w.point, w.label))
    };
    let first = run()?;
    ensure(first == run()?, "verdicts differ between runs")?;
    Ok(first)
}

fn liws_sampling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let linear: [[u32; 3]; 4] = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let nonlinear: [[u32; 3]; 6] = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [0, 1, 1], [1, 0, 1]];
    let mut points = 0;
    for instance in 0..50 {
        let alpha = rat(&mut rng, 1..=40, 1..=10);
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for e in linear {
            phi.push((e, int(rng.random_range(-3..=3))));
            psi.push((e, int(rng.random_range(-3..=3))));
        }
        for e in nonlinear {
            let f = int(rng.random_range(-3..=3));
            let worst = std::cmp::max(f.clone(), &alpha * &f).max(int(0));
            // every third instance sits exactly on the premise boundary
            let slack = if instance % 3 == 0 { int(0) } else { rat(&mut rng, 0..=4, 1..=2) };
            psi.push((e, -(worst + slack)));
            phi.push((e, f));
        }
        let phi = Poly3::from_terms(phi);
        let psi = Poly3::from_terms(psi);
        let lin_max = |q: &Poly3| linear.iter().map(|e| q.coefficient(*e)).fold(int(0), Rational::max);
        let c1 = lin_max(&(&phi + &psi));
        let c2 = lin_max(&(&phi.scale(&alpha) + &psi));
        let (lo, hi) = if alpha >= int(1) { (int(1), alpha.clone()) } else { (alpha.clone(), int(1)) };
        let t = ratio(rng.random_range(0..=100), 100);
        let alpha_star = &lo + &(&(&hi - &lo) * &t);
        let samples: Vec<[Rational; 3]> = (0..10_000)
            .map(|k| {
                let scale = [1, 100, 1 << 20][k % 3];
                [0, 1, 2].map(|_| ratio(rng.random_range(0..=64 * scale), 64))
            })
            .collect();
        let probe = lemma_liws_probe(&phi, &psi, &alpha, &c1, &c2, &alpha_star, &samples)
            .map_err(|e| format!("instance {instance}: {e}"))?;
        ensure(probe.holds(), format!("instance {instance}: violation at {:?}", probe.counterexample))?;
        points += probe.checked;
    }
    Ok(format!("50 instances, {points} points, 0 violations"))
}

fn config(json: &str) -> Result<RunConfig, String> {
    RunConfig::from_json(json).map_err(|e| e.to_string())
}

fn k0_monotonicity() -> Outcome {
    let cfg = config(r#"{"model": "lv_sk_minus", "grid": {"extents": [10.0], "cells": [128]}, "t_end": 50.0}"#)?;
    let sim = pipeline::run_simulate(&cfg).map_err(|e| e.to_string())?;
    let m = &sim.monitor;
    ensure(m.completed && !m.blowup_suspected, "run did not complete")?;
    ensure(m.k0_monotone, format!("recorded energy increased by {:e}", m.k0_max_rel_increase))?;

    // Every accepted step, not just the recorded ones.
    let model = sim.model.sim_model().map_err(|e| e.to_string())?;
    let grid = cfg.grid.clone();
    let h = build_energy(&sim.energy).compile();
    let energy = |s: &rdx3_core::sim::State| (0..grid.len()).map(|k| h.eval(&s.at(k))).sum::<f64>();
    let mut state = cfg.initial.build(&grid, cfg.seed).map_err(|e| e.to_string())?;
    let mut ws = Workspace::new(&grid);
    let mut prev = energy(&state);
    let mut worst = f64::NEG_INFINITY;
    let mut steps = 0u64;
    while state.t < cfg.t_end {
        let dt = choose_dt(&state, &model, &grid, cfg.safety).min(cfg.t_end - state.t);
        state = step(&state, &model, &grid, dt, &mut ws);
        let e = energy(&state);
        worst = worst.max((e - prev) / prev);
        prev = e;
        steps += 1;
    }
    ensure(worst <= 1e-8, format!("per-step relative increase {worst:e}"))?;

    for s in 0..3 {
        ensure(
            m.final_linf[s] <= m.initial_linf[s] + 1e-6,
            format!("species {s}: sup {} at T above {} at t=0", m.final_linf[s], m.initial_linf[s]),
        )?;
    }
    Ok(format!("{steps} steps, max relative increase {worst:.3e}, sup {:.4?} -> {:.4?}", m.initial_linf, m.final_linf))
}

fn mass_conservation() -> Outcome {
    let cfg = config(r#"{"model": "mass_exchange", "grid": {"extents": [10.0], "cells": [128]}, "t_end": 10.0}"#)?;
    let sim = pipeline::run_simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(sim.monitor.completed, "run did not complete")?;
    let m0 = sim.records[0].mass;
    let drift = sim.records.iter().map(|r| (r.mass - m0).abs()).fold(0.0, f64::max) / m0;
    ensure(drift <= 1e-8, format!("relative mass drift {drift:e}"))?;
    Ok(format!("{} records, relative drift {drift:.3e}", sim.records.len()))
}

fn blowup_oracle() -> Outcome {
    let cfg = config(
        r#"{"model": "cubic_blowup", "initial": {"kind": "uniform", "values": [2, 2, 2]},
            "grid": {"extents": [1.0], "cells": [16]}, "t_end": 1.0}"#,
    )?;
    let sim = pipeline::run_simulate(&cfg).map_err(|e| e.to_string())?;
    ensure(sim.monitor.blowup_suspected, "blow-up not flagged")?;
    let t = sim.monitor.blowup_time.ok_or("no blow-up time")?;
    ensure((t - 0.125).abs() <= 0.0125, format!("t* = {t}"))?;
    Ok(format!("t* = {t:.6}"))
}

fn theorem1_pipeline() -> Outcome {
    let model = zoo::example1(2, 2, 2, int(1), int(2), int(2)).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::for_model(ModelRef::Inline(Box::new(model)));
    cfg.diffusion = Some(DiffusionTriple::equal());
    cfg.t_end = 20.0;
    let verified = pipeline::run_verify(&cfg).map_err(|e| e.to_string())?;
    let r = &verified.report;
    ensure(r.outcome == VerifyOutcome::Bounded, format!("outcome {:?}: {:?}", r.outcome, r.reason))?;
    ensure(r.theorem == Some(1), format!("theorem {:?}", r.theorem))?;
    let params = r.params.as_ref().ok_or("no parameters")?;
    ensure(params.p == 4, format!("p = {}", params.p))?;
    ensure(params.theta == ratio(11, 10) && params.sigma == ratio(11, 10), "theta, sigma != 1.1")?;
    for t in [&params.lambda1_threshold, &params.lambda2_threshold] {
        let t = to_f64(t);
        ensure((t - 1.7716).abs() < 1e-4 && t <= 2.0, format!("threshold {t}"))?;
    }
    let m = r.monitor.as_ref().ok_or("no simulation")?;
    ensure(m.completed && !m.blowup_suspected && (m.t_final - 20.0).abs() < 1e-12, "run did not reach T = 20")?;
    let initial = m.initial_linf.iter().copied().fold(0.0, f64::max);
    let sup = m.sup_linf.iter().copied().fold(0.0, f64::max);
    ensure(sup.is_finite() && sup <= 10.0 * initial, format!("sup-norm grew to {sup}"))?;
    Ok(format!("theorem 1, p = 4, thresholds {:.6}, sup {sup:.4}", to_f64(&params.lambda1_threshold)))
}

fn laplacian_order() -> Outcome {
    let l = 2.0;
    let k = std::f64::consts::PI / l;
    let mut notes = Vec::new();
    for bc in [BoundaryKind::Neumann, BoundaryKind::Dirichlet] {
        let err = |cells: usize| -> Result<f64, String> {
            let grid = DomainGrid::interval(l, cells).map_err(|e| e.to_string())?;
            let shape = |x: f64| if bc == BoundaryKind::Neumann { (k * x).cos() } else { (k * x).sin() };
            let field: Vec<f64> = (0..cells).map(|c| shape(grid.center(c)[0])).collect();
            let mut out = Vec::new();
            laplacian_apply(&field, &grid, &bc, &mut out);
            Ok((0..cells).map(|c| (out[c] + k * k * field[c]).abs()).fold(0.0, f64::max))
        };
        let e = [err(64)?, err(128)?, err(256)?];
        for r in [e[0] / e[1], e[1] / e[2]] {
            ensure((3.5..=4.5).contains(&r), format!("{bc:?}: ratio {r}"))?;
            notes.push(format!("{r:.3}"));
        }
    }
    Ok(format!("ratios {}", notes.join(", ")))
}

fn determinism() -> Outcome {
    let text = r#"{"model": "lv_sk_minus", "grid": {"extents": [10.0], "cells": [64]}, "t_end": 5.0, "seed": 42}"#;
    let a = pipeline::run_simulate(&config(text)?).and_then(|s| s.csv()).map_err(|e| e.to_string())?;
    let b = pipeline::run_simulate(&config(text)?).and_then(|s| s.csv()).map_err(|e| e.to_string())?;
    ensure(a == b, "CSV differs between runs")?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("derivative closed forms equal formal derivatives", Some(Duration::from_secs(10)), derivative_equivalence),
        ("feasible (theta, sigma) give positive minors", Some(Duration::from_secs(30)), feasibility_implies_sylvester),
        ("equal diffusion reduces to theta, sigma > 1", Some(Duration::from_secs(5)), equal_diffusion_grid),
        ("weighted sums certify where plain sums fail", None, iwsc_isc_separation),
        ("interpolation lemma holds on samples", None, liws_sampling),
        ("energy nonincreasing when K = 0", Some(Duration::from_secs(60)), k0_monotonicity),
        ("mass conserved by exchange triple", None, mass_conservation),
        ("cubic blow-up time", None, blowup_oracle),
        ("example 1 verifies under theorem 1", Some(Duration::from_secs(60)), theorem1_pipeline),
        ("laplacian is second order", None, laplacian_order),
        ("simulate is deterministic", None, determinism),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = match (result, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name} ({elapsed:.2?}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name} ({elapsed:.2?}): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rdx3_bench::{energy_spec, lv_setup};
use rdx3_core::lyapunov::{build_energy, grad_energy_closed_form, hess_energy_closed_form};
use rdx3_core::sim::{choose_dt, step, Workspace};

fn poly(c: &mut Criterion) {
    let h = build_energy(&energy_spec(4));
    let f = h.compile();
    c.bench_function("poly_mul_h4_h4", |b| b.iter(|| black_box(&h) * black_box(&h)));
    c.bench_function("poly_eval_exact_h4", |b| {
        let x = [rdx3_core::rational::ratio(3, 2), rdx3_core::rational::int(2), rdx3_core::rational::ratio(1, 3)];
        b.iter(|| black_box(&h).eval_exact(black_box(&x)))
    });
    c.bench_function("poly_eval_f64_h4", |b| b.iter(|| f.eval(black_box(&[1.5, 2.0, 0.3]))));
}

fn energy(c: &mut Criterion) {
    for p in [4, 8] {
        let spec = energy_spec(p);
        c.bench_function(&format!("build_energy_p{p}"), |b| b.iter(|| build_energy(black_box(&spec))));
        c.bench_function(&format!("grad_closed_form_p{p}"), |b| b.iter(|| grad_energy_closed_form(black_box(&spec))));
        c.bench_function(&format!("hess_closed_form_p{p}"), |b| {
            b.iter(|| hess_energy_closed_form(black_box(&spec)).unwrap())
        });
    }
}

fn sim(c: &mut Criterion) {
    for cells in [128, 1024] {
        let (model, grid, state) = lv_setup(cells);
        let mut ws = Workspace::new(&grid);
        let dt = choose_dt(&state, &model, &grid, 0.5);
        c.bench_function(&format!("rk4_step_{cells}"), |b| {
            b.iter(|| step(black_box(&state), &model, &grid, dt, &mut ws))
        });
    }
}

criterion_group!(benches, poly, energy, sim);
criterion_main!(benches);

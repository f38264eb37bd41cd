//! Shared fixtures for the criterion benchmarks.

use rdx3_core::lyapunov::{HpSpec, Variant};
use rdx3_core::rational::ratio;
use rdx3_core::sim::{DomainGrid, InitialData, SimModel, State};
use rdx3_core::zoo;

pub fn energy_spec(p: u32) -> HpSpec {
    HpSpec::new(p, ratio(11, 10), ratio(11, 10), Variant::Thm1).expect("valid spec")
}

/// The SK⁻ Lotka-Volterra model on a 1-D grid with its default initial data.
pub fn lv_setup(cells: usize) -> (SimModel, DomainGrid, State) {
    let spec = zoo::find("lv_sk_minus").expect("registered");
    let grid = DomainGrid::interval(10.0, cells).expect("valid grid");
    let model = spec.sim_model().expect("valid model");
    let state = InitialData::default().build(&grid, 0).expect("valid data");
    (model, grid, state)
}

//! Method-of-lines finite differences on intervals and rectangles with
//! explicit RK4 in time.

mod domain;
mod initial;
mod monitor;
mod output;

pub use domain::{BoundaryFamily, BoundaryKind, BoundarySpec, DomainGrid, MIN_CELLS};
pub use initial::InitialData;
pub use monitor::{fit_gronwall, GronwallFit, MassBudget, MonitorVerdict};
pub use output::{write_csv, CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::checker::NonlinearityTriple;
use crate::error::{Error, Result};
use crate::lyapunov::{build_energy, HpSpec};
use crate::poly::{Axis, FloatPoly};
use crate::rational;

/// The three fields at time `t`, each stored row-major over the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub fields: [Vec<f64>; 3],
}

impl State {
    pub fn at(&self, cell: usize) -> [f64; 3] {
        [self.fields[0][cell], self.fields[1][cell], self.fields[2][cell]]
    }

    pub fn all_finite(&self) -> bool {
        self.fields.iter().flatten().all(|x| x.is_finite())
    }

    pub fn min_value(&self) -> f64 {
        self.fields.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.fields.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Float view of a reaction-diffusion model, ready for stepping.
#[derive(Clone, Debug)]
pub struct SimModel {
    diffusion: [f64; 3],
    reactions: [FloatPoly; 3],
    jacobian: [[FloatPoly; 3]; 3],
    boundary: BoundarySpec,
}

impl SimModel {
    /// Diffusion coefficients may be zero here (pure ODE mode).
    pub fn new(diffusion: [f64; 3], reactions: &NonlinearityTriple, boundary: BoundarySpec) -> Result<Self> {
        if diffusion.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::invalid("diffusion coefficients must be finite and nonnegative"));
        }
        let comps = reactions.components();
        Ok(SimModel {
            diffusion,
            reactions: comps.map(|p| p.compile()),
            jacobian: comps.map(|p| Axis::ALL.map(|a| p.partial_derivative(a).compile())),
            boundary,
        })
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.boundary
    }

    pub fn diffusion(&self) -> [f64; 3] {
        self.diffusion
    }

    pub fn reaction(&self, x: &[f64; 3]) -> [f64; 3] {
        [self.reactions[0].eval(x), self.reactions[1].eval(x), self.reactions[2].eval(x)]
    }

    /// `max_i Σ_j |∂R_i/∂x_j|` at `x`, a bound on the Jacobian's spectral radius.
    pub fn jacobian_row_sum(&self, x: &[f64; 3]) -> f64 {
        self.jacobian.iter().map(|row| row.iter().map(|d| d.eval(x).abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Semi-discrete right-hand side `dΔS + R(S)`.
    pub fn rhs(&self, grid: &DomainGrid, fields: &[Vec<f64>; 3], out: &mut [Vec<f64>; 3]) {
        for s in 0..3 {
            laplacian_apply(&fields[s], grid, self.boundary.species(s), &mut out[s]);
            let d = self.diffusion[s];
            out[s].iter_mut().for_each(|x| *x *= d);
        }
        for k in 0..grid.len() {
            let r = self.reaction(&[fields[0][k], fields[1][k], fields[2][k]]);
            for s in 0..3 {
                out[s][k] += r[s];
            }
        }
    }
}

/// Second-order five-point (three-point in 1D) Laplacian with ghost cells
/// supplied by `bc`.
pub fn laplacian_apply(field: &[f64], grid: &DomainGrid, bc: &BoundaryKind, out: &mut Vec<f64>) {
    out.clear();
    out.resize(field.len(), 0.0);
    let nx = grid.cells()[0];
    let ny = if grid.dim() == 2 { grid.cells()[1] } else { 1 };
    let hx = grid.spacing(0);
    let ihx2 = 1.0 / (hx * hx);
    for iy in 0..ny {
        let row = &field[iy * nx..(iy + 1) * nx];
        for ix in 0..nx {
            let c = row[ix];
            let left = if ix == 0 { bc.ghost(c, hx) } else { row[ix - 1] };
            let right = if ix + 1 == nx { bc.ghost(c, hx) } else { row[ix + 1] };
            out[iy * nx + ix] = (left - 2.0 * c + right) * ihx2;
        }
    }
    if grid.dim() == 2 {
        let hy = grid.spacing(1);
        let ihy2 = 1.0 / (hy * hy);
        for iy in 0..ny {
            for ix in 0..nx {
                let k = iy * nx + ix;
                let c = field[k];
                let down = if iy == 0 { bc.ghost(c, hy) } else { field[k - nx] };
                let up = if iy + 1 == ny { bc.ghost(c, hy) } else { field[k + nx] };
                out[k] += (down - 2.0 * c + up) * ihy2;
            }
        }
    }
}

/// Scratch buffers for [`step`].
pub struct Workspace {
    k: [[Vec<f64>; 3]; 4],
    tmp: [Vec<f64>; 3],
}

impl Workspace {
    pub fn new(grid: &DomainGrid) -> Self {
        let z = || [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
        Workspace { k: [z(), z(), z(), z()], tmp: z() }
    }
}

/// One classical RK4 step.
pub fn step(state: &State, model: &SimModel, grid: &DomainGrid, dt: f64, ws: &mut Workspace) -> State {
    let Workspace { k, tmp } = ws;
    let [k1, k2, k3, k4] = k;
    model.rhs(grid, &state.fields, k1);
    axpy(&state.fields, 0.5 * dt, k1, tmp);
    model.rhs(grid, tmp, k2);
    axpy(&state.fields, 0.5 * dt, k2, tmp);
    model.rhs(grid, tmp, k3);
    axpy(&state.fields, dt, k3, tmp);
    model.rhs(grid, tmp, k4);
    let mut fields = state.fields.clone();
    for s in 0..3 {
        for (i, y) in fields[s].iter_mut().enumerate() {
            *y += dt / 6.0 * (k1[s][i] + 2.0 * k2[s][i] + 2.0 * k3[s][i] + k4[s][i]);
        }
    }
    State { t: state.t + dt, fields }
}

fn axpy(y: &[Vec<f64>; 3], a: f64, x: &[Vec<f64>; 3], out: &mut [Vec<f64>; 3]) {
    for s in 0..3 {
        for i in 0..y[s].len() {
            out[s][i] = y[s][i] + a * x[s][i];
        }
    }
}

/// `safety · min(h²/(2·dim·max dᵢ), 1/(1+ρ))`.
pub fn choose_dt(state: &State, model: &SimModel, grid: &DomainGrid, safety: f64) -> f64 {
    let dmax = model.diffusion.iter().copied().fold(0.0, f64::max);
    let h = grid.min_spacing();
    let diffusive = if dmax > 0.0 { h * h / (2.0 * grid.dim() as f64 * dmax) } else { f64::INFINITY };
    let rho = (0..grid.len()).map(|k| model.jacobian_row_sum(&state.at(k))).fold(0.0, f64::max);
    safety * diffusive.min(1.0 / (1.0 + rho))
}

/// Sup norms per species, `‖u+v+w‖_{L^p}` and `∫(u+v+w)`, by the midpoint rule.
pub fn norms(state: &State, grid: &DomainGrid, p: u32) -> Result<([f64; 3], f64, f64)> {
    if p < 1 {
        return Err(Error::invalid("norm exponent must be at least 1"));
    }
    let vol = grid.cell_volume();
    let linf = state.fields.each_ref().map(|f| f.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    let mut lp = 0.0;
    let mut mass = 0.0;
    for k in 0..grid.len() {
        let [u, v, w] = state.at(k);
        let s = u + v + w;
        lp += s.abs().powi(p as i32);
        mass += s;
    }
    Ok((linf, (lp * vol).powf(1.0 / p as f64), mass * vol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub grid: DomainGrid,
    pub t_end: f64,
    pub record_dt: f64,
    pub safety: f64,
    pub blowup_threshold: f64,
    pub pos_tol: f64,
    pub min_dt: f64,
    pub k0_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            grid: DomainGrid::default(),
            t_end: 10.0,
            record_dt: 0.1,
            safety: 0.5,
            blowup_threshold: 1e8,
            pos_tol: 1e-10,
            min_dt: 1e-12,
            k0_tol: 1e-8,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("t_end must be positive"));
        }
        if !(self.record_dt > 0.0 && self.record_dt <= self.t_end) {
            return Err(Error::invalid("record_dt must lie in (0, t_end]"));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::invalid("safety must lie in (0, 1]"));
        }
        if !(self.blowup_threshold > 0.0) || !(self.pos_tol >= 0.0) || !(self.min_dt > 0.0) || !(self.k0_tol >= 0.0) {
            return Err(Error::invalid("thresholds and tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Some field entered `[−posTol·(1+max), 0)`.
    NegativeExcursion,
    /// A trial step was rejected and retried with half the step.
    DtRejected,
    DtUnderflow,
    BlowUpSuspected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub linf: [f64; 3],
    pub lp_sum: f64,
    pub mass: f64,
    /// `∫H_p` (not rescaled by `(θσ)^p`).
    pub energy: f64,
    pub dt: f64,
    pub flags: Vec<Flag>,
}

impl TrajectoryRecord {
    pub fn blowup(&self) -> bool {
        self.flags.contains(&Flag::BlowUpSuspected)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub monitor: MonitorVerdict,
    pub final_state: State,
}

/// Integrates from `initial` to `t_end` or blow-up. `energy` fixes `H_p`;
/// `mass_k1` enables the mass-budget monitor.
pub fn run(
    model: &SimModel,
    cfg: &SimConfig,
    initial: State,
    energy: &HpSpec,
    mass_k1: Option<f64>,
) -> Result<RunOutput> {
    cfg.validate()?;
    energy.validate()?;
    let grid = &cfg.grid;
    if initial.fields.iter().any(|f| f.len() != grid.len()) {
        return Err(Error::invalid("initial state does not match the grid"));
    }
    if !initial.all_finite() || initial.min_value() < 0.0 {
        return Err(Error::invalid("initial data must be finite and nonnegative"));
    }
    let h = build_energy(energy).compile();
    let p = energy.p;
    let vol = grid.cell_volume();
    let energy_of = |s: &State| (0..grid.len()).map(|k| h.eval(&s.at(k))).sum::<f64>() * vol;
    let record = |s: &State, dt: f64, flags: Vec<Flag>| -> Result<TrajectoryRecord> {
        let (linf, lp_sum, mass) = norms(s, grid, p)?;
        Ok(TrajectoryRecord { t: s.t, linf, lp_sum, mass, energy: energy_of(s), dt, flags })
    };

    let mut ws = Workspace::new(grid);
    let mut state = initial;
    let mut records = vec![record(&state, 0.0, Vec::new())?];
    let mut pending: Vec<Flag> = Vec::new();
    let mut steps = 0u64;
    let mut rejections = 0u64;
    let mut min_seen = state.min_value();
    let mut k = 1u64;
    let n_records = (cfg.t_end / cfg.record_dt).ceil() as u64;
    let mut blowup_time = None;
    let mut last_dt = 0.0;

    'outer: while k <= n_records {
        let t_next = if k == n_records { cfg.t_end } else { k as f64 * cfg.record_dt };
        let mut dt = choose_dt(&state, model, grid, cfg.safety);
        loop {
            if !(dt >= cfg.min_dt) {
                push_flag(&mut pending, Flag::DtUnderflow);
                push_flag(&mut pending, Flag::BlowUpSuspected);
                blowup_time = Some(state.t);
                records.push(record(&state, last_dt, std::mem::take(&mut pending))?);
                break 'outer;
            }
            let remaining = t_next - state.t;
            let hits = dt >= remaining;
            let trial_dt = if hits { remaining } else { dt };
            let mut trial = step(&state, model, grid, trial_dt, &mut ws);
            let (lo, hi) = (trial.min_value(), trial.max_value());
            if !trial.all_finite() || lo < -cfg.pos_tol * (1.0 + hi.max(0.0)) {
                rejections += 1;
                push_flag(&mut pending, Flag::DtRejected);
                dt = 0.5 * trial_dt;
                continue;
            }
            if lo < 0.0 {
                push_flag(&mut pending, Flag::NegativeExcursion);
            }
            if hits {
                trial.t = t_next;
            }
            steps += 1;
            last_dt = trial_dt;
            min_seen = min_seen.min(lo);
            state = trial;
            if hi > cfg.blowup_threshold {
                push_flag(&mut pending, Flag::BlowUpSuspected);
                blowup_time = Some(state.t);
                records.push(record(&state, last_dt, std::mem::take(&mut pending))?);
                break 'outer;
            }
            if hits {
                break;
            }
            dt = choose_dt(&state, model, grid, cfg.safety);
        }
        records.push(record(&state, last_dt, std::mem::take(&mut pending))?);
        k += 1;
    }

    let monitor = MonitorVerdict::evaluate(
        &records,
        energy,
        rational::to_f64(&energy.tilde_scale()),
        cfg,
        mass_k1,
        monitor::RunStats { steps, rejections, min_value: min_seen, blowup_time },
    );
    Ok(RunOutput { records, monitor, final_state: state })
}

fn push_flag(flags: &mut Vec<Flag>, f: Flag) {
    if !flags.contains(&f) {
        flags.push(f);
    }
}

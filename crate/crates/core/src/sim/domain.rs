use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 8;

/// Interval or rectangle `[0, L₁] × [0, L₂]` split into equal cells; values
/// live at cell centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct DomainGrid {
    extents: Vec<f64>,
    cells: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    extents: Vec<f64>,
    cells: Vec<usize>,
}

impl TryFrom<GridRepr> for DomainGrid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        DomainGrid::new(r.extents, r.cells)
    }
}

impl From<DomainGrid> for GridRepr {
    fn from(g: DomainGrid) -> Self {
        GridRepr { extents: g.extents, cells: g.cells }
    }
}

impl Default for DomainGrid {
    fn default() -> Self {
        DomainGrid::interval(10.0, 128).expect("valid default grid")
    }
}

impl DomainGrid {
    pub fn new(extents: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if extents.len() != cells.len() || !(1..=2).contains(&extents.len()) {
            return Err(Error::invalid("grid needs one or two axes with matching extents and cells"));
        }
        if extents.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::invalid("grid extents must be positive"));
        }
        if cells.iter().any(|&n| n < MIN_CELLS) {
            return Err(Error::invalid(format!("grid needs at least {MIN_CELLS} cells per axis")));
        }
        Ok(DomainGrid { extents, cells })
    }

    pub fn interval(length: f64, cells: usize) -> Result<Self> {
        DomainGrid::new(vec![length], vec![cells])
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        DomainGrid::new(vec![lx, ly], vec![nx, ny])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.cells[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Number of cells in total.
    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.extents.iter().product()
    }

    /// Center of cell `k` in row-major order (x fastest); `y = 0` in 1D.
    pub fn center(&self, k: usize) -> [f64; 2] {
        let nx = self.cells[0];
        let (ix, iy) = (k % nx, k / nx);
        let x = (ix as f64 + 0.5) * self.spacing(0);
        let y = if self.dim() == 2 { (iy as f64 + 0.5) * self.spacing(1) } else { 0.0 };
        [x, y]
    }
}

/// One species' boundary condition `λu + (1−λ)∂u/∂η = β`, constant on every face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryKind {
    /// `λ = 0, β = 0`.
    Neumann,
    /// `λ = 1, β = 0`.
    Dirichlet,
    Robin {
        lambda: f64,
        beta: f64,
    },
}

impl BoundaryKind {
    pub fn validate(&self) -> Result<()> {
        if let BoundaryKind::Robin { lambda, beta } = *self {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Error::invalid(format!("Robin lambda must lie in (0, 1), got {lambda}")));
            }
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(Error::invalid(format!("Robin beta must be nonnegative, got {beta}")));
            }
        }
        Ok(())
    }

    pub fn lambda_beta(&self) -> (f64, f64) {
        match *self {
            BoundaryKind::Neumann => (0.0, 0.0),
            BoundaryKind::Dirichlet => (1.0, 0.0),
            BoundaryKind::Robin { lambda, beta } => (lambda, beta),
        }
    }

    /// Ghost value across a face at distance `h/2` from the interior center
    /// holding `inner`: boundary value is the mean, normal derivative the
    /// difference over `h`.
    #[inline]
    pub fn ghost(&self, inner: f64, h: f64) -> f64 {
        match *self {
            BoundaryKind::Neumann => inner,
            BoundaryKind::Dirichlet => -inner,
            BoundaryKind::Robin { lambda, beta } => {
                let a = 0.5 * lambda;
                let b = (1.0 - lambda) / h;
                (beta - inner * (a - b)) / (a + b)
            }
        }
    }
}

/// Which of the four admissible families a [`BoundarySpec`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFamily {
    Neumann,
    Dirichlet,
    Robin,
    DirichletRobin,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[BoundaryKind; 3]", into = "[BoundaryKind; 3]")]
pub struct BoundarySpec([BoundaryKind; 3]);

impl TryFrom<[BoundaryKind; 3]> for BoundarySpec {
    type Error = Error;
    fn try_from(k: [BoundaryKind; 3]) -> Result<Self> {
        BoundarySpec::new(k)
    }
}

impl From<BoundarySpec> for [BoundaryKind; 3] {
    fn from(b: BoundarySpec) -> Self {
        b.0
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        BoundarySpec::neumann()
    }
}

impl BoundarySpec {
    pub fn new(kinds: [BoundaryKind; 3]) -> Result<Self> {
        for k in &kinds {
            k.validate()?;
        }
        Ok(BoundarySpec(kinds))
    }

    pub fn neumann() -> Self {
        BoundarySpec([BoundaryKind::Neumann; 3])
    }

    pub fn dirichlet() -> Self {
        BoundarySpec([BoundaryKind::Dirichlet; 3])
    }

    pub fn species(&self, s: usize) -> &BoundaryKind {
        &self.0[s]
    }

    pub fn kinds(&self) -> &[BoundaryKind; 3] {
        &self.0
    }

    pub fn family(&self) -> BoundaryFamily {
        let count = |f: fn(&BoundaryKind) -> bool| self.0.iter().filter(|k| f(k)).count();
        let neumann = count(|k| matches!(k, BoundaryKind::Neumann));
        let dirichlet = count(|k| matches!(k, BoundaryKind::Dirichlet));
        let robin = count(|k| matches!(k, BoundaryKind::Robin { .. }));
        match (neumann, dirichlet, robin) {
            (3, _, _) => BoundaryFamily::Neumann,
            (_, 3, _) => BoundaryFamily::Dirichlet,
            (_, _, 3) => BoundaryFamily::Robin,
            (0, 1, 2) => BoundaryFamily::DirichletRobin,
            _ => BoundaryFamily::Other,
        }
    }

    /// All `β` vanish, the setting of the uniform-in-time statements.
    pub fn homogeneous(&self) -> bool {
        self.0.iter().all(|k| k.lambda_beta().1 == 0.0)
    }
}

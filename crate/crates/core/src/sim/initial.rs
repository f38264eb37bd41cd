use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{DomainGrid, State};
use crate::error::{Error, Result};

/// Deterministic initial profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Uniform {
        values: [f64; 3],
    },
    /// `mean·(1 + amplitude·Σ c_k φ_k / modes)` with cosine modes `φ_k` and
    /// coefficients `c_k ∈ [−1, 1]` drawn from the seed.
    Cosine {
        mean: [f64; 3],
        amplitude: f64,
        modes: u32,
    },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Cosine { mean: [1.0; 3], amplitude: 0.5, modes: 3 }
    }
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: &[f64; 3]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        match self {
            InitialData::Uniform { values } if !nonneg(values) => {
                Err(Error::invalid("initial values must be finite and nonnegative"))
            }
            InitialData::Cosine { mean, amplitude, modes } => {
                if !nonneg(mean) {
                    return Err(Error::invalid("initial means must be finite and nonnegative"));
                }
                if !(0.0..1.0).contains(amplitude) {
                    return Err(Error::invalid("cosine amplitude must lie in [0, 1)"));
                }
                if *modes == 0 {
                    return Err(Error::invalid("cosine profile needs at least one mode"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self, grid: &DomainGrid, seed: u64) -> Result<State> {
        self.validate()?;
        let n = grid.len();
        let fields = match self {
            InitialData::Uniform { values } => values.map(|c| vec![c; n]),
            InitialData::Cosine { mean, amplitude, modes } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let lx = grid.extents()[0];
                let ly = grid.extents().get(1).copied().unwrap_or(1.0);
                let mut out: [Vec<f64>; 3] = Default::default();
                for (s, field) in out.iter_mut().enumerate() {
                    let shape: Vec<(f64, u32, u32)> = (1..=*modes)
                        .map(|k| {
                            let c = rng.random_range(-1.0..=1.0);
                            if grid.dim() == 1 {
                                (c, k, 0)
                            } else {
                                let kx = rng.random_range(0..=*modes);
                                let ky =
                                    if kx == 0 { rng.random_range(1..=*modes) } else { rng.random_range(0..=*modes) };
                                (c, kx, ky)
                            }
                        })
                        .collect();
                    *field = (0..n)
                        .map(|cell| {
                            let [x, y] = grid.center(cell);
                            let sum: f64 = shape
                                .iter()
                                .map(|&(c, kx, ky)| {
                                    c * (kx as f64 * PI * x / lx).cos() * (ky as f64 * PI * y / ly).cos()
                                })
                                .sum();
                            mean[s] * (1.0 + amplitude * sum / *modes as f64)
                        })
                        .collect();
                }
                out
            }
        };
        Ok(State { t: 0.0, fields })
    }
}

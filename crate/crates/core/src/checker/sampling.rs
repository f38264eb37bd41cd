//! Deterministic stratified sampling of `ℝ₊³` for falsification searches.
//!
//! Violations of `q ≤ K·Λ` show up at infinity along rays, so every search
//! walks the coordinate axes and the diagonal at `t = 2^k` before drawing
//! uniform samples from the boxes `[0, R]³`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::{Point3, Poly3};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Uniform samples drawn per box radius.
    pub box_samples: usize,
    pub radii: Vec<f64>,
    /// Rays are sampled at `t = 2^k` for `k = 0..=ray_max_log2`.
    pub ray_max_log2: u32,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 0, box_samples: 2000, radii: vec![1.0, 10.0, 1000.0], ray_max_log2: 80 }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig { seed, ..Default::default() }
    }

    /// Candidate points with the coordinates flagged `false` in `free` pinned
    /// at zero, in a fixed order: axis rays, the diagonal ray, then boxes.
    pub fn points(&self, free: [bool; 3]) -> Vec<Point3> {
        let mut out = Vec::new();
        let axes: Vec<usize> = (0..3).filter(|&k| free[k]).collect();
        if axes.is_empty() {
            out.push([0.0; 3]);
            return out;
        }
        let ts: Vec<f64> = (0..=self.ray_max_log2).map(|k| 2f64.powi(k as i32)).collect();
        for &a in &axes {
            for &t in &ts {
                let mut x = [0.0; 3];
                x[a] = t;
                out.push(x);
            }
        }
        if axes.len() > 1 {
            for &t in &ts {
                let mut x = [0.0; 3];
                for &a in &axes {
                    x[a] = t;
                }
                out.push(x);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for &r in &self.radii {
            for _ in 0..self.box_samples {
                let mut x = [0.0; 3];
                for &a in &axes {
                    x[a] = rng.random_range(0.0..=r);
                }
                out.push(x);
            }
        }
        out
    }
}

/// A point where `excess > 0`, confirmed both in floating point (by more than
/// [`WITNESS_FLOAT_MARGIN`]) and exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: [f64; 3],
    /// Exact amount by which the inequality fails at `point`.
    #[serde(with = "crate::rational::serde_rational")]
    pub excess: Rational,
    pub label: String,
}

pub const WITNESS_FLOAT_MARGIN: f64 = 1e-9;

/// First sample at which `excess` is positive, or `None`.
pub fn find_positive(excess: &Poly3, points: &[Point3], label: &str) -> Option<Witness> {
    let fast = excess.compile();
    for x in points {
        let approx = fast.eval(x);
        if !(approx > WITNESS_FLOAT_MARGIN) {
            continue;
        }
        let exact_point = x.map(|t| rational::from_f64(t).expect("sample points are finite"));
        let exact = excess.eval_exact(&exact_point);
        if exact > Rational::from_integer(0.into()) {
            return Some(Witness { point: *x, excess: exact, label: label.to_string() });
        }
    }
    None
}

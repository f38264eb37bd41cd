//! Structural-condition certificates, `L^p` energy functionals and a
//! finite-difference simulator for three-species reaction-diffusion systems
//! with polynomial reactions.

pub mod checker;
pub mod config;
pub mod error;
pub mod lyapunov;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod sim;
pub mod zoo;

pub use checker::{ConditionReport, IwscWeights, NonlinearityTriple, SamplerConfig, Verdict};
pub use config::{ModelRef, RunConfig};
pub use error::{Error, Result};
pub use lyapunov::{DiffusionTriple, HpSpec, Theorem, TheoremParams, Variant};
pub use poly::{Axis, Poly3};
pub use rational::Rational;
pub use sim::{BoundarySpec, DomainGrid, MonitorVerdict, TrajectoryRecord};
pub use zoo::ModelSpec;

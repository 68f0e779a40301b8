//! Growth–dispersal dynamics on heterogeneous habitats.
//!
//! This crate simulates discrete-time populations that grow in place and then
//! disperse: one step maps a density field `u` to
//!
//! ```text
//! (Q u)(x) = ∫ k(x - y) f(y, u(y)) dy,
//! ```
//!
//! where `f(x, u)` is a habitat-dependent growth map converging to
//! homogeneous maps toward both spatial infinities, and `k` is a dispersal
//! kernel that may be biased (drifting media, advection). Around the solver
//! it provides the quantities that describe the long-run behaviour:
//!
//! - leftward and rightward spreading speeds of the linearized dynamics,
//!   computed from the kernel's moment generating function ([`speeds`]);
//! - front tracking and speed fits for simulated orbits ([`diagnostics`]);
//! - monotone iteration toward stationary states (pulses pinned by a patch,
//!   fronts forced by a one-sided habitat), plus certificates that *no*
//!   nontrivial stationary state exists when the leftward speed is negative
//!   and the habitat is linearly controlled ([`fixedpoint`]);
//! - spectral radius estimates for patch-driven linearizations, used to
//!   exhibit a habitat that defeats the naive "negative leftward speed means
//!   extinction of the left tail" heuristic ([`spectral`]).
//!
//! The `habwave` binary wraps all of this behind a TOML-configured CLI.

pub mod checks;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod fixedpoint;
pub mod grid;
pub mod habitat;
pub mod kernel;
pub mod spectral;
pub mod speeds;

pub use checks::{run_checks, CheckOutcome, CheckReport};
pub use diagnostics::{FrontTrace, GapSeries, SpeedFit};
pub use error::{Error, Result};
pub use evolution::{EvolutionOp, LinearOp, Trajectory};
pub use fixedpoint::{
    exponential_tail_check, nonexistence_certificate, solve_from_cap, solve_in_interval,
    Certificate, Classification, FixedPointResult, TailCheckReport,
};
pub use grid::{Field, Samples, SpatialGrid, WindowSup};
pub use habitat::{build_envelope, Habitat, HabitatFlags, LinearEnvelope, Nonlinearity, Profile};
pub use kernel::{Kernel, QuadratureWeights};
pub use spectral::{
    counterexample_suite, find_beta0, power_radius, Beta0Report, CounterexampleReport,
    SpectralReport,
};
pub use speeds::{decay_rate, spreading_speed, DecayReport, SpeedReport};

use serde::{Deserialize, Serialize};

/// Direction toward one of the two spatial infinities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Toward `x -> -∞`.
    Minus,
    /// Toward `x -> +∞`.
    Plus,
}

impl Side {
    /// `-1.0` for [`Side::Minus`], `+1.0` for [`Side::Plus`].
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        })
    }
}

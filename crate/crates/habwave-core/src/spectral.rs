//! Spectral radius of patch-driven linearizations, and the habitat pair that
//! defeats the naive extinction heuristic.
//!
//! The linearization of a patch habitat at the zero state is the positive
//! compact operator `(L_β u)(x) = β ∫ k(x-y) e^{-y²} u(y) dy`. Its spectral
//! radius `ρ(L_β) = β ρ(L_1)` decides whether the patch can sustain a
//! population on its own: above one, a small bump grows, so a nontrivial
//! stationary state exists below any invariant cap. [`power_radius`]
//! computes `ρ` by power iteration (positivity gives a simple dominant
//! eigenvalue), and [`find_beta0`] calibrates the patch strength to a
//! prescribed supercriticality margin.
//!
//! [`counterexample_suite`] packages the punchline: a rightward-drift kernel
//! whose saturated linearization has *negative* leftward speed, paired with
//! a habitat whose interior patch is calibrated supercritical. The speed
//! heuristic says the population should be swept away; the patch pumps hard
//! enough to hold a nontrivial stationary state anyway — which is exactly
//! why the nonexistence certificate demands linear control instead of a
//! speed sign alone.

use crate::error::{Error, Result};
use crate::evolution::{EvolutionOp, LinearOp};
use crate::fixedpoint::{solve_in_interval, FixedPointResult};
use crate::grid::{Field, SpatialGrid};
use crate::habitat::Habitat;
use crate::kernel::{Kernel, TAIL_MASS_LIMIT};
use crate::speeds::spreading_speed;
use crate::Side;
use serde::Serialize;
use std::f64::consts::E;

/// Iteration ceiling for the power method; the patch operators used here
/// have eigenvalue gaps well below 1, so hitting it means something is wrong.
pub const MAX_POWER_ITERS: usize = 50_000;

/// Supercriticality margin used when calibrating the counterexample patch.
pub const DEFAULT_BETA_MARGIN: f64 = 0.25;

/// Drift of the counterexample kernel: strong enough rightward transport
/// that the saturated linearization spreads leftward at speed -1.
pub const SUITE_KERNEL_MEAN: f64 = 2.0;

/// Variance of the counterexample kernel.
pub const SUITE_KERNEL_VARIANCE: f64 = 0.5;

/// Fraction of the Perron eigenfield used to seed subsolutions; small enough
/// that the quadratic correction of the growth map cannot eat the margin.
const SEED_SCALE: f64 = 0.1;

/// Iteration budget for the monotone solvers inside the suite.
const SUITE_SOLVE_ITERS: usize = 5_000;

/// Dominant eigenpair of a patch linearization.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Spectral radius (dominant eigenvalue; positive).
    pub rho: f64,
    /// Power iterations spent.
    pub iterations: usize,
    /// Final `‖L φ - ρ φ‖_∞` with `φ` normalized to sup one.
    pub eigen_residual: f64,
    /// The positive eigenfield, normalized to sup one.
    pub eigenfield: Field,
}

/// Patch calibration: the strength at which `ρ(L_β)` hits `1 + margin`.
#[derive(Debug, Clone, Serialize)]
pub struct Beta0Report {
    /// Spectral radius of the unit-strength patch operator.
    pub rho_unit: f64,
    /// Calibrated strength `(1 + margin) / rho_unit`.
    pub beta0: f64,
    /// Requested margin.
    pub margin: f64,
    /// Independently recomputed `ρ(L_beta0)`; should equal `1 + margin`.
    pub rho_at_beta0: f64,
}

/// Everything the counterexample produces, ready for assertions.
#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    /// Leftward spreading speed of the saturated linearization (negative).
    pub c_star_minus: f64,
    /// Rightward spreading speed of the saturated linearization.
    pub c_star_plus: f64,
    /// Patch calibration actually used.
    pub calibration: Beta0Report,
    /// Nontrivial stationary state of the patch-only habitat.
    pub pulse: FixedPointResult,
    /// Stationary state of the ramped habitat, computed above the pulse.
    pub forced: FixedPointResult,
    /// `sup(pulse - forced)`; at round-off scale when ordering holds.
    pub domination_defect: f64,
    /// Why the nonexistence certificate refuses the ramped habitat.
    pub refusal: String,
}

/// Radius beyond which the patch `e^{-x²}` is below the tail budget, so a
/// grid covering it captures the operator up to quadrature error.
fn patch_support_radius() -> f64 {
    (-TAIL_MASS_LIMIT.ln()).sqrt()
}

/// Computes `ρ(L_β)` by power iteration from the all-ones state.
///
/// The operator is positive with a simple dominant eigenvalue, so the
/// iteration converges linearly at the eigenvalue gap. `ρ` is read off as
/// an l² Rayleigh quotient and accepted once the sup-norm eigen-residual
/// falls below `tol · ρ`.
pub fn power_radius(
    beta: f64,
    kernel: &Kernel,
    grid: SpatialGrid,
    tol: f64,
) -> Result<SpectralReport> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    let radius = patch_support_radius();
    if grid.x_min() > -radius || grid.x_max() < radius {
        return Err(Error::Precondition(format!(
            "grid [{}, {}] must cover the patch support radius {radius:.4}",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let op = LinearOp::new(kernel, grid, |x| beta * (-x * x).exp(), 0.0, 0.0)?;
    let mut u = Field::constant(grid, 1.0);
    for k in 1..=MAX_POWER_ITERS {
        let v = op.apply(&u)?;
        let norm = v.max_value();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::Precondition(
                "patch operator annihilated the test state; grid and kernel are incompatible"
                    .into(),
            ));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (vi, ui) in v.values().iter().zip(u.values()) {
            num += vi * ui;
            den += ui * ui;
        }
        let rho = num / den;
        let residual = v
            .values()
            .iter()
            .zip(u.values())
            .map(|(vi, ui)| (vi - rho * ui).abs())
            .fold(0.0, f64::max);
        let next = Field::from_values(grid, v.values().iter().map(|vi| vi / norm).collect())?;
        if residual <= tol * rho {
            return Ok(SpectralReport { rho, iterations: k, eigen_residual: residual, eigenfield: next });
        }
        u = next;
    }
    Err(Error::NoConvergence { iterations: MAX_POWER_ITERS, last_delta: f64::NAN })
}

/// Calibrates the patch strength so that `ρ(L_β) = 1 + margin`, then
/// recomputes the radius at the calibrated strength as a cross-check.
pub fn find_beta0(
    kernel: &Kernel,
    grid: SpatialGrid,
    margin: f64,
    tol: f64,
) -> Result<Beta0Report> {
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::invalid("margin", format!("must be positive, got {margin}")));
    }
    let unit = power_radius(1.0, kernel, grid, tol)?;
    let beta0 = (1.0 + margin) / unit.rho;
    let at_beta0 = power_radius(beta0, kernel, grid, tol)?;
    Ok(Beta0Report { rho_unit: unit.rho, beta0, margin, rho_at_beta0: at_beta0.rho })
}

/// Runs the full counterexample: negative leftward speed of the saturated
/// linearization, a calibrated supercritical patch, a nontrivial pulse on
/// the patch-only habitat, the forced state above it on the ramped habitat,
/// and the certificate's refusal to conclude nonexistence.
///
/// The pulse is computed *in an order interval*: the lower edge is a small
/// multiple of the Perron eigenfield, which the supercriticality margin
/// makes a strict subsolution, so convergence to zero is ruled out by
/// construction rather than by inspection.
pub fn counterexample_suite(grid: SpatialGrid, tol: f64) -> Result<CounterexampleReport> {
    let kernel = Kernel::gaussian(SUITE_KERNEL_MEAN, SUITE_KERNEL_VARIANCE)?;
    let minus = spreading_speed(E, &kernel, Side::Minus)?;
    let plus = spreading_speed(E, &kernel, Side::Plus)?;

    let unit = power_radius(1.0, &kernel, grid, tol)?;
    let beta0 = (1.0 + DEFAULT_BETA_MARGIN) / unit.rho;
    let at_beta0 = power_radius(beta0, &kernel, grid, tol)?;
    let calibration = Beta0Report {
        rho_unit: unit.rho,
        beta0,
        margin: DEFAULT_BETA_MARGIN,
        rho_at_beta0: at_beta0.rho,
    };

    let (patch_only, ramped) = Habitat::counterexample_pair(beta0)?;
    let op_patch = EvolutionOp::new(patch_only, kernel.clone(), grid)?;
    let seed = Field::from_values(
        grid,
        at_beta0.eigenfield.values().iter().map(|v| SEED_SCALE * v).collect(),
    )?;
    let cap = op_patch.habitat().caps()[0];
    let pulse = solve_in_interval(&op_patch, &seed, cap, tol, SUITE_SOLVE_ITERS)?;

    let op_ramped = EvolutionOp::new(ramped, kernel.clone(), grid)?;
    let cap = op_ramped.habitat().caps()[0];
    let forced = solve_in_interval(&op_ramped, &pulse.field, cap, tol, SUITE_SOLVE_ITERS)?;
    let domination_defect = pulse
        .field
        .values()
        .iter()
        .zip(forced.field.values())
        .map(|(p, f)| p - f)
        .fold(f64::NEG_INFINITY, f64::max);

    // The certificate must decline: the ramped habitat's patch exceeds its
    // right-limit rate, so the negative leftward speed proves nothing.
    let refusal = match crate::fixedpoint::nonexistence_certificate(&op_ramped, 0.1, 0.4, 1) {
        Err(e) if e.is_hypothesis_violation() => e.to_string(),
        Err(e) => return Err(e),
        Ok(_) => {
            return Err(Error::Hypothesis(
                "comparison certificate unexpectedly accepted the ramped habitat".into(),
            ))
        }
    };

    Ok(CounterexampleReport {
        c_star_minus: minus.c_star,
        c_star_plus: plus.c_star,
        calibration,
        pulse,
        forced,
        domination_defect,
        refusal,
    })
}

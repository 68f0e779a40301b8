//! Deterministic self-check battery.
//!
//! Each check exercises one structural property the rest of the library
//! leans on — unit quadrature mass, order preservation, cap invariance,
//! envelope domination, unimodal speed objectives, and so on — using fixed
//! seeds so a failure is reproducible bit for bit. The battery is cheap
//! enough to run routinely; the CLI exposes it as `habwave check`.

use crate::error::Result;
use crate::evolution::{EvolutionOp, LinearOp};
use crate::fixedpoint::exponential_tail_check;
use crate::grid::{Field, SpatialGrid};
use crate::habitat::{build_envelope, Habitat};
use crate::kernel::Kernel;
use crate::speeds::{objective, spreading_speed};
use crate::diagnostics::track_front;
use crate::Side;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::E;

/// Outcome of a single named check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    /// What property was checked.
    pub name: &'static str,
    /// Whether it held.
    pub passed: bool,
    /// Measured values, or the failure message.
    pub detail: String,
}

/// Outcome of the whole battery.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Per-check outcomes, in execution order.
    pub outcomes: Vec<CheckOutcome>,
    /// True when every check passed.
    pub all_passed: bool,
}

/// A named check: runs to a detail string or fails with the reason.
type Check = (&'static str, fn() -> Result<String>);

/// Runs the full battery. Deterministic: fixed seeds, no environment input.
pub fn run_checks() -> CheckReport {
    let checks: Vec<Check> = vec![
        ("kernel quadrature weights carry unit mass", check_unit_mass),
        ("moment function matches its quadrature", check_mgf_quadrature),
        ("log moment function is convex", check_log_convexity),
        ("field evaluation is exact at nodes and linear between", check_field_eval),
        ("growth maps preserve the zero state", check_zero_state),
        ("evolution steps preserve order", check_order_preservation),
        ("declared caps are invariant", check_cap_invariance),
        ("linear envelope dominates one growth step", check_envelope_domination),
        ("growth is subhomogeneous on declared habitats", check_subhomogeneity),
        ("steps keep strictly positive data strictly positive", check_strict_positivity),
        ("distant translates behave like the limiting operator", check_translation_limit),
        ("speed objective is unimodal in the decay exponent", check_unimodal_objective),
        ("spreading speeds increase with the coefficient", check_speed_monotone_in_coef),
        ("front tracking recovers crossings, clean and noisy", check_front_tracking),
        ("tail audit accepts steep decay and flags shallow decay", check_tail_audit),
    ];
    let mut outcomes = Vec::with_capacity(checks.len());
    for (name, f) in checks {
        let outcome = match f() {
            Ok(detail) => CheckOutcome { name, passed: true, detail },
            Err(e) => CheckOutcome { name, passed: false, detail: e.to_string() },
        };
        outcomes.push(outcome);
    }
    let all_passed = outcomes.iter().all(|o| o.passed);
    CheckReport { outcomes, all_passed }
}

fn fail(msg: String) -> crate::error::Error {
    crate::error::Error::Precondition(msg)
}

fn sample_kernels() -> Result<Vec<(&'static str, Kernel)>> {
    let samples = crate::grid::Samples::from_pairs(
        (0..201)
            .map(|i| {
                let x = -5.0 + 0.05 * i as f64;
                // Unit-mass triangle on [-5, 5].
                (x, 0.2 * (1.0 - 0.2 * x.abs()).max(0.0))
            })
            .collect(),
    )?;
    Ok(vec![
        ("gaussian", Kernel::gaussian(2.0, 0.5)?),
        ("laplace", Kernel::laplace(2.0, 0.3)?),
        ("tabulated", Kernel::tabulated(samples)?),
    ])
}

fn check_unit_mass() -> Result<String> {
    let mut details = Vec::new();
    for (name, kernel) in sample_kernels()? {
        let weights = kernel.quadrature_weights(0.05)?;
        let mass: f64 = weights.weights.iter().sum();
        let defect = (mass - 1.0).abs();
        if defect > 1e-13 {
            return Err(fail(format!("{name}: weight mass defect {defect:.3e}")));
        }
        details.push(format!("{name} defect {defect:.1e}"));
    }
    Ok(details.join(", "))
}

fn check_mgf_quadrature() -> Result<String> {
    let mut details = Vec::new();
    for (name, kernel) in sample_kernels()? {
        // Gaussian quadrature converges spectrally; the laplace kink and the
        // tabulated kernel's piecewise-linear corners cap accuracy at O(h²).
        let tol = if name == "gaussian" { 1e-6 } else { 5e-4 };
        let mut worst = 0.0_f64;
        for &t in &[-1.5, -0.5, 0.5, 1.5] {
            // The laplace moment function needs |t| below its rate.
            if kernel.log_mgf(t).is_err() {
                continue;
            }
            let exact = kernel.mgf(t)?;
            let quad = kernel.mgf_quadrature(t, 0.02)?;
            let rel = ((quad - exact) / exact).abs();
            if rel > tol {
                return Err(fail(format!("{name} at t={t}: relative gap {rel:.3e}")));
            }
            worst = worst.max(rel);
        }
        details.push(format!("{name} {worst:.1e}"));
    }
    Ok(format!("worst relative gaps: {}", details.join(", ")))
}

fn check_log_convexity() -> Result<String> {
    for (name, kernel) in sample_kernels()? {
        let ts: Vec<f64> = (-12..=12).map(|i| 0.12 * i as f64).collect();
        for w in ts.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (la, lb, lc) = match (kernel.log_mgf(a), kernel.log_mgf(b), kernel.log_mgf(c)) {
                (Ok(la), Ok(lb), Ok(lc)) => (la, lb, lc),
                _ => continue,
            };
            if lb > (la + lc) / 2.0 + 1e-10 {
                return Err(fail(format!(
                    "{name}: chord violated at t={b}: {lb} > mean({la}, {lc})"
                )));
            }
        }
    }
    Ok("chords above midpoints for all three families".into())
}

fn check_field_eval() -> Result<String> {
    let grid = SpatialGrid::new(-3.0, 5.0, 17)?;
    let field = Field::from_fn(grid, |x| 2.0 * x + 1.0);
    for i in 0..grid.len() {
        let x = grid.point(i);
        if (field.eval(x) - (2.0 * x + 1.0)).abs() > 1e-14 {
            return Err(fail(format!("node value off at x={x}")));
        }
    }
    for &x in &[-2.87, -0.11, 0.34, 4.99] {
        if (field.eval(x) - (2.0 * x + 1.0)).abs() > 1e-12 {
            return Err(fail(format!("linear interpolation off at x={x}")));
        }
    }
    Ok("exact at 17 nodes, linear at 4 interior probes".into())
}

fn standard_op() -> Result<EvolutionOp> {
    let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0)?;
    let grid = SpatialGrid::new(-30.0, 30.0, 301)?;
    EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0)?, grid)
}

fn check_zero_state() -> Result<String> {
    let habitats = vec![
        Habitat::beverton_holt(0.5, E, 1.0, 1.0)?,
        Habitat::gaussian_patch(5.0)?,
        Habitat::patch_with_ramp(5.0)?,
    ];
    let grid = SpatialGrid::new(-30.0, 30.0, 301)?;
    for habitat in habitats {
        let op = EvolutionOp::new(habitat, Kernel::gaussian(2.0, 0.5)?, grid)?;
        let out = op.apply(&Field::constant(grid, 0.0))?;
        if out.max_value() != 0.0 || out.min_value() != 0.0 {
            return Err(fail(format!("zero state moved to sup {:.3e}", out.max_value())));
        }
    }
    Ok("zero maps to zero exactly on three habitats".into())
}

fn check_order_preservation() -> Result<String> {
    let op = standard_op()?;
    let grid = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bed);
    for trial in 0..50 {
        let lo = Field::from_fn(grid, |_| rng.random::<f64>());
        let hi = Field::from_values(
            grid,
            lo.values().iter().map(|v| v + rng.random::<f64>()).collect(),
        )?;
        let qlo = op.apply(&lo)?;
        let qhi = op.apply(&hi)?;
        for (i, (a, b)) in qlo.values().iter().zip(qhi.values()).enumerate() {
            if a > b {
                return Err(fail(format!(
                    "trial {trial}: order flipped at x={} by {:.3e}",
                    grid.point(i),
                    a - b
                )));
            }
        }
    }
    Ok("50 seeded ordered pairs stayed ordered pointwise".into())
}

fn check_cap_invariance() -> Result<String> {
    let habitats = vec![
        Habitat::beverton_holt(0.5, E, 1.0, 1.0)?,
        Habitat::gaussian_patch(5.0)?,
        Habitat::patch_with_ramp(5.0)?,
    ];
    let grid = SpatialGrid::new(-30.0, 30.0, 301)?;
    for habitat in habitats {
        let caps: Vec<f64> = habitat.caps().iter().take(4).copied().collect();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(2.0, 0.5)?, grid)?;
        for cap in caps {
            let out = op.apply(&Field::constant(grid, cap))?;
            if out.max_value() > cap * (1.0 + 1e-12) {
                return Err(fail(format!(
                    "cap {cap} violated by {:.3e}",
                    out.max_value() - cap
                )));
            }
        }
    }
    Ok("first four caps of three habitats held".into())
}

fn check_envelope_domination() -> Result<String> {
    let op = standard_op()?;
    let grid = op.grid();
    let envelope = build_envelope(op.habitat(), 0.05, 1.0)?;
    let linear = LinearOp::new(
        op.kernel(),
        grid,
        |x| envelope.rate(x),
        envelope.rate_minus(),
        envelope.rate_plus(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xe27e);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let u = Field::from_fn(grid, |_| rng.random::<f64>());
        let grown = op.apply(&u)?;
        let bound = linear.apply(&u)?;
        for (i, (g, b)) in grown.values().iter().zip(bound.values()).enumerate() {
            worst = worst.max(g - b);
            if g - b > 1e-12 {
                return Err(fail(format!(
                    "envelope undercut by {:.3e} at x={}",
                    g - b,
                    grid.point(i)
                )));
            }
        }
    }
    Ok(format!("20 seeded states dominated; worst margin {worst:.2e}"))
}

fn check_subhomogeneity() -> Result<String> {
    let op = standard_op()?;
    if !op.habitat().flags().subhomogeneous {
        return Err(fail("standard habitat should declare subhomogeneity".into()));
    }
    let grid = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cab);
    for _ in 0..20 {
        let u = Field::from_fn(grid, |_| 2.0 * rng.random::<f64>());
        let s = 0.05 + 0.9 * rng.random::<f64>();
        let scaled = Field::from_values(grid, u.values().iter().map(|v| s * v).collect())?;
        let q_scaled = op.apply(&scaled)?;
        let q_full = op.apply(&u)?;
        for (i, (qs, qf)) in q_scaled.values().iter().zip(q_full.values()).enumerate() {
            if s * qf - qs > 1e-12 {
                return Err(fail(format!(
                    "Q({s:.3}u) < {s:.3}Q(u) by {:.3e} at x={}",
                    s * qf - qs,
                    grid.point(i)
                )));
            }
        }
    }
    Ok("20 seeded scalings stayed above the scaled step".into())
}

fn check_strict_positivity() -> Result<String> {
    let op = standard_op()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9051_u64);
    let u = Field::from_fn(op.grid(), |_| 0.1 + rng.random::<f64>());
    let out = op.apply(&u)?;
    let min = out.min_value();
    if min <= 0.0 {
        return Err(fail(format!("strictly positive data produced min {min:.3e}")));
    }
    Ok(format!("output minimum {min:.3e} stays positive"))
}

fn check_translation_limit() -> Result<String> {
    let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0)?;
    let grid = SpatialGrid::new(-60.0, 60.0, 601)?;
    let op = EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0)?, grid)?;
    let mut sups = Vec::new();
    // Shifts chosen so every gap sits above the round-off floor of the two
    // summation paths; by shift 20 the coefficient is within ~7e-7 of its
    // limit over the bump's stencil reach.
    for &shift in &[10.0, 15.0, 20.0] {
        let bump = Field::from_fn(grid, |x| (1.0 - (x - shift).abs() / 5.0).max(0.0));
        let full = op.apply(&bump)?;
        let limit = op.apply_limit(&bump, Side::Plus)?;
        sups.push(full.sup_diff(&limit)?);
    }
    if !(sups[0] > sups[1] && sups[1] > sups[2]) {
        return Err(fail(format!("gaps {sups:?} do not shrink with distance")));
    }
    if sups[2] > 1e-4 {
        return Err(fail(format!("gap at shift 20 is {:.3e}", sups[2])));
    }
    Ok(format!(
        "gaps to the limiting step: {:.2e}, {:.2e}, {:.2e}",
        sups[0], sups[1], sups[2]
    ))
}

fn check_unimodal_objective() -> Result<String> {
    for (name, kernel, coef) in [
        ("gaussian", Kernel::gaussian(2.0, 0.5)?, E),
        ("laplace", Kernel::laplace(2.0, 0.0)?, E),
    ] {
        for side in [Side::Minus, Side::Plus] {
            let hi: f64 = match &kernel {
                Kernel::Laplace { rate, .. } => rate * 0.95,
                _ => 6.0,
            };
            let mus: Vec<f64> = (1..=120).map(|i| hi * i as f64 / 120.0).collect();
            let values: Vec<f64> = mus
                .iter()
                .map(|&mu| objective(coef, &kernel, side, mu))
                .collect::<Result<_>>()?;
            let minima = values
                .windows(3)
                .filter(|w| w[1] < w[0] - 1e-12 && w[1] < w[2] - 1e-12)
                .count();
            if minima > 1 {
                return Err(fail(format!("{name}/{side}: {minima} interior minima")));
            }
        }
    }
    Ok("single interior minimum on both families and sides".into())
}

fn check_speed_monotone_in_coef() -> Result<String> {
    let kernel = Kernel::gaussian(2.0, 0.5)?;
    for side in [Side::Minus, Side::Plus] {
        let mut last = f64::NEG_INFINITY;
        for coef in [1.5, 2.0, E, 4.0] {
            let c = spreading_speed(coef, &kernel, side)?.c_star;
            if c <= last {
                return Err(fail(format!("speed not increasing at coef {coef} ({side})")));
            }
            last = c;
        }
    }
    Ok("speeds strictly increasing over four coefficients, both sides".into())
}

fn check_front_tracking() -> Result<String> {
    let grid = SpatialGrid::new(-50.0, 50.0, 1001)?;
    // A wedge crossing 0.5 exactly at x = 7.25 (piecewise linear, so the
    // interpolated crossing is exact).
    let wedge = Field::from_fn(grid, |x| (0.5 - 0.1 * (x - 12.25)).clamp(0.0, 1.0));
    let traj = crate::evolution::Trajectory::from_snapshots(vec![(0, wedge.clone())])?;
    let trace = track_front(&traj, 0.5)?;
    let x_plus = trace.x_plus[0].ok_or_else(|| fail("missing crossing".into()))?;
    if (x_plus - 12.25).abs() > 1e-9 {
        return Err(fail(format!("clean crossing off by {:.3e}", x_plus - 12.25)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f2e);
    let noisy = Field::from_values(
        grid,
        wedge.values().iter().map(|v| (v + 1e-6 * rng.random::<f64>()).min(1.0)).collect(),
    )?;
    let traj = crate::evolution::Trajectory::from_snapshots(vec![(0, noisy)])?;
    let trace = track_front(&traj, 0.5)?;
    let noisy_plus = trace.x_plus[0].ok_or_else(|| fail("missing noisy crossing".into()))?;
    if (noisy_plus - 12.25).abs() > 1e-4 {
        return Err(fail(format!("noisy crossing off by {:.3e}", noisy_plus - 12.25)));
    }
    Ok(format!(
        "clean error {:.1e}, noisy error {:.1e}",
        (x_plus - 12.25).abs(),
        (noisy_plus - 12.25).abs()
    ))
}

fn check_tail_audit() -> Result<String> {
    let grid = SpatialGrid::new(-30.0, 10.0, 401)?;
    let field = Field::from_fn(grid, |x| (0.8 * x).exp());
    let steep = exponential_tail_check(&field, 0.5)?;
    let shallow = exponential_tail_check(&field, 1.1)?;
    if !steep.dominated {
        return Err(fail("rate 0.8 tail rejected at claimed rate 0.5".into()));
    }
    if shallow.dominated {
        return Err(fail("rate 0.8 tail accepted at claimed rate 1.1".into()));
    }
    Ok("accepted at 0.5, rejected at 1.1, as it should be".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_battery_passes_and_is_deterministic() {
        let first = run_checks();
        for outcome in &first.outcomes {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
        assert!(first.all_passed);
        assert_eq!(first.outcomes.len(), 15);
        let second = run_checks();
        for (a, b) in first.outcomes.iter().zip(&second.outcomes) {
            assert_eq!(a.detail, b.detail, "nondeterministic check: {}", a.name);
        }
    }
}

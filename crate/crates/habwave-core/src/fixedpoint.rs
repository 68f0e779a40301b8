//! Stationary states of the evolution operator, and certificates that none
//! exist.
//!
//! For habitats that are monotone in density, orbits started from an
//! invariant cap decrease pointwise, so they converge to the *largest* fixed
//! point below the cap; orbits started from a subsolution increase. The
//! solvers here exploit exactly that structure and treat any numerical
//! violation of it as an error rather than noise: a monotone iteration that
//! moves the wrong way means the operator or its inputs are broken.
//!
//! The reverse question — showing a habitat has *no* nontrivial stationary
//! state — is answered by [`nonexistence_certificate`]: when growth is
//! linearly controlled by its right-limit rate and the leftward spreading
//! speed of that linearization is negative, every orbit below a cap dies
//! out. The certificate verifies the analytic premises, then corroborates
//! them by driving the cap orbit to extinction and checking the decay of its
//! left tail.

use crate::error::{Error, Result};
use crate::evolution::EvolutionOp;
use crate::grid::Field;
use crate::habitat::build_envelope;
use crate::speeds::{decay_rate, spreading_speed, DecayReport};
use crate::Side;
use serde::Serialize;

/// Default stopping tolerance for sup-norm residuals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Sup norm below which an orbit counts as extinct.
pub const COLLAPSE_SUP: f64 = 1e-8;

/// Values below `max(u) * ZERO_FLOOR_REL` are numeric zeros for tail
/// analysis; constant extension at the grid edge flattens genuinely dead
/// regions at round-off scale, which must not defeat decay checks.
pub const ZERO_FLOOR_REL: f64 = 1e-12;

/// Fraction of the grid averaged on each side to read off limiting states.
const TAIL_FRACTION: f64 = 0.05;

/// Relative mismatch allowed between a tail mean and a limiting state.
const FRONT_TAIL_REL: f64 = 0.01;

/// Shape of a computed stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Sup norm at round-off scale: the trivial state.
    Zero,
    /// Nontrivial, but vanishing toward both infinities.
    Pulse,
    /// Connects (numerically) zero on the left to the right-limit fixed
    /// point on the right.
    Front,
    /// Sits at the right-limit fixed point on both sides.
    Uniform,
}

/// A stationary state together with its convergence evidence.
#[derive(Debug, Clone)]
pub struct FixedPointResult {
    /// The computed state.
    pub field: Field,
    /// Independently re-measured residual `‖Q u - u‖_∞`.
    pub residual: f64,
    /// Iterations spent (including the verification step).
    pub iterations: usize,
    /// Shape of the state.
    pub classification: Classification,
    /// Mean over the left tail of the grid.
    pub tail_minus: f64,
    /// Mean over the right tail of the grid.
    pub tail_plus: f64,
}

/// Exponential-decay audit of a state's left tail.
#[derive(Debug, Clone, Serialize)]
pub struct TailCheckReport {
    /// Claimed decay rate: the state should be `O(e^{mu x})` as `x -> -∞`.
    pub mu: f64,
    /// True when the log-ratios `ln u(x) - mu x` never increase toward the
    /// left edge (over live points), so the tail is dominated by
    /// `C e^{mu x}` with `C` read off away from the edge.
    pub dominated: bool,
    /// `ln C` of the dominating exponential (`-inf` when everything floored).
    pub log_prefactor: f64,
    /// Points on the examined half that took part in the comparison.
    pub live_points: usize,
    /// Points at numeric-zero level, excluded from the comparison.
    pub floored_points: usize,
}

/// Outcome of a nonexistence certificate.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// True when the analytic premises hold *and* the corroborating collapse
    /// run confirmed them.
    pub granted: bool,
    /// Human-readable trail of what was checked.
    pub reasons: Vec<String>,
    /// Uniform envelope rate `gamma + d_+` used for the comparison operator.
    pub envelope_rate_plus: f64,
    /// Leftward spreading speed of the envelope operator.
    pub c_star_minus: f64,
    /// Decay certificate at the chosen margin, when the speed is negative.
    pub decay: Option<DecayReport>,
    /// Iterations until the cap orbit fell below [`COLLAPSE_SUP`].
    pub collapse_iterations: Option<usize>,
    /// Final sup norm of the collapse run.
    pub collapse_sup: f64,
    /// Tail audit of the final collapse iterate at rate `μ_ε`.
    pub tail: Option<TailCheckReport>,
}

/// Computes the largest fixed point below the constant cap by monotone
/// descent from `u ≡ cap`.
///
/// Preconditions enforced: the habitat is monotone in density, and one step
/// from the cap stays below it (cap invariance). Each iteration must decrease
/// pointwise up to round-off; on success the residual is re-measured with an
/// extra operator application rather than trusted from the last delta.
pub fn solve_from_cap(
    op: &EvolutionOp,
    cap: f64,
    tol: f64,
    max_iters: usize,
) -> Result<FixedPointResult> {
    check_solver_inputs(op, cap, tol)?;
    let start = Field::constant(op.grid(), cap);
    descend(op, start, None, cap, tol, max_iters)
}

/// Computes a fixed point inside the order interval `[lower, cap]` by
/// monotone descent from the cap, verifying that `lower` is a subsolution
/// (`Q lower >= lower` up to round-off) and that no iterate ever drops below
/// it. With a nontrivial subsolution this rules out convergence to zero.
pub fn solve_in_interval(
    op: &EvolutionOp,
    lower: &Field,
    cap: f64,
    tol: f64,
    max_iters: usize,
) -> Result<FixedPointResult> {
    check_solver_inputs(op, cap, tol)?;
    if lower.grid() != op.grid() {
        return Err(Error::GridMismatch("lower state grid differs from operator grid".into()));
    }
    let scale = lower.max_value().max(1.0);
    if lower.min_value() < 0.0 {
        return Err(Error::Precondition("lower state must be nonnegative".into()));
    }
    if lower.max_value() > cap * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "lower state exceeds the cap {cap}; the order interval is empty"
        )));
    }
    let stepped = op.apply(lower)?;
    let drop = lower
        .values()
        .iter()
        .zip(stepped.values())
        .map(|(l, s)| l - s)
        .fold(f64::NEG_INFINITY, f64::max);
    if drop > 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "lower state is not a subsolution: one step drops below it by {drop:.3e}"
        )));
    }
    let start = Field::constant(op.grid(), cap);
    descend(op, start, Some(lower), cap, tol, max_iters)
}

fn check_solver_inputs(op: &EvolutionOp, cap: f64, tol: f64) -> Result<()> {
    if !op.habitat().flags().monotone_in_u {
        return Err(Error::Hypothesis(
            "growth map is not monotone in density; monotone iteration does not apply".into(),
        ));
    }
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::invalid("cap", format!("must be positive, got {cap}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    Ok(())
}

/// Monotone descent loop shared by the two solvers.
fn descend(
    op: &EvolutionOp,
    start: Field,
    lower: Option<&Field>,
    cap: f64,
    tol: f64,
    max_iters: usize,
) -> Result<FixedPointResult> {
    let slack = 1e-12 * cap.max(1.0);
    let mut u = start;
    let mut iterations = 0;
    let mut last_delta = f64::INFINITY;
    while iterations < max_iters {
        let v = op.apply(&u)?;
        iterations += 1;
        check_decrease(&u, &v, slack)?;
        if let Some(lower) = lower {
            check_above(&v, lower, 1e-9 * cap.max(1.0))?;
        }
        let delta = v.sup_diff(&u)?;
        u = v;
        if delta <= tol {
            // Candidate found; re-verify the residual with a fresh step
            // instead of trusting the stopping delta.
            let w = op.apply(&u)?;
            iterations += 1;
            let residual = w.sup_diff(&u)?;
            if residual <= tol {
                return finish(op, u, residual, iterations, cap, tol);
            }
            check_decrease(&u, &w, slack)?;
            u = w;
        }
        last_delta = delta;
    }
    Err(Error::NoConvergence { iterations, last_delta })
}

/// The first application from a constant cap doubles as the cap-invariance
/// check; afterwards each step must stay below its predecessor.
fn check_decrease(prev: &Field, next: &Field, slack: f64) -> Result<()> {
    for (i, (p, n)) in prev.values().iter().zip(next.values()).enumerate() {
        if n - p > slack {
            return Err(Error::MonotonicityViolation {
                x: prev.grid().point(i),
                increase: n - p,
            });
        }
    }
    Ok(())
}

fn check_above(state: &Field, lower: &Field, slack: f64) -> Result<()> {
    for (i, (s, l)) in state.values().iter().zip(lower.values()).enumerate() {
        if l - s > slack {
            return Err(Error::Precondition(format!(
                "iterate fell {:.3e} below the declared subsolution at x = {}; \
                 the order interval is not invariant",
                l - s,
                state.grid().point(i)
            )));
        }
    }
    Ok(())
}

fn finish(
    op: &EvolutionOp,
    field: Field,
    residual: f64,
    iterations: usize,
    cap: f64,
    tol: f64,
) -> Result<FixedPointResult> {
    let max = field.max_value();
    let (tail_minus, tail_plus) = field.tail_means(TAIL_FRACTION);
    let classification = if max <= (50.0 * tol).max(COLLAPSE_SUP).min(cap) {
        Classification::Zero
    } else if let Ok(u_plus) = op.habitat().limit_fixed_point(Side::Plus) {
        let plus_matches = (tail_plus - u_plus).abs() <= FRONT_TAIL_REL * u_plus;
        let minus_dead = tail_minus <= FRONT_TAIL_REL * u_plus;
        let minus_matches = (tail_minus - u_plus).abs() <= FRONT_TAIL_REL * u_plus;
        if plus_matches && minus_dead {
            Classification::Front
        } else if plus_matches && minus_matches {
            Classification::Uniform
        } else {
            Classification::Pulse
        }
    } else {
        Classification::Pulse
    };
    Ok(FixedPointResult { field, residual, iterations, classification, tail_minus, tail_plus })
}

/// Audits whether the left tail of `field` is dominated by `C e^{mu x}`.
///
/// Log-ratios `ln u(x_i) - mu x_i` over the left half of the grid must never
/// increase toward the edge. Values below `max(u) ·` [`ZERO_FLOOR_REL`] are
/// numeric zeros and take no part: the constant extension beyond the edge
/// flattens extinct regions at round-off scale, which would otherwise read
/// as a spurious growth of the ratio.
pub fn exponential_tail_check(field: &Field, mu: f64) -> Result<TailCheckReport> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::invalid("mu", format!("must be positive, got {mu}")));
    }
    let grid = field.grid();
    let max = field.max_value();
    if max < 0.0 {
        return Err(Error::Precondition("field must be nonnegative".into()));
    }
    let floor = max * ZERO_FLOOR_REL;
    let half = grid.len() / 2;
    let mut live_points = 0;
    let mut floored_points = 0;
    let mut dominated = true;
    let mut log_prefactor = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for i in 0..half {
        let u = field.values()[i];
        if u <= floor || u == 0.0 {
            floored_points += 1;
            continue;
        }
        live_points += 1;
        let s = u.ln() - mu * grid.point(i);
        log_prefactor = log_prefactor.max(s);
        if let Some(p) = prev {
            // Nondecreasing left-to-right == nonincreasing toward the edge.
            if s < p - 1e-7 {
                dominated = false;
            }
        }
        prev = Some(s);
    }
    Ok(TailCheckReport { mu, dominated, log_prefactor, live_points, floored_points })
}

/// Certifies that the operator has no nontrivial stationary state below its
/// base cap, by the linear-comparison argument.
///
/// Premises (hard errors when violated — the argument simply does not apply):
/// the habitat is monotone and *linearly controlled* (no interior patch
/// exceeds the right-limit rate `d_+`), and its left limit is subcritical.
/// The certificate then builds the uniform linear envelope with head-room
/// `gamma`, requires its leftward spreading speed to be negative, extracts
/// the decay certificate at margin `epsilon`, and corroborates the
/// conclusion by driving the cap orbit below [`COLLAPSE_SUP`] within
/// `max_collapse_iters` steps and auditing the final iterate's left tail at
/// the certified rate.
pub fn nonexistence_certificate(
    op: &EvolutionOp,
    gamma: f64,
    epsilon: f64,
    max_collapse_iters: usize,
) -> Result<Certificate> {
    let habitat = op.habitat();
    let flags = habitat.flags();
    if !flags.monotone_in_u {
        return Err(Error::Hypothesis(
            "growth map is not monotone in density; the comparison argument does not apply".into(),
        ));
    }
    if !flags.linear_controlled {
        return Err(Error::Hypothesis(format!(
            "habitat is not linearly controlled: the coefficient reaches {:.6} above the \
             right-limit rate {:.6}, so growth is not dominated by the limiting linearization \
             and no conclusion follows from a negative leftward speed",
            habitat.sup_coefficient(),
            habitat.coefficient_limit(Side::Plus),
        )));
    }
    let d_minus = habitat.coefficient_limit(Side::Minus);
    if d_minus >= 1.0 {
        return Err(Error::Hypothesis(format!(
            "left limiting rate {d_minus} is not subcritical; the left tail need not die out"
        )));
    }

    let cap = habitat.caps()[0];
    let envelope = build_envelope(habitat, gamma, cap)?;
    let mut reasons = Vec::new();
    reasons.push(format!(
        "uniform linear envelope with rate {:.6} dominates growth on [0, {cap}]",
        envelope.rate_plus()
    ));
    if !envelope.uniformly_dominated() {
        return Ok(Certificate {
            granted: false,
            reasons: {
                reasons.push("envelope rate is not uniformly dominated by the right-limit rate".into());
                reasons
            },
            envelope_rate_plus: envelope.rate_plus(),
            c_star_minus: f64::NAN,
            decay: None,
            collapse_iterations: None,
            collapse_sup: f64::NAN,
            tail: None,
        });
    }

    let speed = spreading_speed(envelope.rate_plus(), op.kernel(), Side::Minus)?;
    if speed.c_star >= 0.0 {
        reasons.push(format!(
            "leftward envelope speed {:.6} is nonnegative; nonexistence cannot be certified",
            speed.c_star
        ));
        return Ok(Certificate {
            granted: false,
            reasons,
            envelope_rate_plus: envelope.rate_plus(),
            c_star_minus: speed.c_star,
            decay: None,
            collapse_iterations: None,
            collapse_sup: f64::NAN,
            tail: None,
        });
    }
    let decay = decay_rate(envelope.rate_plus(), op.kernel(), epsilon)?;
    reasons.push(format!(
        "leftward envelope speed {:.6} < 0 with one-step tail multiplier {:.6} < {:.6}",
        speed.c_star, decay.lambda, decay.bound
    ));

    // Corroboration: the cap orbit must actually die out...
    let slack = 1e-12 * cap.max(1.0);
    let mut u = Field::constant(op.grid(), cap);
    let mut collapse_iterations = None;
    for k in 1..=max_collapse_iters {
        let v = op.apply(&u)?;
        check_decrease(&u, &v, slack)?;
        u = v;
        if u.max_value() < COLLAPSE_SUP {
            collapse_iterations = Some(k);
            break;
        }
    }
    let collapse_sup = u.max_value();
    match collapse_iterations {
        Some(k) => reasons.push(format!(
            "cap orbit fell below {COLLAPSE_SUP:.0e} after {k} steps (final sup {collapse_sup:.3e})"
        )),
        None => reasons.push(format!(
            "cap orbit still at sup {collapse_sup:.3e} after {max_collapse_iters} steps"
        )),
    }

    // ...and its remains must decay at the certified rate toward the left.
    let tail = exponential_tail_check(&u, decay.mu_epsilon)?;
    reasons.push(if tail.dominated {
        format!("final iterate's left tail is dominated at rate {:.6}", decay.mu_epsilon)
    } else {
        format!("final iterate's left tail is NOT dominated at rate {:.6}", decay.mu_epsilon)
    });

    let granted = collapse_iterations.is_some() && tail.dominated;
    Ok(Certificate {
        granted,
        reasons,
        envelope_rate_plus: envelope.rate_plus(),
        c_star_minus: speed.c_star,
        decay: Some(decay),
        collapse_iterations,
        collapse_sup,
        tail: Some(tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::habitat::{Habitat, Nonlinearity, Profile};
    use crate::kernel::Kernel;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn homogeneous_op() -> EvolutionOp {
        let habitat = Habitat::from_parts(
            Profile::Constant { value: 2.0 },
            Nonlinearity::BevertonHolt { carrying: 3.0 },
        )
        .unwrap();
        let grid = SpatialGrid::new(-15.0, 15.0, 151).unwrap();
        EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0).unwrap(), grid).unwrap()
    }

    fn sigmoid_op() -> EvolutionOp {
        let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-40.0, 40.0, 401).unwrap();
        EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0).unwrap(), grid).unwrap()
    }

    #[test]
    fn homogeneous_supercritical_map_settles_at_capacity() {
        let op = homogeneous_op();
        let result = solve_from_cap(&op, 3.0, 1e-11, 100).unwrap();
        assert!(result.residual <= 1e-11);
        assert_eq!(result.classification, Classification::Uniform);
        assert_abs_diff_eq!(result.tail_plus, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(result.field.eval(0.0), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn sigmoid_habitat_produces_a_front() {
        let op = sigmoid_op();
        let result = solve_from_cap(&op, 1.0, 1e-10, 300).unwrap();
        assert!(result.residual <= 1e-10);
        assert_eq!(result.classification, Classification::Front);
        assert_abs_diff_eq!(result.tail_plus, 1.0, epsilon = 1e-2);
        assert!(result.tail_minus < 1e-2);
        // The profile is nondecreasing left to right.
        let v = result.field.values();
        for w in v.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn interval_solver_recovers_the_front_above_a_subsolution() {
        let op = sigmoid_op();
        let front = solve_from_cap(&op, 1.0, 1e-10, 300).unwrap();
        let again = solve_in_interval(&op, &front.field, 2.0, 1e-10, 300).unwrap();
        assert_eq!(again.classification, Classification::Front);
        assert!(again.field.sup_diff(&front.field).unwrap() <= 1e-6);
        // Iterates must never dip below the subsolution.
        assert!(again.field.min_value() >= -1e-15);
    }

    #[test]
    fn non_invariant_caps_and_bad_subsolutions_are_rejected() {
        let op = homogeneous_op();
        // One step from 0.5 overshoots it: f(0.5) = 2*0.5/(1 + 0.5/3) > 0.5.
        let err = solve_from_cap(&op, 0.5, 1e-10, 100).unwrap_err();
        assert!(matches!(err, Error::MonotonicityViolation { .. }), "{err}");
        // A state above the fixed point is not a subsolution.
        let above = Field::constant(op.grid(), 3.1);
        let err = solve_in_interval(&op, &above, 4.0, 1e-10, 100).unwrap_err();
        assert!(err.to_string().contains("subsolution"), "{err}");
        // Lower state above the cap leaves an empty interval.
        let err = solve_in_interval(&op, &above, 3.05, 1e-10, 100).unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
    }

    #[test]
    fn nonmonotone_habitats_are_refused_by_the_order_solvers() {
        let habitat =
            Habitat::from_parts(Profile::Constant { value: 2.0 }, Nonlinearity::Ricker).unwrap();
        let grid = SpatialGrid::new(-10.0, 10.0, 101).unwrap();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0).unwrap(), grid).unwrap();
        let err = solve_from_cap(&op, 1.0, 1e-10, 10).unwrap_err();
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn subcritical_homogeneous_map_collapses_to_zero() {
        let habitat = Habitat::linear(0.6).unwrap();
        let grid = SpatialGrid::new(-15.0, 15.0, 151).unwrap();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0).unwrap(), grid).unwrap();
        let result = solve_from_cap(&op, 1.0, 1e-10, 200).unwrap();
        assert_eq!(result.classification, Classification::Zero);
        assert!(result.field.max_value() < 1e-8);
    }

    #[test]
    fn tail_check_accepts_steeper_and_rejects_shallower_decay() {
        let grid = SpatialGrid::new(-30.0, 10.0, 401).unwrap();
        let steep = Field::from_fn(grid, |x| (0.8 * x).exp());
        // True rate 0.8 dominates a claimed rate 0.5 ...
        let report = exponential_tail_check(&steep, 0.5).unwrap();
        assert!(report.dominated, "{report:?}");
        assert!(report.live_points > 100);
        // ... but not a claimed rate 1.0.
        let report = exponential_tail_check(&steep, 1.0).unwrap();
        assert!(!report.dominated);
    }

    #[test]
    fn tail_check_floors_numeric_zeros_from_edge_flattening() {
        let grid = SpatialGrid::new(-30.0, 10.0, 401).unwrap();
        // Collapsed state: exponential core at 1e-9 scale, flat residue at
        // 1e-25 near the left edge (as constant extension produces).
        let field = Field::from_fn(grid, |x| 1e-9 * (2.0 * (x - 10.0)).exp().max(1e-16));
        let report = exponential_tail_check(&field, 1.5).unwrap();
        assert!(report.dominated, "{report:?}");
        assert!(report.floored_points > 0);
        // Without the floor the flat stretch would read as ratio growth
        // toward the edge; verify the floor is what saved us.
        assert!(report.live_points + report.floored_points == 200);
        // The all-zero state is trivially dominated.
        let zero = Field::constant(grid, 0.0);
        let report = exponential_tail_check(&zero, 1.0).unwrap();
        assert!(report.dominated);
        assert_eq!(report.live_points, 0);
    }

    #[test]
    fn certificate_granted_for_controlled_drifting_habitat() {
        let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-60.0, 60.0, 601).unwrap();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(2.0, 0.5).unwrap(), grid).unwrap();
        let cert = nonexistence_certificate(&op, 0.1, 0.4, 300).unwrap();
        assert!(cert.granted, "{:?}", cert.reasons);
        assert!(cert.c_star_minus < 0.0);
        assert!(cert.collapse_iterations.unwrap() < 200);
        assert!(cert.collapse_sup < COLLAPSE_SUP);
        assert!(cert.tail.unwrap().dominated);
        assert_abs_diff_eq!(cert.envelope_rate_plus, 0.1 + E, epsilon = 1e-12);
    }

    #[test]
    fn certificate_refused_when_growth_is_not_linearly_controlled() {
        let habitat = Habitat::patch_with_ramp(8.0).unwrap();
        let grid = SpatialGrid::new(-30.0, 30.0, 301).unwrap();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(2.0, 0.5).unwrap(), grid).unwrap();
        let err = nonexistence_certificate(&op, 0.1, 0.4, 50).unwrap_err();
        assert!(err.is_hypothesis_violation());
        assert!(err.to_string().contains("not linearly controlled"), "{err}");
    }

    #[test]
    fn certificate_is_withheld_when_the_leftward_speed_is_nonnegative() {
        let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-40.0, 40.0, 401).unwrap();
        let op = EvolutionOp::new(habitat, Kernel::gaussian(0.0, 1.0).unwrap(), grid).unwrap();
        let cert = nonexistence_certificate(&op, 0.1, 0.4, 50).unwrap();
        assert!(!cert.granted);
        assert!(cert.c_star_minus > 0.0);
        assert!(cert.reasons.iter().any(|r| r.contains("nonnegative")));
    }
}

//! Orbit diagnostics: front positions, fitted speeds, and windowed gap
//! series for convergence, annihilation and attractivity claims.
//!
//! The long-run statements about growth–dispersal orbits all have the same
//! shape: *over a window that moves or expands linearly in the step count,
//! the state approaches a limit*. Each diagnostic here turns one such claim
//! into a [`GapSeries`] — per recorded step, the supremum gap over the
//! claim's window — leaving pass/fail thresholds to the caller. Windows that
//! leave the grid are flagged as clipped rather than silently shrunk, and a
//! series with no usable window at all reports itself inconclusive.

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::grid::Field;
use serde::Serialize;

/// Minimum number of tracked positions a speed fit needs.
pub const MIN_FIT_POINTS: usize = 10;

/// Level-crossing positions of every recorded snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct FrontTrace {
    /// Contour level being tracked.
    pub level: f64,
    /// Steps at which snapshots were recorded.
    pub steps: Vec<usize>,
    /// Leftmost crossing of the level, when it lies strictly inside the grid.
    pub x_minus: Vec<Option<f64>>,
    /// Rightmost crossing of the level, when it lies strictly inside the grid.
    pub x_plus: Vec<Option<f64>>,
    /// Sup norm of each snapshot.
    pub max: Vec<f64>,
}

/// Least-squares speed fit through tracked front positions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpeedFit {
    /// Fitted positions per step — the measured front speed.
    pub speed: f64,
    /// Fitted position at step 0.
    pub intercept: f64,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
    /// Number of positions used.
    pub points: usize,
}

/// Per-step supremum gaps over a moving window.
#[derive(Debug, Clone, Serialize)]
pub struct GapSeries {
    /// Steps at which snapshots were recorded (initial state excluded).
    pub steps: Vec<usize>,
    /// Sup gap over the window; `None` when the window missed the grid.
    pub gaps: Vec<Option<f64>>,
    /// True when the theoretical window extended beyond the grid, so the
    /// reported gap covers only the truncated part.
    pub clipped: Vec<bool>,
}

impl GapSeries {
    /// Gap at the last step whose window intersected the grid.
    pub fn final_gap(&self) -> Option<f64> {
        self.gaps.iter().rev().find_map(|g| *g)
    }

    /// Largest gap over steps `>= from_step` (ignoring empty windows).
    pub fn max_from_step(&self, from_step: usize) -> Option<f64> {
        self.steps
            .iter()
            .zip(&self.gaps)
            .filter(|(s, _)| **s >= from_step)
            .filter_map(|(_, g)| *g)
            .reduce(f64::max)
    }

    /// True when no recorded step had a usable window — the claim could not
    /// be tested at all on this grid.
    pub fn inconclusive(&self) -> bool {
        self.gaps.iter().all(|g| g.is_none())
    }
}

/// Windowed-convergence diagnostic toward a constant level `u_star`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// Gap `sup |u_n - u_star|` over the expanding interior window
    /// `n · [max(eps, -c_minus + eps), c_plus - eps]`.
    pub window: GapSeries,
    /// Population supremum on the leftward ray `x <= -n eps`, which must
    /// empty out when the leftward speed is negative.
    pub left_sup: GapSeries,
}

/// Annihilation diagnostic ahead of the advancing front.
#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationReport {
    /// Rightmost point where the initial state is positive.
    pub support_edge: f64,
    /// Population supremum on `x >= support_edge + n max(eps, c_plus + eps)`.
    pub beyond: GapSeries,
    /// For retreating dynamics (`c_plus < 0`): supremum on the *fixed* ray
    /// `x >= support_edge`, which then must vanish as a whole.
    pub fixed_ray: Option<GapSeries>,
}

/// Attractivity diagnostic: two orbits squeezed onto one stationary state.
#[derive(Debug, Clone, Serialize)]
pub struct AttractivityReport {
    /// Gap of the first orbit to the stationary state on `x <= n (c_plus - eps)`.
    pub gap_a: GapSeries,
    /// Same for the second orbit.
    pub gap_b: GapSeries,
}

/// Tracks the level-`level` contour of every snapshot.
///
/// A crossing is reported only when it lies strictly inside the grid: if the
/// contour runs off an edge (or the snapshot never reaches the level), the
/// entry is `None` instead of a fabricated position.
pub fn track_front(traj: &Trajectory, level: f64) -> Result<FrontTrace> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::invalid("level", format!("must be positive, got {level}")));
    }
    let mut trace = FrontTrace {
        level,
        steps: Vec::new(),
        x_minus: Vec::new(),
        x_plus: Vec::new(),
        max: Vec::new(),
    };
    for (step, u) in traj.snapshots() {
        let grid = u.grid();
        let v = u.values();
        let n = grid.len();
        let h = grid.spacing();

        let x_plus = v
            .iter()
            .rposition(|&val| val >= level)
            .filter(|&i| i + 1 < n)
            .map(|i| grid.point(i) + h * (v[i] - level) / (v[i] - v[i + 1]));
        let x_minus = v
            .iter()
            .position(|&val| val >= level)
            .filter(|&i| i > 0)
            .map(|i| grid.point(i - 1) + h * (level - v[i - 1]) / (v[i] - v[i - 1]));

        trace.steps.push(*step);
        trace.x_plus.push(x_plus);
        trace.x_minus.push(x_minus);
        trace.max.push(u.max_value());
    }
    Ok(trace)
}

/// Fits a speed to tracked front positions by ordinary least squares,
/// using steps `>= burn_in` with a well-defined position.
pub fn estimate_speed(trace: &FrontTrace, side: crate::Side, burn_in: usize) -> Result<SpeedFit> {
    let positions = match side {
        crate::Side::Minus => &trace.x_minus,
        crate::Side::Plus => &trace.x_plus,
    };
    let pts: Vec<(f64, f64)> = trace
        .steps
        .iter()
        .zip(positions)
        .filter(|(s, _)| **s >= burn_in)
        .filter_map(|(s, x)| x.map(|x| (*s as f64, x)))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::Precondition(format!(
            "only {} usable front positions after step {burn_in}; need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_s: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_x: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_s).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_s) * (p.1 - mean_x)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("all positions share one step; cannot fit a speed".into()));
    }
    let speed = sxy / sxx;
    let intercept = mean_x - speed * mean_s;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - speed * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_x).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(SpeedFit { speed, intercept, r_squared, points: pts.len() })
}

/// Builds a gap series over per-step windows `window(n) = (lo, hi)`,
/// measuring `sup |u_n - reference|` (or `sup |u_n|` without a reference).
fn window_series(
    traj: &Trajectory,
    reference: Option<&Field>,
    mut window: impl FnMut(usize) -> (f64, f64),
) -> Result<GapSeries> {
    let mut series = GapSeries { steps: Vec::new(), gaps: Vec::new(), clipped: Vec::new() };
    for (step, u) in traj.snapshots() {
        if *step == 0 {
            continue;
        }
        let (lo, hi) = window(*step);
        let grid = u.grid();
        let slack = 0.5 * grid.spacing();
        let sup = match reference {
            Some(w) => u.sup_diff_on(w, lo, hi)?,
            None => u.sup_on(lo, hi),
        };
        series.steps.push(*step);
        series.gaps.push((sup.points > 0).then_some(sup.value));
        series
            .clipped
            .push(lo < grid.x_min() - slack || hi > grid.x_max() + slack);
    }
    Ok(series)
}

/// Measures convergence to the level `u_star` over the expanding window
/// `n · [max(eps, -c_minus + eps), c_plus - eps]`, together with the
/// leftward-ray supremum `sup_{x <= -n eps} u_n`.
///
/// `c_minus`/`c_plus` are the *signed* leftward and rightward speeds; the
/// margin must satisfy `eps < c_plus` and `eps < (c_plus + c_minus)/2`, or
/// the window is empty for every `n` and the claim is untestable.
pub fn upward_convergence(
    traj: &Trajectory,
    u_star: f64,
    eps: f64,
    c_plus: f64,
    c_minus: f64,
) -> Result<ConvergenceReport> {
    if !(u_star.is_finite() && u_star > 0.0) {
        return Err(Error::invalid("u_star", format!("must be positive, got {u_star}")));
    }
    if !(eps > 0.0 && eps < c_plus && eps < 0.5 * (c_plus + c_minus)) {
        return Err(Error::invalid(
            "eps",
            format!(
                "must lie in (0, min({c_plus}, {})) for speeds c_+ = {c_plus}, c_- = {c_minus}",
                0.5 * (c_plus + c_minus)
            ),
        ));
    }
    let grid = traj.last().grid();
    let target = Field::constant(grid, u_star);
    let inner_rate = eps + (-c_minus).max(0.0);
    let window = window_series(traj, Some(&target), |n| {
        (n as f64 * inner_rate, n as f64 * (c_plus - eps))
    })?;
    let left_sup = window_series(traj, None, |n| (grid.x_min(), -(n as f64) * eps))?;
    Ok(ConvergenceReport { window, left_sup })
}

/// Measures decay ahead of the front: the supremum of `u_n` over
/// `x >= support_edge + n max(eps, c_plus + eps)`, where `support_edge` is
/// the rightmost point with `u_0 > 0`.
///
/// Requires initial data that actually vanishes beyond some threshold inside
/// the grid; otherwise there is no ray to make a claim about.
pub fn annihilation(traj: &Trajectory, eps: f64, c_plus: f64) -> Result<AnnihilationReport> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
    }
    let (_, u0) = &traj.snapshots()[0];
    let grid = u0.grid();
    let support_edge = match u0.values().iter().rposition(|&v| v > 0.0) {
        None => return Err(Error::Precondition("initial state is identically zero".into())),
        Some(i) if i + 1 == grid.len() => {
            return Err(Error::Precondition(
                "initial state is positive at the right edge; it has no support threshold".into(),
            ))
        }
        Some(i) => grid.point(i),
    };
    let rate = eps.max(c_plus + eps);
    let beyond = window_series(traj, None, |n| (support_edge + n as f64 * rate, grid.x_max()))?;
    let fixed_ray = if c_plus < 0.0 {
        Some(window_series(traj, None, |_| (support_edge, grid.x_max()))?)
    } else {
        None
    };
    Ok(AnnihilationReport { support_edge, beyond, fixed_ray })
}

/// Gap of one orbit to a stationary state `w` over the expanding windows
/// `x <= n (c_plus - eps)`.
pub fn reference_gap(traj: &Trajectory, w: &Field, eps: f64, c_plus: f64) -> Result<GapSeries> {
    if !(eps > 0.0 && eps < c_plus) {
        return Err(Error::invalid("eps", format!("must lie in (0, {c_plus}), got {eps}")));
    }
    let grid = w.grid();
    window_series(traj, Some(w), |n| (grid.x_min(), n as f64 * (c_plus - eps)))
}

/// Measures how two orbits are squeezed onto one stationary state `w` over
/// the windows `x <= n (c_plus - eps)`.
pub fn attractivity(
    traj_a: &Trajectory,
    traj_b: &Trajectory,
    w: &Field,
    eps: f64,
    c_plus: f64,
) -> Result<AttractivityReport> {
    Ok(AttractivityReport {
        gap_a: reference_gap(traj_a, w, eps, c_plus)?,
        gap_b: reference_gap(traj_b, w, eps, c_plus)?,
    })
}

//! End-to-end acceptance gate.
//!
//! Each test exercises one headline behaviour of the library at fixed
//! parameters and tolerances, prints a single pass/fail line with the
//! measured values (visible with `--nocapture`), and fails loudly when a
//! bound is missed. Together they pin the golden speed values, the
//! window diagnostics, the stationary-state solvers, the nonexistence
//! certificate, the calibrated-patch counterexample, and the
//! cross-validation battery.

use habwave_core::diagnostics::{annihilation, attractivity, upward_convergence};
use habwave_core::speeds::spreading_speed;
use habwave_core::{
    counterexample_suite, find_beta0, nonexistence_certificate, run_checks, solve_from_cap,
    Classification, EvolutionOp, Field, Habitat, Kernel, Samples, Side, SpatialGrid,
};
use std::f64::consts::{E, SQRT_2};
use std::time::Instant;

/// Prints one line for the criterion and panics when any part failed.
fn criterion(name: &str, parts: &[(String, bool)]) {
    let ok = parts.iter().all(|(_, p)| *p);
    let detail: Vec<String> = parts
        .iter()
        .map(|(d, p)| if *p { d.clone() } else { format!("{d} [FAILED]") })
        .collect();
    let line = format!("{} {name}: {}", if ok { "pass" } else { "FAIL" }, detail.join("; "));
    println!("{line}");
    assert!(ok, "{line}");
}

fn drifting_kernel() -> Kernel {
    Kernel::gaussian(2.0, 0.5).expect("valid kernel")
}

/// The heterogeneous habitat built throughout: a supercritical patch at the
/// origin (calibrated so the patch operator's spectral radius is 1.25) glued
/// to a ramp rising to the right-limit coefficient `e`.
fn ramped_habitat() -> Habitat {
    let grid = SpatialGrid::new(-20.0, 20.0, 801).expect("valid grid");
    let calibration = find_beta0(&drifting_kernel(), grid, 0.25, 1e-10).expect("calibration");
    Habitat::patch_with_ramp(calibration.beta0).expect("valid habitat")
}

fn one_sided_habitat() -> Habitat {
    Habitat::beverton_holt(0.5, E, 1.0, 1.0).expect("valid habitat")
}

fn triangular_bump(grid: SpatialGrid) -> Field {
    Field::from_fn(grid, |x| (1.0 - 0.5 * x.abs()).max(0.0))
}

#[test]
fn leftward_speed_of_the_drifting_kernel_retreats_at_unit_rate() {
    let start = Instant::now();
    let report = spreading_speed(E, &drifting_kernel(), Side::Minus).expect("speed");
    let elapsed = start.elapsed();
    criterion(
        "leftward speed retreats at unit rate",
        &[
            (
                format!("c*_- = {:.12} within 1e-6 of -1", report.c_star),
                (report.c_star + 1.0).abs() < 1e-6,
            ),
            (
                format!("minimizer mu = {:.8} within 1e-4 of 2", report.mu_star),
                (report.mu_star - 2.0).abs() < 1e-4,
            ),
            (format!("runtime {elapsed:.2?} < 1s", ), elapsed.as_secs_f64() < 1.0),
        ],
    );
}

#[test]
fn closed_form_speeds_match_on_both_sides_and_mgf_paths_agree() {
    let drift = drifting_kernel();
    let plus = spreading_speed(E, &drift, Side::Plus).expect("speed");
    let std = Kernel::gaussian(0.0, 1.0).expect("valid kernel");
    let sym_plus = spreading_speed(E, &std, Side::Plus).expect("speed");
    let sym_minus = spreading_speed(E, &std, Side::Minus).expect("speed");

    // Quadrature path against the analytic moment generating function.
    let mut worst_rel = 0.0f64;
    for t in [-1.5, -0.5, 0.5, 1.0, 1.5] {
        let exact = std.mgf(t).expect("mgf");
        let quad = std.mgf_quadrature(t, 0.005).expect("quadrature mgf");
        worst_rel = worst_rel.max(((quad - exact) / exact).abs());
    }

    // The same speed through a tabulated kernel sampled from the density
    // (normalized to unit trapezoid mass), at its coarser accuracy.
    let h = 0.01;
    let n = (16.0 / h) as usize;
    let pairs: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = -8.0 + i as f64 * h;
            (x, (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    let mass: f64 = pairs.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    let normalized: Vec<(f64, f64)> = pairs.into_iter().map(|(x, y)| (x, y / mass)).collect();
    let tabulated = Kernel::tabulated(Samples::from_pairs(normalized).expect("samples"))
        .expect("tabulated kernel");
    let tab_plus = spreading_speed(E, &tabulated, Side::Plus).expect("speed");

    criterion(
        "closed-form speeds and moment-function paths agree",
        &[
            (
                format!("drifting c*_+ = {:.12} within 1e-6 of 3", plus.c_star),
                (plus.c_star - 3.0).abs() < 1e-6,
            ),
            (
                format!("symmetric c*_+ = {:.12} within 1e-6 of sqrt(2)", sym_plus.c_star),
                (sym_plus.c_star - SQRT_2).abs() < 1e-6,
            ),
            (
                format!("symmetric c*_- = {:.12} within 1e-6 of sqrt(2)", sym_minus.c_star),
                (sym_minus.c_star - SQRT_2).abs() < 1e-6,
            ),
            (
                format!("quadrature vs analytic moment function: worst rel {worst_rel:.2e} < 1e-6"),
                worst_rel < 1e-6,
            ),
            (
                format!("tabulated-kernel speed {:.6} within 1e-2 of sqrt(2)", tab_plus.c_star),
                (tab_plus.c_star - SQRT_2).abs() < 1e-2,
            ),
        ],
    );
}

#[test]
fn state_rises_to_the_limit_level_on_expanding_windows() {
    let start = Instant::now();
    let grid = SpatialGrid::new(-300.0, 300.0, 6000).expect("valid grid");
    let habitat = ramped_habitat();
    let op = EvolutionOp::new(habitat, drifting_kernel(), grid).expect("operator");
    let traj = op.iterate(&triangular_bump(grid), 80, 1).expect("trajectory");
    // Window speeds of the right-limit linearization (coefficient e):
    // leftward -1, rightward 3, so with margin 0.5 the windows are
    // n·[1.5, 2.5] and the left ray is x <= -0.5 n.
    let report = upward_convergence(&traj, 1.0, 0.5, 3.0, -1.0).expect("diagnostic");
    let gap = report.window.final_gap().expect("usable window");
    let left = report.left_sup.final_gap().expect("usable ray");
    let elapsed = start.elapsed();
    criterion(
        "state rises to the limit level on expanding windows",
        &[
            (format!("final window gap {gap:.3e} < 1e-2"), gap < 1e-2),
            (format!("final left-ray sup {left:.3e} < 1e-3"), left < 1e-3),
            (format!("runtime {elapsed:.2?} < 60s"), elapsed.as_secs_f64() < 60.0),
        ],
    );
}

#[test]
fn left_supported_data_annihilates_ahead_of_the_advancing_front() {
    let grid = SpatialGrid::new(-300.0, 300.0, 6000).expect("valid grid");
    let habitat = ramped_habitat();
    let op = EvolutionOp::new(habitat, drifting_kernel(), grid).expect("operator");
    let u0 = Field::from_fn(grid, |x| if x <= -3.0 { 1.0 } else { 0.0 });
    let traj = op.iterate(&u0, 80, 1).expect("trajectory");

    // Explicit ray: the supremum over x >= 3.5 n must sit below 1e-6 from
    // iteration 40 on (margin 0.5 past the rightward speed 3).
    let mut worst = 0.0f64;
    let mut judged = 0usize;
    for (step, field) in traj.snapshots() {
        if *step >= 40 {
            let sup = field.sup_on(3.5 * *step as f64, grid.x_max());
            if sup.points > 0 {
                judged += 1;
                worst = worst.max(sup.value);
            }
        }
    }
    // The library's own series uses the support-edge ray, which starts at
    // -3 + 3.5 n and therefore dominates the explicit one.
    let series = annihilation(&traj, 0.5, 3.0).expect("diagnostic");
    let series_final = series.beyond.final_gap().expect("usable ray");
    criterion(
        "left-supported data annihilates ahead of the advancing front",
        &[
            (
                format!("sup over the outrunning ray {worst:.3e} < 1e-6 across {judged} steps"),
                judged > 0 && worst < 1e-6,
            ),
            (
                format!("support-edge ray series final {series_final:.3e} < 1e-6"),
                series_final < 1e-6,
            ),
        ],
    );
}

#[test]
fn monotone_descent_finds_a_front_for_a_one_sided_habitat() {
    let grid = SpatialGrid::new(-150.0, 150.0, 3001).expect("valid grid");
    let kernel = Kernel::gaussian(0.0, 1.0).expect("valid kernel");
    let op = EvolutionOp::new(one_sided_habitat(), kernel, grid).expect("operator");
    let result = solve_from_cap(&op, 1.0, 1e-10, 5_000).expect("stationary state");
    criterion(
        "monotone descent finds a front for a one-sided habitat",
        &[
            (
                format!("residual {:.3e} < 1e-8", result.residual),
                result.residual < 1e-8,
            ),
            (
                format!("classification {:?} is a front", result.classification),
                result.classification == Classification::Front,
            ),
            (
                format!("right tail {:.6} within 1e-3 of the carrying level 1", result.tail_plus),
                (result.tail_plus - 1.0).abs() < 1e-3,
            ),
            (
                format!("left tail {:.3e} < 1e-3", result.tail_minus),
                result.tail_minus < 1e-3,
            ),
        ],
    );
}

#[test]
fn certificate_refutes_stationary_states_for_a_controlled_habitat() {
    let grid = SpatialGrid::new(-60.0, 60.0, 601).expect("valid grid");
    let op = EvolutionOp::new(one_sided_habitat(), drifting_kernel(), grid).expect("operator");
    let cert = nonexistence_certificate(&op, 0.1, 0.4, 500).expect("certificate");
    let collapse_iters = cert.collapse_iterations.unwrap_or(usize::MAX);
    let tail = cert.tail.as_ref().expect("tail audit present");
    criterion(
        "certificate refutes stationary states for a controlled habitat",
        &[
            (format!("granted with reasons: {}", cert.reasons.len()), cert.granted),
            (
                format!("cap orbit sup {:.3e} < 1e-8 after {collapse_iters} <= 500 iterations", cert.collapse_sup),
                cert.collapse_sup < 1e-8 && collapse_iters <= 500,
            ),
            (
                format!(
                    "final iterate's left tail dominated at mu = {:.6} (log prefactor {:.3})",
                    tail.mu, tail.log_prefactor
                ),
                tail.dominated,
            ),
        ],
    );
}

#[test]
fn calibrated_patch_pins_a_pulse_despite_retreating_leftward_speed() {
    let grid = SpatialGrid::new(-20.0, 20.0, 801).expect("valid grid");
    let report = counterexample_suite(grid, 1e-10).expect("suite");
    let cal = &report.calibration;
    let linearity_err = (cal.rho_at_beta0 - (1.0 + cal.margin)).abs();
    let pulse = &report.pulse;
    let forced = &report.forced;
    criterion(
        "calibrated patch pins a pulse despite retreating leftward speed",
        &[
            (
                format!("leftward speed {:.9} within 1e-6 of -1 (retreating)", report.c_star_minus),
                report.c_star_minus < 0.0 && (report.c_star_minus + 1.0).abs() < 1e-6,
            ),
            (
                format!(
                    "patch operator supercritical: rho = {:.9} > 1, linearity error {linearity_err:.2e} < 1e-8",
                    cal.rho_at_beta0
                ),
                cal.rho_at_beta0 > 1.0 && linearity_err < 1e-8,
            ),
            (
                format!(
                    "pulse: residual {:.2e} < 1e-8, max {:.3} > 1e-3, tails {:.2e}/{:.2e} < 1e-4",
                    pulse.residual,
                    pulse.field.max_value(),
                    pulse.tail_minus,
                    pulse.tail_plus
                ),
                pulse.residual < 1e-8
                    && pulse.field.max_value() > 1e-3
                    && pulse.tail_minus < 1e-4
                    && pulse.tail_plus < 1e-4,
            ),
            (
                format!(
                    "forced state: residual {:.2e} < 1e-8, right tail {:.6} within 1e-3 of 1",
                    forced.residual, forced.tail_plus
                ),
                forced.residual < 1e-8 && (forced.tail_plus - 1.0).abs() < 1e-3,
            ),
            (
                format!(
                    "forced state dominates the pulse pointwise (defect {:.2e} <= 1e-12)",
                    report.domination_defect
                ),
                report.domination_defect <= 1e-12,
            ),
            (
                format!("nonexistence machinery refuses the habitat: {}", report.refusal),
                !report.refusal.is_empty(),
            ),
        ],
    );
}

#[test]
fn distinct_initial_data_are_squeezed_onto_one_stationary_state() {
    let grid = SpatialGrid::new(-150.0, 150.0, 3001).expect("valid grid");
    let kernel = Kernel::gaussian(0.0, 1.0).expect("valid kernel");
    let op = EvolutionOp::new(one_sided_habitat(), kernel, grid).expect("operator");
    let w = solve_from_cap(&op, 1.0, 1e-10, 5_000).expect("stationary state").field;
    let traj_a = op.iterate(&triangular_bump(grid), 120, 1).expect("trajectory");
    let traj_b = op.iterate(&Field::constant(grid, 1.0), 120, 1).expect("trajectory");
    let report = attractivity(&traj_a, &traj_b, &w, 0.5, SQRT_2).expect("diagnostic");
    let gap_a = report.gap_a.final_gap().expect("usable window");
    let gap_b = report.gap_b.final_gap().expect("usable window");
    criterion(
        "distinct initial data are squeezed onto one stationary state",
        &[
            (format!("bump orbit gap {gap_a:.3e} < 1e-3 by step 120"), gap_a < 1e-3),
            (format!("saturated orbit gap {gap_b:.3e} < 1e-3 by step 120"), gap_b < 1e-3),
        ],
    );
}

#[test]
fn cross_validation_battery_passes() {
    let start = Instant::now();
    let report = run_checks();
    let elapsed = start.elapsed();
    let failed: Vec<&str> =
        report.outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    criterion(
        "cross-validation battery passes",
        &[
            (
                format!(
                    "{}/{} checks passed{}",
                    report.outcomes.len() - failed.len(),
                    report.outcomes.len(),
                    if failed.is_empty() { String::new() } else { format!(" (failed: {})", failed.join(", ")) }
                ),
                report.all_passed,
            ),
            (format!("runtime {elapsed:.2?} < 120s"), elapsed.as_secs_f64() < 120.0),
        ],
    );
}

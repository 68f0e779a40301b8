//! Subcommand drivers.
//!
//! Each driver loads the sections it needs from the configuration, runs the
//! job, writes its artifacts plus `manifest.json` into the output directory,
//! and reports how the run ended. Verdicts on configured diagnostics map to
//! the exit code; hard errors bubble up to `main` instead.

use crate::config::{RunConfig, SweepCommand, SweepConfig, SweepEntry};
use crate::manifest::{Manifest, Status};
use crate::svg::{self, Series};
use habwave_core::diagnostics::{self, GapSeries};
use habwave_core::speeds::{self, DecayReport};
use habwave_core::{
    counterexample_suite, nonexistence_certificate, solve_from_cap, solve_in_interval,
    Classification, Error, EvolutionOp, Field, FixedPointResult, Result, Side, SpatialGrid,
};
use rayon::prelude::*;
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;

/// Fallback grid for the built-in counterexample: generous enough to hold
/// the calibrated patch's pulse and the forced front's transition layer.
const DEFAULT_CE_GRID: (f64, f64, usize) = (-20.0, 20.0, 801);

/// Decades spanned by the speed-objective curve around the minimizers.
const CURVE_SPREAD: f64 = 5.0;

/// Uppercase tag used for stdout verdict lines.
fn word(status: Status) -> &'static str {
    match status {
        Status::Pass => "PASS",
        Status::DiagnosticFailure => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
        Status::Error => "ERROR",
    }
}

/// One judged diagnostic, both printed and echoed into the manifest summary.
struct Verdict {
    name: &'static str,
    status: Status,
    detail: String,
}

impl Verdict {
    fn to_json(&self) -> serde_json::Value {
        json!({ "name": self.name, "status": self.status.label(), "detail": self.detail })
    }
}

/// The number a gap series is judged by: everything from `from_step` on when
/// configured, otherwise the final usable entry.
fn measured(series: &GapSeries, from_step: Option<usize>) -> Option<f64> {
    match from_step {
        Some(from) => series.max_from_step(from),
        None => series.final_gap(),
    }
}

/// Judges one gap series against a tolerance. A series whose window never
/// intersected the grid proves nothing either way, hence `Inconclusive`.
fn judge(name: &'static str, series: &GapSeries, from_step: Option<usize>, tol: f64) -> Verdict {
    if series.inconclusive() {
        return Verdict {
            name,
            status: Status::Inconclusive,
            detail: "window never intersected the grid".into(),
        };
    }
    match measured(series, from_step) {
        None => Verdict {
            name,
            status: Status::Inconclusive,
            detail: format!("no usable window from step {}", from_step.unwrap_or(0)),
        },
        Some(m) => Verdict {
            name,
            status: if m <= tol { Status::Pass } else { Status::DiagnosticFailure },
            detail: format!("measured {m:.3e} against tolerance {tol:.1e}"),
        },
    }
}

/// `n,gap,clipped` rows; an empty gap cell means the window missed the grid.
fn gap_csv(series: &GapSeries) -> String {
    let mut out = String::from("n,gap,clipped\n");
    for ((step, gap), clipped) in series.steps.iter().zip(&series.gaps).zip(&series.clipped) {
        match gap {
            Some(g) => {
                let _ = writeln!(out, "{step},{g:.16e},{clipped}");
            }
            None => {
                let _ = writeln!(out, "{step},,{clipped}");
            }
        }
    }
    out
}

/// Gap series as plot points; missed windows become gaps in the line.
fn gap_points(series: &GapSeries) -> Vec<(f64, f64)> {
    series
        .steps
        .iter()
        .zip(&series.gaps)
        .map(|(s, g)| (*s as f64, g.unwrap_or(f64::NAN)))
        .collect()
}

fn field_csv(field: &Field) -> Result<String> {
    let mut buf = Vec::new();
    field.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("field csv output is ascii"))
}

fn field_points(field: &Field) -> Vec<(f64, f64)> {
    field.grid().points().zip(field.values().iter().copied()).collect()
}

fn open(path: &Path, section: &'static str) -> Result<BufReader<fs::File>> {
    let file = fs::File::open(path)
        .map_err(|e| Error::invalid(section, format!("cannot read {}: {e}", path.display())))?;
    Ok(BufReader::new(file))
}

fn kv(key: &str, value: impl std::fmt::Display) {
    println!("{key:<20} {value}");
}

fn classification_label(c: Classification) -> &'static str {
    match c {
        Classification::Zero => "zero",
        Classification::Pulse => "pulse",
        Classification::Front => "front",
        Classification::Uniform => "uniform",
    }
}

fn fixed_point_json(r: &FixedPointResult) -> serde_json::Value {
    json!({
        "residual": r.residual,
        "iterations": r.iterations,
        "classification": classification_label(r.classification),
        "max": r.field.max_value(),
        "tail_minus": r.tail_minus,
        "tail_plus": r.tail_plus,
    })
}

/// Computes both spreading speeds of the linearized dynamics, traces the
/// speed objective, and (optionally) certifies left-tail decay.
pub fn run_speed(cfg: &RunConfig, out: &Path, force_svg: bool) -> Result<Status> {
    let spec = cfg.speed.clone().unwrap_or_default();
    let kernel = cfg.kernel()?;
    let coef = match spec.coef {
        Some(c) => c,
        None => cfg.habitat()?.coefficient_limit(Side::Plus),
    };
    let minus = speeds::spreading_speed(coef, &kernel, Side::Minus)?;
    let plus = speeds::spreading_speed(coef, &kernel, Side::Plus)?;
    let decay: Option<DecayReport> = match spec.epsilon {
        Some(eps) => Some(speeds::decay_rate(coef, &kernel, eps)?),
        None => None,
    };

    let mut manifest = Manifest::begin("speed", out)?;

    // Geometric sweep of the objective around the two minimizers; arguments
    // where the moment generating function diverges leave empty cells.
    let lo = (minus.mu_star.min(plus.mu_star) / CURVE_SPREAD).max(1e-3);
    let hi = (minus.mu_star.max(plus.mu_star) * CURVE_SPREAD).min(speeds::MU_MAX);
    let points = spec.curve_points.max(2);
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let mut curve = String::from("mu,c_minus,c_plus\n");
    let mut pts_minus = Vec::with_capacity(points);
    let mut pts_plus = Vec::with_capacity(points);
    for i in 0..points {
        let mu = lo * ratio.powi(i as i32);
        let cm = speeds::objective(coef, &kernel, Side::Minus, mu).ok();
        let cp = speeds::objective(coef, &kernel, Side::Plus, mu).ok();
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let _ = writeln!(curve, "{mu:.16e},{},{}", cell(cm), cell(cp));
        pts_minus.push((mu, cm.unwrap_or(f64::NAN)));
        pts_plus.push((mu, cp.unwrap_or(f64::NAN)));
    }
    manifest.write_text("objective_curve.csv", "speed-objective", &curve)?;

    if force_svg {
        let chart = svg::line_chart(
            "speed objective",
            "mu",
            "c(mu)",
            false,
            &[
                Series { label: "leftward".into(), points: pts_minus },
                Series { label: "rightward".into(), points: pts_plus },
            ],
        );
        manifest.write_text("objective.svg", "plot", &chart)?;
    }

    kv("coefficient", coef);
    kv("c_star_minus", minus.c_star);
    kv("mu_star_minus", minus.mu_star);
    kv("c_star_plus", plus.c_star);
    kv("mu_star_plus", plus.mu_star);
    if let Some(d) = &decay {
        kv("decay_epsilon", d.epsilon);
        kv("decay_mu", d.mu_epsilon);
        kv("decay_lambda", d.lambda);
        kv("decay_bound", d.bound);
    }

    let summary = json!({ "coef": coef, "minus": minus, "plus": plus, "decay": decay });
    manifest.finish(cfg.echo(), Status::Pass, summary)
}

/// Iterates the evolution operator, archives the trajectory, and evaluates
/// the configured diagnostics.
pub fn run_simulate(cfg: &RunConfig, out: &Path, force_svg: bool) -> Result<Status> {
    let grid = cfg.grid()?;
    let kernel = cfg.kernel()?;
    let habitat = cfg.habitat()?;
    let u0 = cfg.initial(grid)?;
    let run = cfg.run()?.clone();
    let want_svg = run.svg || force_svg;

    let op = EvolutionOp::new(habitat.clone(), kernel.clone(), grid)?;
    let traj = op.iterate(&u0, run.steps, run.snapshot_every)?;

    let mut manifest = Manifest::begin("simulate", out)?;
    let mut index = String::from("step,file,sup_delta\n");
    for (step, field) in traj.snapshots() {
        let name = format!("snapshots/state_{step:06}.csv");
        manifest.write_text(&name, "snapshot", &field_csv(field)?)?;
        match step {
            0 => {
                let _ = writeln!(index, "0,{name},");
            }
            s => {
                let _ = writeln!(index, "{s},{name},{:.16e}", traj.deltas()[s - 1]);
            }
        }
    }
    manifest.write_text("snapshots.csv", "snapshot-index", &index)?;

    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut summary = serde_json::Map::new();
    summary.insert("steps".into(), json!(run.steps));
    summary.insert("final_sup".into(), json!(traj.last().max_value()));
    let mut front_series: Vec<Series> = Vec::new();
    let mut gap_series: Vec<Series> = Vec::new();

    if let Some(diag) = &cfg.diagnostics {
        if let Some(level) = diag.level {
            let trace = diagnostics::track_front(&traj, level)?;
            let mut csv = String::from("n,x_minus,x_plus,max\n");
            let cell = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
            for i in 0..trace.steps.len() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{:.16e}",
                    trace.steps[i],
                    cell(trace.x_minus[i]),
                    cell(trace.x_plus[i]),
                    trace.max[i],
                );
            }
            manifest.write_text("front_trace.csv", "front-trace", &csv)?;

            let fit = |side: Side| match diagnostics::estimate_speed(&trace, side, diag.burn_in) {
                Ok(f) => json!(f),
                Err(e) => json!({ "unavailable": e.to_string() }),
            };
            summary.insert("front_fit_minus".into(), fit(Side::Minus));
            summary.insert("front_fit_plus".into(), fit(Side::Plus));

            let trace_points = |xs: &[Option<f64>]| {
                trace
                    .steps
                    .iter()
                    .zip(xs)
                    .map(|(s, x)| (*s as f64, x.unwrap_or(f64::NAN)))
                    .collect()
            };
            front_series.push(Series { label: "x_minus".into(), points: trace_points(&trace.x_minus) });
            front_series.push(Series { label: "x_plus".into(), points: trace_points(&trace.x_plus) });
        }

        let needs_speeds =
            diag.convergence.is_some() || diag.annihilation.is_some() || diag.reference_gap.is_some();
        if needs_speeds {
            // Window geometry comes from the habitat's rightward limit: its
            // coefficient drives the linearization whose speeds bound the
            // expanding region where the state settles.
            let coef = habitat.coefficient_limit(Side::Plus);
            let c_plus = speeds::spreading_speed(coef, &kernel, Side::Plus)?.c_star;
            let c_minus = speeds::spreading_speed(coef, &kernel, Side::Minus)?.c_star;
            summary.insert("c_star_plus".into(), json!(c_plus));
            summary.insert("c_star_minus".into(), json!(c_minus));

            if let Some(conv) = &diag.convergence {
                let u_star = match conv.u_star {
                    Some(u) => u,
                    None => habitat.limit_fixed_point(Side::Plus)?,
                };
                summary.insert("u_star".into(), json!(u_star));
                let report = diagnostics::upward_convergence(&traj, u_star, diag.eps, c_plus, c_minus)?;
                manifest.write_text("convergence_window.csv", "gap-series", &gap_csv(&report.window))?;
                manifest.write_text("convergence_left.csv", "gap-series", &gap_csv(&report.left_sup))?;
                verdicts.push(judge("convergence-window", &report.window, conv.from_step, conv.gap_tol));
                // The leftward ray must empty out when the leftward speed is
                // negative (the dominating homogeneous process retreats) or
                // when the left medium is subcritical; a habitat that truly
                // spreads left keeps the ray populated, so it is not judged.
                if c_minus < 0.0 || habitat.coefficient_limit(Side::Minus) < 1.0 {
                    verdicts.push(judge("convergence-left", &report.left_sup, conv.from_step, conv.left_tol));
                }
                gap_series.push(Series { label: "window".into(), points: gap_points(&report.window) });
                gap_series.push(Series { label: "left ray".into(), points: gap_points(&report.left_sup) });
            }

            if let Some(ann) = &diag.annihilation {
                let report = diagnostics::annihilation(&traj, diag.eps, c_plus)?;
                summary.insert("support_edge".into(), json!(report.support_edge));
                manifest.write_text("annihilation_beyond.csv", "gap-series", &gap_csv(&report.beyond))?;
                verdicts.push(judge("annihilation-beyond", &report.beyond, ann.from_step, ann.tol));
                gap_series.push(Series { label: "beyond front".into(), points: gap_points(&report.beyond) });
                if let Some(ray) = &report.fixed_ray {
                    manifest.write_text("annihilation_fixed_ray.csv", "gap-series", &gap_csv(ray))?;
                    verdicts.push(judge("annihilation-fixed-ray", ray, ann.from_step, ann.tol));
                    gap_series.push(Series { label: "fixed ray".into(), points: gap_points(ray) });
                }
            }

            if let Some(rg) = &diag.reference_gap {
                let w = Field::read_csv(grid, open(&rg.path, "reference_gap")?)?;
                let series = diagnostics::reference_gap(&traj, &w, diag.eps, c_plus)?;
                manifest.write_text("reference_gap.csv", "gap-series", &gap_csv(&series))?;
                verdicts.push(judge("reference-gap", &series, rg.from_step, rg.tol));
                gap_series.push(Series { label: "reference gap".into(), points: gap_points(&series) });
            }
        }
    }

    if want_svg {
        if !front_series.is_empty() {
            let chart = svg::line_chart("front positions", "step", "x", false, &front_series);
            manifest.write_text("front.svg", "plot", &chart)?;
        }
        if !gap_series.is_empty() {
            let chart = svg::line_chart("diagnostic gaps", "step", "sup gap", true, &gap_series);
            manifest.write_text("gaps.svg", "plot", &chart)?;
        }
    }

    for v in &verdicts {
        println!("{:<12} {:<24} {}", word(v.status), v.name, v.detail);
    }
    let status = Status::worst(verdicts.iter().map(|v| v.status));
    summary.insert(
        "diagnostics".into(),
        json!(verdicts.iter().map(Verdict::to_json).collect::<Vec<_>>()),
    );
    manifest.finish(cfg.echo(), status, serde_json::Value::Object(summary))
}

/// Computes a stationary state by monotone descent, or — with `refute` — a
/// certificate that no nontrivial stationary state exists.
pub fn run_fixed_point(cfg: &RunConfig, out: &Path, force_svg: bool, refute: bool) -> Result<Status> {
    let grid = cfg.grid()?;
    let kernel = cfg.kernel()?;
    let habitat = cfg.habitat()?;
    let op = EvolutionOp::new(habitat.clone(), kernel, grid)?;

    if refute {
        let spec = cfg.certificate.clone().unwrap_or_default();
        let cert = nonexistence_certificate(&op, spec.gamma, spec.epsilon, spec.max_collapse_iters)?;
        let mut manifest = Manifest::begin("fixed-point", out)?;
        let text = serde_json::to_string_pretty(&cert)
            .expect("certificate serialization cannot fail");
        manifest.write_text("certificate.json", "certificate", &text)?;
        for reason in &cert.reasons {
            println!("- {reason}");
        }
        let status = if cert.granted { Status::Pass } else { Status::DiagnosticFailure };
        println!("{} nonexistence certificate", word(status));
        let summary = json!({
            "granted": cert.granted,
            "c_star_minus": cert.c_star_minus,
            "envelope_rate_plus": cert.envelope_rate_plus,
            "collapse_iterations": cert.collapse_iterations,
            "collapse_sup": cert.collapse_sup,
        });
        return manifest.finish(cfg.echo(), status, summary);
    }

    let spec = cfg.fixed_point.clone().unwrap_or_default();
    let cap = match spec.cap {
        Some(c) => c,
        None => *habitat.caps().get(spec.cap_index).ok_or_else(|| {
            Error::invalid(
                "fixed_point",
                format!(
                    "cap_index {} is outside the habitat's ladder of {} caps",
                    spec.cap_index,
                    habitat.caps().len()
                ),
            )
        })?,
    };
    let solved = match &spec.lower {
        Some(path) => {
            let lower = Field::read_csv(grid, open(path, "fixed_point")?)?;
            solve_in_interval(&op, &lower, cap, spec.tol, spec.max_iters)
        }
        None => solve_from_cap(&op, cap, spec.tol, spec.max_iters),
    };

    let mut manifest = Manifest::begin("fixed-point", out)?;
    match solved {
        Ok(result) => {
            manifest.write_text("w.csv", "stationary-state", &field_csv(&result.field)?)?;
            if force_svg {
                let chart = svg::line_chart(
                    "stationary state",
                    "x",
                    "w(x)",
                    false,
                    &[Series { label: "w".into(), points: field_points(&result.field) }],
                );
                manifest.write_text("w.svg", "plot", &chart)?;
            }
            kv("classification", classification_label(result.classification));
            kv("residual", format!("{:.6e}", result.residual));
            kv("iterations", result.iterations);
            kv("tail_minus", format!("{:.6e}", result.tail_minus));
            kv("tail_plus", format!("{:.6e}", result.tail_plus));
            let mut summary = fixed_point_json(&result);
            summary["cap"] = json!(cap);
            manifest.finish(cfg.echo(), Status::Pass, summary)
        }
        Err(Error::NoConvergence { iterations, last_delta }) => {
            println!(
                "{} stationary state: no convergence after {iterations} iterations \
                 (last delta {last_delta:.3e})",
                word(Status::DiagnosticFailure)
            );
            let summary = json!({
                "cap": cap,
                "iterations": iterations,
                "last_delta": last_delta,
            });
            manifest.finish(cfg.echo(), Status::DiagnosticFailure, summary)
        }
        Err(e) => Err(e),
    }
}

/// Runs the built-in heterogeneous-habitat counterexample: retreating
/// leftward speed, yet a nontrivial stationary state pinned by the patch.
pub fn run_counterexample(cfg: Option<&RunConfig>, out: &Path, force_svg: bool) -> Result<Status> {
    let grid = match cfg.and_then(|c| c.grid.as_ref()) {
        Some(spec) => spec.build()?,
        None => {
            let (lo, hi, n) = DEFAULT_CE_GRID;
            SpatialGrid::new(lo, hi, n)?
        }
    };
    let spec = cfg.and_then(|c| c.counterexample.clone()).unwrap_or_default();
    let report = counterexample_suite(grid, spec.tol)?;

    let mut manifest = Manifest::begin("counterexample", out)?;
    manifest.write_text("pulse.csv", "stationary-state", &field_csv(&report.pulse.field)?)?;
    manifest.write_text("forced.csv", "stationary-state", &field_csv(&report.forced.field)?)?;
    if force_svg {
        let chart = svg::line_chart(
            "stationary states",
            "x",
            "u(x)",
            false,
            &[
                Series { label: "patch pulse".into(), points: field_points(&report.pulse.field) },
                Series { label: "with ramp".into(), points: field_points(&report.forced.field) },
            ],
        );
        manifest.write_text("states.svg", "plot", &chart)?;
    }

    kv("c_star_minus", report.c_star_minus);
    kv("c_star_plus", report.c_star_plus);
    kv("beta0", report.calibration.beta0);
    kv("rho_at_beta0", report.calibration.rho_at_beta0);
    kv("pulse_max", report.pulse.field.max_value());
    kv("pulse_residual", format!("{:.6e}", report.pulse.residual));
    kv("forced_max", report.forced.field.max_value());
    kv("forced_residual", format!("{:.6e}", report.forced.residual));
    kv("domination_defect", format!("{:.3e}", report.domination_defect));
    kv("refusal", &report.refusal);

    let checks = [
        ("leftward speed negative", report.c_star_minus < 0.0),
        ("patch supercritical", report.calibration.rho_at_beta0 > 1.0),
        ("pulse nontrivial", report.pulse.classification != Classification::Zero),
        ("ramped state dominates pulse", report.domination_defect <= 1e-8),
    ];
    let mut status = Status::Pass;
    for (name, ok) in checks {
        let s = if ok { Status::Pass } else { Status::DiagnosticFailure };
        println!("{:<12} {name}", word(s));
        status = status.max(s);
    }

    let summary = json!({
        "c_star_minus": report.c_star_minus,
        "c_star_plus": report.c_star_plus,
        "calibration": report.calibration,
        "pulse": fixed_point_json(&report.pulse),
        "forced": fixed_point_json(&report.forced),
        "domination_defect": report.domination_defect,
        "refusal": report.refusal,
    });
    let echo = json!({
        "grid": { "x_min": grid.x_min(), "x_max": grid.x_max(), "points": grid.len() },
        "counterexample": { "tol": spec.tol },
    });
    manifest.finish(echo, status, summary)
}

/// Runs the library's internal cross-validation checks.
pub fn run_check(out: &Path) -> Result<Status> {
    let mut manifest = Manifest::begin("check", out)?;
    let report = habwave_core::run_checks();
    for o in &report.outcomes {
        let s = if o.passed { Status::Pass } else { Status::DiagnosticFailure };
        println!("{:<12} {:<28} {}", word(s), o.name, o.detail);
    }
    let text = serde_json::to_string_pretty(&report).expect("check report serialization cannot fail");
    manifest.write_text("checks.json", "check-report", &text)?;
    let passed = report.outcomes.iter().filter(|o| o.passed).count();
    let status = if report.all_passed { Status::Pass } else { Status::DiagnosticFailure };
    println!("{} {passed}/{} checks", word(status), report.outcomes.len());
    let summary = json!({ "passed": passed, "total": report.outcomes.len() });
    manifest.finish(serde_json::Value::Null, status, summary)
}

fn run_entry(entry: &SweepEntry, dir: &Path, force_svg: bool) -> Result<Status> {
    match entry.command {
        SweepCommand::Speed => run_speed(&entry.config, dir, force_svg),
        SweepCommand::Simulate => run_simulate(&entry.config, dir, force_svg),
        SweepCommand::FixedPoint => run_fixed_point(&entry.config, dir, force_svg, false),
        SweepCommand::Counterexample => run_counterexample(Some(&entry.config), dir, force_svg),
    }
}

/// Executes every run of a sweep file in parallel, each in its own
/// subdirectory; the sweep's status is the worst child status.
pub fn run_sweep(path: &Path, out: &Path, jobs: Option<usize>, force_svg: bool) -> Result<Status> {
    let sweep = SweepConfig::load(path)?;
    let threads = jobs.or(sweep.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot build thread pool: {e}")))?;

    let manifest = Manifest::begin("sweep", out)?;
    let results: Vec<(String, Status, Option<String>)> = pool.install(|| {
        sweep
            .runs
            .par_iter()
            .map(|entry| {
                let dir = out.join(&entry.name);
                match run_entry(entry, &dir, force_svg) {
                    Ok(status) => (entry.name.clone(), status, None),
                    Err(e) => (entry.name.clone(), Status::Error, Some(e.to_string())),
                }
            })
            .collect()
    });

    let mut rows = Vec::new();
    for (name, status, error) in &results {
        match error {
            None => println!("{:<12} {name}", word(*status)),
            Some(msg) => {
                eprintln!("{:<12} {name}: {msg}", word(*status));
            }
        }
        rows.push(json!({ "name": name, "status": status.label(), "error": error }));
    }
    let status = Status::worst(results.iter().map(|(_, s, _)| *s));
    let echo = serde_json::to_value(&sweep).unwrap_or(serde_json::Value::Null);
    manifest.finish(echo, status, json!({ "runs": rows }))
}

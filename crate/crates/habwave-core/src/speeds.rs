//! Spreading speeds of linearized growth–dispersal dynamics.
//!
//! For the linear operator `v ↦ coef · (k * v)`, exponential profiles
//! `e^{-μ x}` are eigenfunctions: one step multiplies them by
//! `coef · M(±μ)` (with `M` the kernel's moment generating function) and
//! translates them. The rightward and leftward spreading speeds are
//!
//! ```text
//! c_± = inf_{μ > 0} (1/μ) · ln[ coef · M(±μ) ],
//! ```
//!
//! the slowest decaying-profile speeds in each direction. A *negative*
//! leftward speed means the leftward front retreats: the level sets of the
//! solution move right even on the left flank.
//!
//! Because `ln M` is convex, the objective is unimodal and the quantity
//! `μ Λ'(μ) - Λ(μ)` (with `Λ(μ) = ln coef + ln M(±μ)`) is nondecreasing in
//! `μ`, so a golden-section descent followed by a derivative-sign bisection
//! localizes the minimizer to near machine precision.

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::Side;
use serde::Serialize;

/// Smallest decay rate considered; below this the objective is dominated by
/// `ln(coef)/μ` and the infimum is reported as a boundary hit.
pub const MU_MIN: f64 = 1e-4;

/// Largest decay rate considered (steeper profiles than `e^{-50 x}` are
/// indistinguishable from step data at realistic grid resolutions).
pub const MU_MAX: f64 = 50.0;

/// Which end of the `μ` search interval the minimizer landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Infimum attained as `μ -> 0`: the speed value is a boundary proxy.
    Lower,
    /// Infimum attained at the steep end of the search interval.
    Upper,
}

/// Result of a spreading-speed computation.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedReport {
    /// Direction the speed refers to.
    pub side: Side,
    /// Linear growth coefficient used.
    pub coef: f64,
    /// The spreading speed (positive: advance; negative: retreat).
    pub c_star: f64,
    /// Decay rate of the critical exponential profile.
    pub mu_star: f64,
    /// Set when the minimizer hit an end of the search interval; the reported
    /// speed is then the boundary value, not an interior minimum.
    pub boundary: Option<Boundary>,
    /// Number of objective evaluations spent.
    pub evaluations: usize,
}

/// Exponential decay certificate for the left tail when `c_- < 0`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    /// Leftward spreading speed (negative).
    pub c_star_minus: f64,
    /// Margin inside `(0, -c_-)` chosen by the caller.
    pub epsilon: f64,
    /// Decay rate whose profile contracts under the linear step.
    pub mu_epsilon: f64,
    /// One-step multiplier `coef · M(-μ_ε)` of the profile `e^{μ_ε x}`.
    pub lambda: f64,
    /// The certified strict bound `e^{(c_- + ε) μ_ε}`; `lambda < bound < 1`.
    pub bound: f64,
}

/// Speed objective `(ln coef + ln M(side · μ)) / μ` for `μ > 0`.
pub fn objective(coef: f64, kernel: &Kernel, side: Side, mu: f64) -> Result<f64> {
    if !(coef.is_finite() && coef > 0.0) {
        return Err(Error::invalid("coef", format!("must be positive, got {coef}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::invalid("mu", format!("must be positive, got {mu}")));
    }
    Ok((coef.ln() + kernel.log_mgf(side.sign() * mu)?) / mu)
}

/// Upper end of the feasible `μ` interval for this kernel.
fn mu_upper(kernel: &Kernel) -> f64 {
    match kernel {
        // The MGF blows up at |t| = rate; stay strictly inside.
        Kernel::Laplace { rate, .. } => MU_MAX.min(rate * (1.0 - 1e-9)),
        _ => MU_MAX,
    }
}

/// `μ Λ'(μ) - Λ(μ)` — proportional to the objective's derivative and
/// nondecreasing in `μ` by convexity of `ln M`, so its sign brackets the
/// interior minimizer exactly.
fn stationarity(coef: f64, kernel: &Kernel, side: Side, mu: f64) -> Result<f64> {
    let t = side.sign() * mu;
    Ok(t * kernel.log_mgf_derivative(t)? - kernel.log_mgf(t)? - coef.ln())
}

/// Computes the spreading speed toward `side` for the linear operator with
/// constant coefficient `coef` and the given kernel.
pub fn spreading_speed(coef: f64, kernel: &Kernel, side: Side) -> Result<SpeedReport> {
    let lo = MU_MIN;
    let hi = mu_upper(kernel);
    if hi <= lo {
        return Err(Error::Precondition(format!(
            "feasible decay-rate interval is empty (upper end {hi})"
        )));
    }
    let mut evaluations = 0;
    let mut obj = |mu: f64| -> Result<f64> {
        evaluations += 1;
        objective(coef, kernel, side, mu)
    };

    // Golden-section descent on the unimodal objective.
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = obj(c)?;
    let mut fd = obj(d)?;
    while b - a > 1e-10 * b.max(1.0) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = obj(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = obj(d)?;
        }
    }
    let mut mu = 0.5 * (a + b);

    let tick = 1e-6 * (hi - lo).max(1.0);
    let boundary = if mu - lo <= tick {
        Some(Boundary::Lower)
    } else if hi - mu <= tick {
        Some(Boundary::Upper)
    } else {
        None
    };

    if boundary.is_none() {
        // Polish with a bisection on the (monotone) stationarity function.
        let mut pa = (mu - 1e-3 * mu.max(1.0)).max(lo);
        let mut pb = (mu + 1e-3 * mu.max(1.0)).min(hi);
        let sa = stationarity(coef, kernel, side, pa)?;
        let sb = stationarity(coef, kernel, side, pb)?;
        if sa < 0.0 && sb > 0.0 {
            for _ in 0..100 {
                let mid = 0.5 * (pa + pb);
                if stationarity(coef, kernel, side, mid)? < 0.0 {
                    pa = mid;
                } else {
                    pb = mid;
                }
                if pb - pa <= f64::EPSILON * pb.max(1.0) {
                    break;
                }
            }
            mu = 0.5 * (pa + pb);
        }
    }

    let c_star = obj(mu)?;
    Ok(SpeedReport { side, coef, c_star, mu_star: mu, boundary, evaluations })
}

/// Certifies the exponential decay of the left tail when `c_- < 0`.
///
/// Returns the decay rate `μ_ε` of the critical profile together with its
/// one-step multiplier `λ = coef · M(-μ_ε)` and the strict bound
/// `λ < e^{(c_- + ε) μ_ε} < 1`, valid for any margin `0 < ε < -c_-`.
pub fn decay_rate(coef: f64, kernel: &Kernel, epsilon: f64) -> Result<DecayReport> {
    let report = spreading_speed(coef, kernel, Side::Minus)?;
    if report.c_star >= 0.0 {
        return Err(Error::Precondition(format!(
            "leftward speed {:.6} is not negative; there is nothing to certify",
            report.c_star
        )));
    }
    if !(epsilon > 0.0 && report.c_star + epsilon < 0.0) {
        return Err(Error::invalid(
            "epsilon",
            format!("must lie in (0, {:.6}), got {epsilon}", -report.c_star),
        ));
    }
    let mu_epsilon = report.mu_star;
    // objective(μ*) = c_- < c_- + ε, i.e. λ = e^{c_- μ*} < e^{(c_- + ε) μ*}.
    let lambda = (coef.ln() + kernel.log_mgf(-mu_epsilon)?).exp();
    let bound = ((report.c_star + epsilon) * mu_epsilon).exp();
    debug_assert!(lambda < bound && bound < 1.0);
    Ok(DecayReport {
        c_star_minus: report.c_star,
        epsilon,
        mu_epsilon,
        lambda,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Samples;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{E, SQRT_2};

    fn drifting() -> Kernel {
        Kernel::gaussian(2.0, 0.5).unwrap()
    }

    #[test]
    fn drifting_kernel_retreats_left_and_races_right() {
        // Objective (1/μ - 2 + μ/4) has minimum -1 at μ = 2; with the +2μ
        // drift term the rightward value is 3 at the same rate.
        let minus = spreading_speed(E, &drifting(), Side::Minus).unwrap();
        assert_abs_diff_eq!(minus.c_star, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(minus.mu_star, 2.0, epsilon = 1e-6);
        assert!(minus.boundary.is_none());

        let plus = spreading_speed(E, &drifting(), Side::Plus).unwrap();
        assert_abs_diff_eq!(plus.c_star, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(plus.mu_star, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn symmetric_kernel_spreads_at_the_classic_rate() {
        // Objective (1/μ + μ/2) has minimum √2 at μ = √2.
        let k = Kernel::gaussian(0.0, 1.0).unwrap();
        for side in [Side::Minus, Side::Plus] {
            let r = spreading_speed(E, &k, side).unwrap();
            assert_abs_diff_eq!(r.c_star, SQRT_2, epsilon = 1e-10);
            assert_abs_diff_eq!(r.mu_star, SQRT_2, epsilon = 1e-7);
        }
    }

    #[test]
    fn laplace_kernel_matches_the_frozen_minimum() {
        let k = Kernel::laplace(2.0, 0.0).unwrap();
        let r = spreading_speed(E, &k, Side::Plus).unwrap();
        assert_abs_diff_eq!(r.c_star, 1.190826461859915, epsilon = 1e-10);
        assert_abs_diff_eq!(r.mu_star, 1.3293909118916764, epsilon = 1e-7);
        // Symmetric kernel: both directions agree.
        let l = spreading_speed(E, &k, Side::Minus).unwrap();
        assert_abs_diff_eq!(l.c_star, r.c_star, epsilon = 1e-12);
    }

    #[test]
    fn headroom_coefficient_still_leaves_a_negative_leftward_speed() {
        let coef = 0.1 + E;
        let minus = spreading_speed(coef, &drifting(), Side::Minus).unwrap();
        assert_abs_diff_eq!(minus.c_star, -0.9820965573420855, epsilon = 1e-9);
        assert_abs_diff_eq!(minus.mu_star, 2.035806885315829, epsilon = 1e-6);
        let plus = spreading_speed(coef, &drifting(), Side::Plus).unwrap();
        assert_abs_diff_eq!(plus.c_star, 3.0179034426579146, epsilon = 1e-9);
    }

    #[test]
    fn neutral_coefficient_pins_the_minimizer_to_the_lower_boundary() {
        let k = Kernel::gaussian(0.0, 1.0).unwrap();
        let r = spreading_speed(1.0, &k, Side::Plus).unwrap();
        assert_eq!(r.boundary, Some(Boundary::Lower));
        assert!(r.c_star.abs() < 1e-3, "boundary proxy speed {}", r.c_star);
    }

    #[test]
    fn quadrature_path_agrees_with_the_closed_form() {
        let exact = Kernel::gaussian(0.0, 1.0).unwrap();
        let pairs: Vec<(f64, f64)> = (-1200..=1200)
            .map(|i| {
                let x = i as f64 * 0.01;
                (x, exact.density(x))
            })
            .collect();
        let tab = Kernel::tabulated(Samples::from_pairs(pairs).unwrap()).unwrap();
        for side in [Side::Minus, Side::Plus] {
            let a = spreading_speed(E, &exact, side).unwrap();
            let b = spreading_speed(E, &tab, side).unwrap();
            assert_abs_diff_eq!(a.c_star, b.c_star, epsilon = 1e-6);
            assert_abs_diff_eq!(a.mu_star, b.mu_star, epsilon = 1e-4);
        }
    }

    #[test]
    fn objective_is_locally_minimal_at_the_reported_rate() {
        for (coef, k) in [
            (E, drifting()),
            (0.1 + E, drifting()),
            (2.0, Kernel::laplace(1.5, 0.3).unwrap()),
        ] {
            for side in [Side::Minus, Side::Plus] {
                let r = spreading_speed(coef, &k, side).unwrap();
                if r.boundary.is_none() {
                    for factor in [0.999, 1.001] {
                        let nearby = objective(coef, &k, side, r.mu_star * factor).unwrap();
                        assert!(nearby >= r.c_star - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn decay_certificate_contracts_strictly() {
        let d = decay_rate(0.1 + E, &drifting(), 0.4).unwrap();
        assert_abs_diff_eq!(d.lambda, 0.13542206997046358, epsilon = 1e-9);
        assert_abs_diff_eq!(d.bound, 0.3057351179990428, epsilon = 1e-9);
        assert!(d.lambda < d.bound && d.bound < 1.0);
        assert_relative_eq!(d.mu_epsilon, 2.035806885315829, max_relative = 1e-6);
    }

    #[test]
    fn decay_certificate_requires_a_retreating_front_and_a_valid_margin() {
        // Rightward-biased but still advancing: c_- > 0 for the symmetric kernel.
        let k = Kernel::gaussian(0.0, 1.0).unwrap();
        assert!(decay_rate(E, &k, 0.1).is_err());
        // Margin outside (0, -c_-) is rejected.
        assert!(decay_rate(E, &drifting(), 1.5).is_err());
        assert!(decay_rate(E, &drifting(), 0.0).is_err());
        assert!(decay_rate(E, &drifting(), 0.5).is_ok());
    }

    #[test]
    fn divergent_rates_are_capped_for_heavy_tailed_kernels() {
        let k = Kernel::laplace(0.8, 0.0).unwrap();
        let r = spreading_speed(5.0, &k, Side::Plus).unwrap();
        assert!(r.mu_star < 0.8);
        assert!(r.c_star.is_finite());
    }

    #[test]
    fn objective_validates_its_arguments() {
        assert!(objective(0.0, &drifting(), Side::Plus, 1.0).is_err());
        assert!(objective(-1.0, &drifting(), Side::Plus, 1.0).is_err());
        assert!(objective(1.0, &drifting(), Side::Plus, 0.0).is_err());
        assert!(objective(1.0, &drifting(), Side::Plus, f64::NAN).is_err());
    }
}

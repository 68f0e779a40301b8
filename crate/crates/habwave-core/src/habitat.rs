//! Heterogeneous growth maps ("habitats") and their linear envelopes.
//!
//! A habitat couples a spatial coefficient profile `c(x)` with a scalar
//! nonlinearity `n(c, u)`, giving the growth map `f(x, u) = n(c(x), u)`.
//! Every built-in nonlinearity is normalized so that `∂f/∂u(x, 0) = c(x)`:
//! the profile *is* the local linear growth rate. Profiles converge to
//! constants in both directions, so the map has limiting homogeneous maps
//! `f_±(u)` with linear rates `d_± = c(±∞)`; the interesting regime is a
//! hostile left limit (`d_- < 1`) against a fertile right limit (`d_+ > 1`).
//!
//! Habitats carry a ladder of invariant caps (constants `κ` with
//! `f(x, [0, κ]) ⊆ [0, κ]`) used to start monotone iterations from above,
//! and flags recording which structural assumptions the family satisfies.
//! [`Habitat::validate_hypotheses`] audits those assumptions numerically and
//! reports a witness for each failure instead of silently proceeding.

use crate::error::{Error, Result};
use crate::grid::Samples;
use crate::Side;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

/// Default half-width of the numerical audit window. Beyond `|x| = 20` every
/// built-in profile is within `1e-14` of its limit, so a wider window only
/// costs time.
pub const DEFAULT_AUDIT_HALF_WIDTH: f64 = 20.0;

/// Spatial coefficient profiles `c(x)`, all with constant limits at ±∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Profile {
    /// The same rate everywhere (a homogeneous habitat).
    Constant {
        /// Rate value.
        value: f64,
    },
    /// Logistic ramp from `lo` (left infinity) to `hi` (right infinity),
    /// crossing the midpoint at `x = 0`.
    Sigmoid {
        /// Limit as `x -> -∞`.
        lo: f64,
        /// Limit as `x -> +∞`.
        hi: f64,
        /// Slope scale of the transition; larger is sharper.
        steepness: f64,
    },
    /// `beta · exp(-x²)`: an isolated patch that decays in both directions.
    GaussianPatch {
        /// Peak rate at the patch center.
        beta: f64,
    },
    /// `max(beta · exp(-x²), e - e^{-x})`: the same patch grafted onto a ramp
    /// that saturates at `e` on the right and plunges on the left, leaving
    /// limits `0` and `e`.
    PatchWithRamp {
        /// Peak rate of the patch component.
        beta: f64,
    },
    /// Profile interpolated from samples, constant beyond the sampled range.
    #[serde(skip)]
    Tabulated {
        /// Sampled rates.
        samples: Samples,
    },
}

impl Profile {
    fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, allow_zero: bool| -> Result<()> {
            if !v.is_finite() || v < 0.0 || (!allow_zero && v == 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be {} and finite, got {v}", if allow_zero { "nonnegative" } else { "positive" }),
                ));
            }
            Ok(())
        };
        match self {
            Profile::Constant { value } => check("value", *value, true),
            Profile::Sigmoid { lo, hi, steepness } => {
                check("lo", *lo, true)?;
                check("hi", *hi, false)?;
                check("steepness", *steepness, false)
            }
            Profile::GaussianPatch { beta } | Profile::PatchWithRamp { beta } => {
                check("beta", *beta, false)
            }
            Profile::Tabulated { samples } => {
                if samples.ys().iter().any(|&y| y < 0.0) {
                    return Err(Error::invalid("samples", "rates must be nonnegative"));
                }
                Ok(())
            }
        }
    }

    /// Rate at position `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Sigmoid { lo, hi, steepness } => {
                lo + (hi - lo) / (1.0 + (-steepness * x).exp())
            }
            Profile::GaussianPatch { beta } => beta * (-x * x).exp(),
            // For very negative x the ramp term overflows to -∞; max() then
            // correctly selects the (possibly underflowed-to-zero) patch.
            Profile::PatchWithRamp { beta } => (beta * (-x * x).exp()).max(E - (-x).exp()),
            Profile::Tabulated { samples } => samples.eval(x),
        }
    }

    /// Limit of the rate toward one infinity.
    pub fn limit(&self, side: Side) -> f64 {
        match (self, side) {
            (Profile::Constant { value }, _) => *value,
            (Profile::Sigmoid { lo, .. }, Side::Minus) => *lo,
            (Profile::Sigmoid { hi, .. }, Side::Plus) => *hi,
            (Profile::GaussianPatch { .. }, _) => 0.0,
            (Profile::PatchWithRamp { .. }, Side::Minus) => 0.0,
            (Profile::PatchWithRamp { .. }, Side::Plus) => E,
            (Profile::Tabulated { samples }, Side::Minus) => samples.ys()[0],
            (Profile::Tabulated { samples }, Side::Plus) => *samples.ys().last().unwrap(),
        }
    }

    /// Supremum of the rate over the whole line.
    pub fn sup(&self) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Sigmoid { lo, hi, .. } => lo.max(*hi),
            Profile::GaussianPatch { beta } => *beta,
            Profile::PatchWithRamp { beta } => beta.max(E),
            Profile::Tabulated { samples } => {
                samples.ys().iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }
}

/// Scalar growth nonlinearities `n(c, u)`, normalized to `∂n/∂u(c, 0) = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `n(c, u) = c u` — no saturation.
    Linear,
    /// `n(c, u) = c u / (1 + (c-1)⁺ u / K)` — saturating recruitment whose
    /// positive fixed point is exactly `K` wherever `c > 1`.
    BevertonHolt {
        /// Carrying capacity `K`.
        carrying: f64,
    },
    /// `n(c, u) = c r(u)` with `r` the nondecreasing hull of `u e^{-u}`:
    /// `r(u) = u e^{-u}` for `u <= 1` and `r(u) = 1/e` beyond. Keeps the
    /// low-density behaviour of the overcompensating map while staying
    /// order-preserving.
    RickerHull,
    /// `n(c, u) = c u e^{-u}` — the raw overcompensating map; **not**
    /// monotone in `u`, so order-based routines refuse it.
    Ricker,
}

impl Nonlinearity {
    fn validate(&self) -> Result<()> {
        if let Nonlinearity::BevertonHolt { carrying } = self {
            if !(carrying.is_finite() && *carrying > 0.0) {
                return Err(Error::invalid(
                    "carrying",
                    format!("must be positive, got {carrying}"),
                ));
            }
        }
        Ok(())
    }

    /// Evaluates `n(c, u)`.
    pub fn apply(&self, c: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Linear => c * u,
            Nonlinearity::BevertonHolt { carrying } => {
                c * u / (1.0 + (c - 1.0).max(0.0) / carrying * u)
            }
            Nonlinearity::RickerHull => {
                if u <= 1.0 {
                    c * u * (-u).exp()
                } else {
                    c * (-1.0f64).exp()
                }
            }
            Nonlinearity::Ricker => c * u * (-u).exp(),
        }
    }

    fn monotone_in_u(&self) -> bool {
        !matches!(self, Nonlinearity::Ricker)
    }

    /// Smallest natural invariant cap given the supremum of the coefficient
    /// profile.
    fn cap_base(&self, sup_coef: f64) -> f64 {
        match self {
            Nonlinearity::Linear => 1.0,
            Nonlinearity::BevertonHolt { carrying } => *carrying,
            // c r(u) <= c/e for every u, so any cap >= sup_c/e is invariant.
            Nonlinearity::RickerHull | Nonlinearity::Ricker => (sup_coef / E).max(1.0),
        }
    }
}

/// Structural properties of a habitat, recorded at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HabitatFlags {
    /// `u -> f(x, u)` is nondecreasing for every `x`.
    pub monotone_in_u: bool,
    /// `f(x, a u) >= a f(x, u)` for `a` in `[0, 1]`.
    pub subhomogeneous: bool,
    /// `f(x, u) <= d_+ u` everywhere — the whole habitat is controlled by the
    /// linearization of its *right* limit. Fails when an interior patch
    /// overshoots the limiting rate.
    pub linear_controlled: bool,
}

/// A heterogeneous growth map with its caps and structural flags.
#[derive(Debug, Clone)]
pub struct Habitat {
    profile: Profile,
    nonlinearity: Nonlinearity,
    caps: Vec<f64>,
    flags: HabitatFlags,
}

/// Number of dyadic caps generated above the base cap.
const CAP_LADDER_LEN: usize = 40;

impl Habitat {
    /// General constructor; the named builders below cover the common cases.
    pub fn from_parts(profile: Profile, nonlinearity: Nonlinearity) -> Result<Self> {
        profile.validate()?;
        nonlinearity.validate()?;
        let sup = profile.sup();
        let d_plus = profile.limit(Side::Plus);
        let flags = HabitatFlags {
            monotone_in_u: nonlinearity.monotone_in_u(),
            subhomogeneous: true,
            linear_controlled: sup <= d_plus + 1e-12 * d_plus.max(1.0),
        };
        let base = nonlinearity.cap_base(sup);
        let caps = (0..CAP_LADDER_LEN).map(|k| base * (1u64 << k) as f64).collect();
        Ok(Habitat { profile, nonlinearity, caps, flags })
    }

    /// Saturating habitat: logistic rate ramp from `r_minus < 1` up to
    /// `r_plus > 1` feeding a Beverton–Holt recruitment with capacity
    /// `carrying`.
    pub fn beverton_holt(r_minus: f64, r_plus: f64, carrying: f64, steepness: f64) -> Result<Self> {
        if !(r_minus.is_finite() && (0.0..1.0).contains(&r_minus)) {
            return Err(Error::invalid("r_minus", format!("must lie in [0, 1), got {r_minus}")));
        }
        if !(r_plus.is_finite() && r_plus > 1.0) {
            return Err(Error::invalid("r_plus", format!("must exceed 1, got {r_plus}")));
        }
        Habitat::from_parts(
            Profile::Sigmoid { lo: r_minus, hi: r_plus, steepness },
            Nonlinearity::BevertonHolt { carrying },
        )
    }

    /// Homogeneous linear habitat `f(x, u) = slope · u`.
    pub fn linear(slope: f64) -> Result<Self> {
        Habitat::from_parts(Profile::Constant { value: slope }, Nonlinearity::Linear)
    }

    /// Isolated patch `beta e^{-x²}` with hull-Ricker recruitment: growth
    /// vanishes toward *both* infinities.
    pub fn gaussian_patch(beta: f64) -> Result<Self> {
        Habitat::from_parts(Profile::GaussianPatch { beta }, Nonlinearity::RickerHull)
    }

    /// The patch of [`Habitat::gaussian_patch`] grafted onto a ramp that
    /// saturates at rate `e` on the right.
    pub fn patch_with_ramp(beta: f64) -> Result<Self> {
        Habitat::from_parts(Profile::PatchWithRamp { beta }, Nonlinearity::RickerHull)
    }

    /// The matched pair (patch, patch + ramp) with a common peak rate.
    pub fn counterexample_pair(beta: f64) -> Result<(Self, Self)> {
        Ok((Habitat::gaussian_patch(beta)?, Habitat::patch_with_ramp(beta)?))
    }

    /// Replaces the cap ladder. Caps must be positive, finite and increasing;
    /// invariance is audited by [`Habitat::validate_hypotheses`] and enforced
    /// again by the fixed-point solvers.
    pub fn with_caps(mut self, caps: Vec<f64>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::invalid("caps", "need at least one cap"));
        }
        if caps.iter().any(|&c| !c.is_finite() || c <= 0.0) {
            return Err(Error::invalid("caps", "caps must be positive and finite"));
        }
        if caps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("caps", "caps must be strictly increasing"));
        }
        self.caps = caps;
        Ok(self)
    }

    /// Coefficient profile `c(x)`; equals `∂f/∂u(x, 0)` for every family.
    pub fn coefficient(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// Limiting coefficient `d_±`.
    pub fn coefficient_limit(&self, side: Side) -> f64 {
        self.profile.limit(side)
    }

    /// Supremum of the coefficient profile.
    pub fn sup_coefficient(&self) -> f64 {
        self.profile.sup()
    }

    /// Growth map value `f(x, u)`.
    pub fn f(&self, x: f64, u: f64) -> f64 {
        self.nonlinearity.apply(self.profile.eval(x), u)
    }

    /// Limiting homogeneous map `f_±(u)`.
    pub fn f_limit(&self, side: Side, u: f64) -> f64 {
        self.nonlinearity.apply(self.profile.limit(side), u)
    }

    /// Invariant cap ladder, smallest first.
    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    /// Structural flags recorded at construction.
    pub fn flags(&self) -> HabitatFlags {
        self.flags
    }

    /// Underlying profile.
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Underlying nonlinearity.
    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    /// Positive fixed point of the limiting map `f_±`, found by bisection to
    /// absolute tolerance `1e-12`.
    ///
    /// Requires the limit to be supercritical (`d_± > 1`); a subcritical
    /// limit has no positive fixed point to find. A scan across five decades
    /// guards the uniqueness assumption and reports a hypothesis violation
    /// when the map crosses the diagonal more than once.
    pub fn limit_fixed_point(&self, side: Side) -> Result<f64> {
        let d = self.coefficient_limit(side);
        if d <= 1.0 {
            return Err(Error::Precondition(format!(
                "limiting coefficient {d} is subcritical; the limiting map has no positive fixed point"
            )));
        }
        let g = |u: f64| self.f_limit(side, u) - u;
        let mut hi = 1.0;
        let mut doublings = 0;
        while g(hi) > 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(Error::Precondition(
                    "limiting map stays above the diagonal; no finite positive fixed point".into(),
                ));
            }
        }
        let mut lo = 1e-9 * hi.min(1.0);
        if g(lo) <= 0.0 {
            return Err(Error::Precondition(
                "limiting map is below the diagonal arbitrarily close to zero".into(),
            ));
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);

        // Uniqueness guard: count +→− sign changes on a geometric mesh.
        let mesh_hi = (4.0 * root).max(4.0);
        let mesh_lo = 1e-6 * root;
        let mut changes = 0;
        let mut prev_sign = 1.0;
        for i in 0..=256 {
            let u = mesh_lo * (mesh_hi / mesh_lo).powf(i as f64 / 256.0);
            let s = g(u);
            if s != 0.0 {
                let sign = s.signum();
                if sign != prev_sign {
                    changes += 1;
                }
                prev_sign = sign;
            }
        }
        if changes != 1 {
            return Err(Error::Hypothesis(format!(
                "limiting map crosses the diagonal {changes} times; expected a single positive fixed point"
            )));
        }
        Ok(root)
    }

    /// Audits the standing assumptions on a lattice of `|x| <= x_edge`,
    /// `0 <= u <= u_max` and reports each with a witness on failure.
    pub fn validate_hypotheses(&self, x_edge: f64, u_max: f64) -> HypothesisReport {
        let xs: Vec<f64> = (0..=200).map(|i| -x_edge + i as f64 * x_edge / 100.0).collect();
        let mut us: Vec<f64> = vec![0.0];
        us.extend((0..=64).map(|i| u_max * 1e-6 * (1e6f64).powf(i as f64 / 64.0)));

        let mut checks = Vec::new();
        let mut push = |name: &'static str, witness: Option<String>| {
            checks.push(HypothesisCheck { name, holds: witness.is_none(), witness });
        };

        // Zero must be a fixed state of the growth map.
        push("zero state is invariant", {
            xs.iter()
                .find(|&&x| self.f(x, 0.0).abs() > 1e-14 * self.coefficient(x).max(1.0))
                .map(|&x| format!("f({x}, 0) = {}", self.f(x, 0.0)))
        });

        push("growth is nonnegative", {
            let mut w = None;
            'outer: for &x in &xs {
                for &u in &us {
                    let v = self.f(x, u);
                    if v.is_nan() || v < 0.0 {
                        w = Some(format!("f({x}, {u}) = {v}"));
                        break 'outer;
                    }
                }
            }
            w
        });

        push("growth is nondecreasing in density", {
            let mut w = None;
            'outer: for &x in &xs {
                for pair in us.windows(2) {
                    let (a, b) = (self.f(x, pair[0]), self.f(x, pair[1]));
                    if b < a - 1e-12 * a.abs().max(1.0) {
                        w = Some(format!("f({x}, {}) = {a} > f({x}, {}) = {b}", pair[0], pair[1]));
                        break 'outer;
                    }
                }
            }
            w
        });

        push("coefficient limits are attained at the audit edges", {
            let mut w = None;
            for side in [Side::Minus, Side::Plus] {
                let x = side.sign() * x_edge;
                let d = self.coefficient_limit(side);
                let c = self.coefficient(x);
                if (c - d).abs() > 1e-6 * d.max(1.0) {
                    w = Some(format!("coefficient({x}) = {c} vs limit {d}"));
                }
            }
            w
        });

        push("left limit subcritical, right limit supercritical", {
            let (dm, dp) = (self.coefficient_limit(Side::Minus), self.coefficient_limit(Side::Plus));
            (!(dm < 1.0 && dp > 1.0)).then(|| format!("d_- = {dm}, d_+ = {dp}"))
        });

        push("limiting maps stay below their linearizations", {
            let mut w = None;
            for side in [Side::Minus, Side::Plus] {
                let d = self.coefficient_limit(side);
                for &u in &us {
                    let v = self.f_limit(side, u);
                    if v > d * u + 1e-12 * (d * u).max(1.0) {
                        w = Some(format!("f_limit({side:?}, {u}) = {v} > {d} * {u}"));
                    }
                }
            }
            w
        });

        push(
            "right limiting map has a unique positive fixed point",
            self.limit_fixed_point(Side::Plus).err().map(|e| e.to_string()),
        );

        push("declared caps are invariant", {
            let mut w = None;
            'outer: for &cap in self.caps.iter().take(4) {
                for &x in &xs {
                    for u in us.iter().copied().filter(|&u| u <= cap).chain([cap]) {
                        let v = self.f(x, u);
                        if v > cap * (1.0 + 1e-12) {
                            w = Some(format!("f({x}, {u}) = {v} escapes cap {cap}"));
                            break 'outer;
                        }
                    }
                }
            }
            w
        });

        push("growth stays below its linearization at zero", {
            let mut w = None;
            'outer: for &x in &xs {
                let c = self.coefficient(x);
                for &u in &us {
                    let v = self.f(x, u);
                    if v > c * u + 1e-12 * (c * u).max(1.0) {
                        w = Some(format!("f({x}, {u}) = {v} > {c} * {u}"));
                        break 'outer;
                    }
                }
            }
            w
        });

        let all_hold = checks.iter().all(|c| c.holds);
        HypothesisReport { checks, all_hold }
    }
}

/// One audited assumption.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    /// Short description of the assumption.
    pub name: &'static str,
    /// Whether the audit found no violation.
    pub holds: bool,
    /// Example violation, when one was found.
    pub witness: Option<String>,
}

/// Outcome of [`Habitat::validate_hypotheses`].
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// Individual audited assumptions.
    pub checks: Vec<HypothesisCheck>,
    /// True when every check holds.
    pub all_hold: bool,
}

/// A spatial linear bound `f(x, u) <= (gamma + s(x)) u` on `0 <= u <= u**`,
/// where `s(x)` is the largest secant slope of `u -> f(x, u)` and `gamma > 0`
/// is head-room added so the bound stays strict.
#[derive(Debug, Clone)]
pub struct LinearEnvelope {
    habitat: Habitat,
    gamma: f64,
    u_star_star: f64,
    rate_minus: f64,
    rate_plus: f64,
    uniformly_dominated: bool,
}

impl LinearEnvelope {
    /// Envelope rate `gamma + s(x)`.
    pub fn rate(&self, x: f64) -> f64 {
        self.gamma + secant_sup(&self.habitat, x, self.u_star_star)
    }

    /// Envelope rate toward left infinity.
    pub fn rate_minus(&self) -> f64 {
        self.rate_minus
    }

    /// Envelope rate toward right infinity.
    pub fn rate_plus(&self) -> f64 {
        self.rate_plus
    }

    /// Head-room parameter.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Density range on which the envelope was audited.
    pub fn u_star_star(&self) -> f64 {
        self.u_star_star
    }

    /// True when the audit found `rate(x) <= rate_plus` everywhere — the
    /// envelope is then a *uniform* linear bound with the right-limit rate,
    /// which is what nonexistence certificates need.
    pub fn uniformly_dominated(&self) -> bool {
        self.uniformly_dominated
    }
}

/// Largest secant slope `sup_{0 < u <= u**} f(x, u)/u`, floored by the slope
/// at zero.
fn secant_sup(habitat: &Habitat, x: f64, u_star_star: f64) -> f64 {
    let mut sup = habitat.coefficient(x);
    for i in 0..=64 {
        let u = u_star_star * 1e-8 * (1e8f64).powf(i as f64 / 64.0);
        sup = sup.max(habitat.f(x, u) / u);
    }
    sup
}

/// Builds and audits a [`LinearEnvelope`] for `habitat`.
///
/// The audit samples a 200 × 200 lattice over `|x| <=` the default audit
/// half-width and `0 < u <= u_star_star` and fails with a witness if the
/// envelope ever undercuts the growth map.
pub fn build_envelope(habitat: &Habitat, gamma: f64, u_star_star: f64) -> Result<LinearEnvelope> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    if !(u_star_star.is_finite() && u_star_star > 0.0) {
        return Err(Error::invalid("u_star_star", format!("must be positive, got {u_star_star}")));
    }
    let limit_rate = |side: Side| -> f64 {
        let mut sup = habitat.coefficient_limit(side);
        for i in 0..=64 {
            let u = u_star_star * 1e-8 * (1e8f64).powf(i as f64 / 64.0);
            sup = sup.max(habitat.f_limit(side, u) / u);
        }
        gamma + sup
    };
    let rate_minus = limit_rate(Side::Minus);
    let rate_plus = limit_rate(Side::Plus);

    let envelope = LinearEnvelope {
        habitat: habitat.clone(),
        gamma,
        u_star_star,
        rate_minus,
        rate_plus,
        uniformly_dominated: true,
    };

    let half = DEFAULT_AUDIT_HALF_WIDTH;
    let mut uniform = rate_minus <= rate_plus + 1e-9;
    for i in 0..=200 {
        let x = -half + i as f64 * half / 100.0;
        let rate = envelope.rate(x);
        if rate > rate_plus + 1e-9 * rate_plus.max(1.0) {
            uniform = false;
        }
        for j in 0..=200 {
            let u = u_star_star * 1e-8 * (1e8f64).powf(j as f64 / 200.0);
            let bound = rate * u;
            let v = habitat.f(x, u);
            if v > bound + 1e-12 * bound.max(1.0) {
                return Err(Error::Precondition(format!(
                    "envelope audit failed: f({x}, {u}) = {v} exceeds rate {rate} * {u}"
                )));
            }
        }
    }
    Ok(LinearEnvelope { uniformly_dominated: uniform, ..envelope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn bh() -> Habitat {
        Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap()
    }

    #[test]
    fn beverton_holt_limits_and_midpoint() {
        let h = bh();
        assert_eq!(h.coefficient_limit(Side::Minus), 0.5);
        assert_eq!(h.coefficient_limit(Side::Plus), E);
        assert_relative_eq!(h.coefficient(0.0), 0.5 * (0.5 + E), max_relative = 1e-15);
        assert_eq!(h.sup_coefficient(), E);
        let flags = h.flags();
        assert!(flags.monotone_in_u && flags.subhomogeneous && flags.linear_controlled);
    }

    #[test]
    fn beverton_holt_fixed_point_is_the_carrying_capacity() {
        let h = bh();
        let u_star = h.limit_fixed_point(Side::Plus).unwrap();
        assert_abs_diff_eq!(u_star, 1.0, epsilon = 1e-9);
        let h2 = Habitat::beverton_holt(0.2, 3.0, 7.5, 2.0).unwrap();
        assert_abs_diff_eq!(h2.limit_fixed_point(Side::Plus).unwrap(), 7.5, epsilon = 1e-9);
        // The subcritical left limit has no positive fixed point.
        assert!(h.limit_fixed_point(Side::Minus).is_err());
    }

    #[test]
    fn hull_ricker_fixed_point_sits_at_the_kink() {
        let h = Habitat::patch_with_ramp(2.0).unwrap();
        // f_+(u) = e r(u): below 1 it is u e^{1-u} > u, above 1 it is 1 < u.
        assert_abs_diff_eq!(h.limit_fixed_point(Side::Plus).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn supercritical_linear_map_has_no_finite_fixed_point() {
        let h = Habitat::linear(2.0).unwrap();
        let err = h.limit_fixed_point(Side::Plus).unwrap_err();
        assert!(err.to_string().contains("above the diagonal"), "{err}");
        assert!(Habitat::linear(0.5).unwrap().limit_fixed_point(Side::Plus).is_err());
    }

    #[test]
    fn patch_profiles_have_the_advertised_shape() {
        let (g, h) = Habitat::counterexample_pair(8.0).unwrap();
        assert_eq!(g.coefficient_limit(Side::Minus), 0.0);
        assert_eq!(g.coefficient_limit(Side::Plus), 0.0);
        assert_eq!(h.coefficient_limit(Side::Minus), 0.0);
        assert_eq!(h.coefficient_limit(Side::Plus), E);
        assert_relative_eq!(g.coefficient(0.0), 8.0);
        assert_relative_eq!(h.coefficient(0.0), 8.0);
        // Far right the ramp dominates; far left the patch does.
        assert_relative_eq!(h.coefficient(10.0), E - (-10.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(h.coefficient(-3.0), 8.0 * (-9.0f64).exp(), max_relative = 1e-12);
        // The patch overshoots the right limit, so neither map is
        // linearly controlled at this beta...
        assert!(!g.flags().linear_controlled);
        assert!(!h.flags().linear_controlled);
        // ...but the grafted map is once the patch stays below e.
        assert!(Habitat::patch_with_ramp(2.0).unwrap().flags().linear_controlled);
    }

    #[test]
    fn hull_recruitment_saturates_and_is_monotone() {
        let g = Habitat::gaussian_patch(E).unwrap();
        assert_abs_diff_eq!(g.f(0.0, 1.0), 1.0, epsilon = 1e-15);
        assert_eq!(g.f(0.0, 1.0), g.f(0.0, 2.5));
        assert!(g.f(0.0, 0.3) < g.f(0.0, 0.9));
        // Derivative at zero equals the coefficient.
        let c = g.coefficient(0.7);
        let fd = g.f(0.7, 1e-9) / 1e-9;
        assert_relative_eq!(fd, c, max_relative = 1e-8);
    }

    #[test]
    fn hypothesis_audit_passes_for_the_saturating_family() {
        let report = bh().validate_hypotheses(DEFAULT_AUDIT_HALF_WIDTH, 8.0);
        for check in &report.checks {
            assert!(check.holds, "{}: {:?}", check.name, check.witness);
        }
        assert!(report.all_hold);
    }

    #[test]
    fn hypothesis_audit_flags_structural_failures() {
        // Raw Ricker is not monotone.
        let raw = Habitat::from_parts(Profile::Constant { value: 2.0 }, Nonlinearity::Ricker).unwrap();
        let report = raw.validate_hypotheses(5.0, 8.0);
        let mono = report.checks.iter().find(|c| c.name.contains("nondecreasing")).unwrap();
        assert!(!mono.holds);
        assert!(mono.witness.is_some());

        // A supercritical linear habitat escapes every cap.
        let lin = Habitat::linear(2.0).unwrap();
        let report = lin.validate_hypotheses(5.0, 8.0);
        let caps = report.checks.iter().find(|c| c.name.contains("caps")).unwrap();
        assert!(!caps.holds, "{:?}", caps.witness);

        // Wrong ordering of the limits is caught.
        let wrong = Habitat::from_parts(
            Profile::Sigmoid { lo: 1.2, hi: 2.0, steepness: 1.0 },
            Nonlinearity::BevertonHolt { carrying: 1.0 },
        )
        .unwrap();
        let report = wrong.validate_hypotheses(5.0, 8.0);
        let order = report.checks.iter().find(|c| c.name.contains("subcritical")).unwrap();
        assert!(!order.holds);
        assert!(!report.all_hold);
    }

    #[test]
    fn envelope_adds_headroom_and_detects_uniformity() {
        let env = build_envelope(&bh(), 0.1, 1.0).unwrap();
        assert_relative_eq!(env.rate_plus(), 0.1 + E, max_relative = 1e-12);
        assert_relative_eq!(env.rate_minus(), 0.6, max_relative = 1e-12);
        assert_relative_eq!(env.rate(0.0), 0.1 + 0.5 * (0.5 + E), max_relative = 1e-9);
        assert!(env.uniformly_dominated());

        // An interior patch above the right limit breaks uniform domination.
        let patchy = Habitat::patch_with_ramp(8.0).unwrap();
        let env = build_envelope(&patchy, 0.1, 1.0).unwrap();
        assert!(!env.uniformly_dominated());
        assert_relative_eq!(env.rate(0.0), 0.1 + 8.0, max_relative = 1e-9);
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(Habitat::beverton_holt(1.5, 2.0, 1.0, 1.0).is_err());
        assert!(Habitat::beverton_holt(0.5, 0.9, 1.0, 1.0).is_err());
        assert!(Habitat::beverton_holt(0.5, 2.0, 0.0, 1.0).is_err());
        assert!(Habitat::beverton_holt(0.5, 2.0, 1.0, -1.0).is_err());
        assert!(Habitat::gaussian_patch(0.0).is_err());
        assert!(Habitat::linear(-0.5).is_err());
        assert!(bh().with_caps(vec![]).is_err());
        assert!(bh().with_caps(vec![2.0, 1.0]).is_err());
        assert!(bh().with_caps(vec![1.0, 1.0]).is_err());
        assert!(bh().with_caps(vec![0.5, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn caps_form_a_dyadic_ladder_above_the_base() {
        let h = bh();
        assert_eq!(h.caps()[0], 1.0);
        assert_eq!(h.caps()[1], 2.0);
        assert_eq!(h.caps()[5], 32.0);
        let g = Habitat::gaussian_patch(2.0 * E).unwrap();
        assert_abs_diff_eq!(g.caps()[0], 2.0, epsilon = 1e-12);
    }
}

//! Dispersal kernels and their moment generating functions.
//!
//! A kernel is a probability density `k` on the line. One evolution step
//! convolves the grown field against `k`; the discretization uses weights
//! `w_j = h k(j h)` for `|j h|` up to the truncation radius, renormalized to
//! unit sum so mass is conserved exactly.
//!
//! The moment generating function `M(t) = ∫ e^{t y} k(y) dy` drives every
//! speed computation. Closed forms are used where they exist (Gaussian,
//! Laplace); tabulated kernels integrate in log space so large arguments do
//! not overflow. `mgf_quadrature` recomputes `M` by summation on an argument-
//! dependent window and exists purely to cross-check the closed forms.

use crate::error::{Error, Result};
use crate::grid::Samples;

/// Maximum probability mass allowed outside the truncation window.
///
/// The discretized operator silently drops this mass every step, so it must
/// sit far below every tolerance used by the iteration diagnostics.
pub const TAIL_MASS_LIMIT: f64 = 1e-12;

/// How far a tabulated density's trapezoid mass may deviate from 1 before the
/// input is rejected as "not a probability density".
pub const TABULATED_MASS_TOL: f64 = 1e-6;

/// A dispersal kernel together with its truncation radius.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// Normal density with the given mean and variance.
    Gaussian {
        /// Mean displacement per step.
        mean: f64,
        /// Variance of the displacement.
        variance: f64,
        /// Half-width of the truncation window.
        truncation_radius: f64,
    },
    /// Two-sided exponential density `rate/2 · exp(-rate |y - shift|)`.
    Laplace {
        /// Decay rate of both tails.
        rate: f64,
        /// Center of the density.
        shift: f64,
        /// Half-width of the truncation window.
        truncation_radius: f64,
    },
    /// Density given by samples; zero outside the sampled range.
    Tabulated {
        /// Sampled density, renormalized to unit trapezoid mass.
        samples: Samples,
        /// Half-width of the truncation window.
        truncation_radius: f64,
    },
}

impl Kernel {
    /// Gaussian kernel. The default truncation radius `|mean| + 8 sigma`
    /// keeps the neglected tail below [`TAIL_MASS_LIMIT`] even for strongly
    /// drifting kernels, whose window `[-r, r]` must cover the off-center bulk.
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::invalid("variance", format!("must be positive, got {variance}")));
        }
        Ok(Kernel::Gaussian {
            mean,
            variance,
            truncation_radius: mean.abs() + 8.0 * variance.sqrt(),
        })
    }

    /// Laplace kernel centered at `shift` with tail decay `rate`. The default
    /// radius `|shift| + 30/rate` leaves tail mass about `e^{-30}/2` outside.
    pub fn laplace(rate: f64, shift: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("rate", format!("must be positive, got {rate}")));
        }
        if !shift.is_finite() {
            return Err(Error::invalid("shift", "must be finite"));
        }
        Ok(Kernel::Laplace {
            rate,
            shift,
            truncation_radius: shift.abs() + 30.0 / rate,
        })
    }

    /// Kernel from sampled density values. Samples must be nonnegative with
    /// trapezoid mass within [`TABULATED_MASS_TOL`] of 1; they are then
    /// renormalized so the discrete mass is exactly 1. The density is treated
    /// as zero outside the sampled range, and the truncation radius defaults
    /// to the range's outer edge.
    pub fn tabulated(samples: Samples) -> Result<Self> {
        if samples.ys().iter().any(|&y| y < 0.0) {
            return Err(Error::invalid("samples", "density values must be nonnegative"));
        }
        let mass = samples.trapezoid(|_, y| y);
        if (mass - 1.0).abs() > TABULATED_MASS_TOL {
            return Err(Error::invalid(
                "samples",
                format!("trapezoid mass {mass} is not 1 within {TABULATED_MASS_TOL:.0e}"),
            ));
        }
        let pairs = samples
            .xs()
            .iter()
            .zip(samples.ys())
            .map(|(&x, &y)| (x, y / mass))
            .collect();
        let samples = Samples::from_pairs(pairs)?;
        let truncation_radius = samples.x_min().abs().max(samples.x_max().abs());
        Ok(Kernel::Tabulated { samples, truncation_radius })
    }

    /// Replaces the truncation radius. Whether a radius suffices is checked
    /// when weights are built, because it depends on the step size too.
    pub fn with_truncation_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
        }
        match &mut self {
            Kernel::Gaussian { truncation_radius, .. }
            | Kernel::Laplace { truncation_radius, .. }
            | Kernel::Tabulated { truncation_radius, .. } => *truncation_radius = radius,
        }
        Ok(self)
    }

    /// Current truncation radius.
    pub fn truncation_radius(&self) -> f64 {
        match self {
            Kernel::Gaussian { truncation_radius, .. }
            | Kernel::Laplace { truncation_radius, .. }
            | Kernel::Tabulated { truncation_radius, .. } => *truncation_radius,
        }
    }

    /// Density at displacement `y`.
    pub fn density(&self, y: f64) -> f64 {
        match self {
            Kernel::Gaussian { mean, variance, .. } => {
                let z = y - mean;
                (-z * z / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
            Kernel::Laplace { rate, shift, .. } => 0.5 * rate * (-rate * (y - shift).abs()).exp(),
            Kernel::Tabulated { samples, .. } => {
                if y < samples.x_min() || y > samples.x_max() {
                    0.0
                } else {
                    samples.eval(y)
                }
            }
        }
    }

    /// Natural logarithm of the moment generating function.
    ///
    /// Errors with [`Error::MgfDiverges`] where the integral does not exist
    /// (Laplace kernels at `|t| >= rate`).
    pub fn log_mgf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::invalid("t", "must be finite"));
        }
        match self {
            Kernel::Gaussian { mean, variance, .. } => Ok(mean * t + 0.5 * variance * t * t),
            Kernel::Laplace { rate, shift, .. } => {
                if t.abs() >= *rate {
                    return Err(Error::MgfDiverges { mu: t });
                }
                Ok(shift * t + (rate * rate / (rate * rate - t * t)).ln())
            }
            Kernel::Tabulated { samples, .. } => {
                // Trapezoid integral of e^{t x} k(x), evaluated in log space:
                // ln Σ_i c_i e^{t x_i} with positive trapezoid coefficients c_i.
                let xs = samples.xs();
                let ys = samples.ys();
                let mut coef = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    let half_dx = 0.5 * (xs[i] - xs[i - 1]);
                    coef[i - 1] += half_dx;
                    coef[i] += half_dx;
                }
                let peak = xs
                    .iter()
                    .zip(ys)
                    .filter(|(_, &y)| y > 0.0)
                    .map(|(&x, _)| t * x)
                    .fold(f64::NEG_INFINITY, f64::max);
                if peak == f64::NEG_INFINITY {
                    return Err(Error::Precondition("tabulated density is identically zero".into()));
                }
                let sum: f64 = xs
                    .iter()
                    .zip(ys)
                    .zip(&coef)
                    .map(|((&x, &y), &c)| c * y * (t * x - peak).exp())
                    .sum();
                Ok(peak + sum.ln())
            }
        }
    }

    /// Moment generating function `M(t)`.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        self.log_mgf(t).map(f64::exp)
    }

    /// Derivative `d/dt ln M(t)` — the mean displacement of the tilted
    /// density. Closed forms for Gaussian/Laplace; a weighted trapezoid mean
    /// for tabulated kernels.
    pub fn log_mgf_derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::invalid("t", "must be finite"));
        }
        match self {
            Kernel::Gaussian { mean, variance, .. } => Ok(mean + variance * t),
            Kernel::Laplace { rate, shift, .. } => {
                if t.abs() >= *rate {
                    return Err(Error::MgfDiverges { mu: t });
                }
                Ok(shift + 2.0 * t / (rate * rate - t * t))
            }
            Kernel::Tabulated { samples, .. } => {
                let xs = samples.xs();
                let ys = samples.ys();
                let mut coef = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    let half_dx = 0.5 * (xs[i] - xs[i - 1]);
                    coef[i - 1] += half_dx;
                    coef[i] += half_dx;
                }
                let peak = xs
                    .iter()
                    .zip(ys)
                    .filter(|(_, &y)| y > 0.0)
                    .map(|(&x, _)| t * x)
                    .fold(f64::NEG_INFINITY, f64::max);
                if peak == f64::NEG_INFINITY {
                    return Err(Error::Precondition("tabulated density is identically zero".into()));
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for ((&x, &y), &c) in xs.iter().zip(ys).zip(&coef) {
                    let w = c * y * (t * x - peak).exp();
                    num += w * x;
                    den += w;
                }
                Ok(num / den)
            }
        }
    }

    /// Recomputes `M(t)` by direct summation with step `h`, on a window wide
    /// enough for the *tilted* density `e^{t y} k(y)`: the tilt shifts the
    /// bulk (for a Gaussian by `t · variance`), so the window grows with `t`
    /// rather than staying at the convolution stencil's radius. The sum is
    /// normalized by the discrete mass, making `mgf_quadrature(0, h) = 1`
    /// exact. Intended for cross-checking `mgf`, not for inner loops.
    pub fn mgf_quadrature(&self, t: f64, h: f64) -> Result<f64> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid("h", format!("must be positive, got {h}")));
        }
        let radius = match self {
            Kernel::Gaussian { mean, variance, .. } => {
                mean.abs() + t.abs() * variance + 10.0 * variance.sqrt()
            }
            Kernel::Laplace { rate, shift, .. } => {
                if t.abs() >= *rate {
                    return Err(Error::MgfDiverges { mu: t });
                }
                shift.abs() + 35.0 / (rate - t.abs())
            }
            Kernel::Tabulated { samples, .. } => samples.x_min().abs().max(samples.x_max().abs()),
        };
        let half = (radius / h).ceil() as i64;
        // Accumulate in log space relative to the peak exponent so that
        // large |t| radius windows cannot overflow.
        let peak = t.abs() * half as f64 * h;
        let mut tilted = 0.0;
        let mut mass = 0.0;
        for j in -half..=half {
            let y = j as f64 * h;
            let d = self.density(y);
            if d > 0.0 {
                tilted += d * (t * y - peak).exp();
                mass += d;
            }
        }
        if mass == 0.0 {
            return Err(Error::Precondition("no density mass inside quadrature window".into()));
        }
        Ok((peak + (tilted / mass).ln()).exp())
    }

    /// Upper bound on the probability mass outside `[-r, r]`.
    fn tail_mass_bound(&self, r: f64) -> f64 {
        match self {
            Kernel::Gaussian { mean, variance, .. } => {
                let sigma = variance.sqrt();
                normal_tail((r - mean) / sigma) + normal_tail((r + mean) / sigma)
            }
            Kernel::Laplace { rate, shift, .. } => {
                let right = if r > *shift { 0.5 * (-rate * (r - shift)).exp() } else { 1.0 };
                let left = if -r < *shift { 0.5 * (-rate * (shift + r)).exp() } else { 1.0 };
                (right + left).min(1.0)
            }
            Kernel::Tabulated { samples, .. } => {
                let lo = samples.x_min();
                let hi = samples.x_max();
                let mut outside = 0.0;
                // Integrate the sampled density over the parts of its support
                // beyond the window, clipping straddling segments at ±r.
                if lo < -r {
                    outside += clip_trapezoid(samples, lo, hi.min(-r));
                }
                if hi > r {
                    outside += clip_trapezoid(samples, lo.max(r), hi);
                }
                outside
            }
        }
    }

    /// Convolution weights `w_j = h k(j h)`, `|j| <= J = floor(r/h)`,
    /// renormalized to unit sum. Errors when the truncation radius leaves
    /// more than [`TAIL_MASS_LIMIT`] outside the window.
    pub fn quadrature_weights(&self, h: f64) -> Result<QuadratureWeights> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid("h", format!("must be positive, got {h}")));
        }
        let radius = self.truncation_radius();
        let half_width = ((radius / h) * (1.0 + 1e-12)).floor() as usize;
        if half_width == 0 {
            return Err(Error::invalid(
                "h",
                format!("step {h} exceeds the truncation radius {radius}"),
            ));
        }
        let covered = half_width as f64 * h;
        let tail_mass = self.tail_mass_bound(covered);
        if tail_mass > TAIL_MASS_LIMIT {
            return Err(Error::InsufficientTruncation {
                radius: covered,
                tail_mass,
                limit: TAIL_MASS_LIMIT,
            });
        }
        let j = half_width as i64;
        let mut weights: Vec<f64> = (-j..=j).map(|q| h * self.density(q as f64 * h)).collect();
        let sum: f64 = weights.iter().sum();
        if !(0.5..=1.5).contains(&sum) {
            return Err(Error::Precondition(format!(
                "quadrature mass {sum} is far from 1; check the step size against the kernel scale"
            )));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(QuadratureWeights { half_width, weights })
    }
}

/// Discrete convolution stencil: `weights[J + j] ≈ h k(j h)` for
/// `j = -J ..= J`, summing to 1.
#[derive(Debug, Clone)]
pub struct QuadratureWeights {
    /// Stencil half-width `J` in grid steps.
    pub half_width: usize,
    /// The `2J + 1` weights, nonnegative with unit sum.
    pub weights: Vec<f64>,
}

/// Upper bound on the standard normal upper tail, `P(Z > z) <= phi(z)/z`.
fn normal_tail(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (phi / z).min(1.0)
}

/// Trapezoid integral of the sampled density over `[a, b]`, with the
/// endpoints allowed to cut through segments.
fn clip_trapezoid(samples: &Samples, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let xs = samples.xs();
    let mut acc = 0.0;
    for i in 1..xs.len() {
        let lo = xs[i - 1].max(a);
        let hi = xs[i].min(b);
        if lo < hi {
            acc += 0.5 * (hi - lo) * (samples.eval(lo) + samples.eval(hi));
        }
    }
    acc
}

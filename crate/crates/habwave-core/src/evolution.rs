//! The one-step evolution operator: grow in place, then disperse.
//!
//! Discretized on a uniform grid with spacing `h`, one step reads
//!
//! ```text
//! (Q u)(x_i) = Σ_j w_j f(x_i - y_j, u(x_i - y_j)),    y_j = j h,
//! ```
//!
//! with kernel weights `w_j` from [`crate::kernel::Kernel::quadrature_weights`].
//! The stencil reaches `J` points beyond each grid edge; there the field is
//! extended by its edge value and the growth map is replaced by its limiting
//! homogeneous map, so the truncation edge behaves like the habitat at
//! ±infinity. Orbits of nonnegative data stay nonnegative because weights and
//! growth values are nonnegative, and the operator preserves pointwise order
//! whenever the habitat is monotone in density.

use crate::error::{Error, Result};
use crate::grid::{Field, SpatialGrid};
use crate::habitat::Habitat;
use crate::kernel::{Kernel, QuadratureWeights};
use crate::Side;

/// Discretized evolution operator for one habitat/kernel/grid triple.
#[derive(Debug, Clone)]
pub struct EvolutionOp {
    habitat: Habitat,
    kernel: Kernel,
    grid: SpatialGrid,
    weights: QuadratureWeights,
    /// Coefficient profile on the extended grid (limits beyond the edges).
    coef_ext: Vec<f64>,
}

impl EvolutionOp {
    /// Builds the operator; fails when the kernel truncation is too small for
    /// the grid spacing.
    pub fn new(habitat: Habitat, kernel: Kernel, grid: SpatialGrid) -> Result<Self> {
        let weights = kernel.quadrature_weights(grid.spacing())?;
        let coef_ext = extend_profile(
            grid,
            weights.half_width,
            |x| habitat.coefficient(x),
            habitat.coefficient_limit(Side::Minus),
            habitat.coefficient_limit(Side::Plus),
        );
        Ok(EvolutionOp { habitat, kernel, grid, weights, coef_ext })
    }

    /// Grid the operator acts on.
    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// Habitat the operator was built from.
    pub fn habitat(&self) -> &Habitat {
        &self.habitat
    }

    /// Kernel the operator was built from.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Stencil half-width in grid steps.
    pub fn stencil_half_width(&self) -> usize {
        self.weights.half_width
    }

    /// Applies one growth-and-dispersal step.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.check_input(u)?;
        let j = self.weights.half_width;
        let n = self.grid.len();
        let values = u.values();
        let mut fext = vec![0.0; n + 2 * j];
        for (m, slot) in fext.iter_mut().enumerate() {
            let interior = (m as i64 - j as i64).clamp(0, n as i64 - 1) as usize;
            *slot = self.habitat.nonlinearity().apply(self.coef_ext[m], values[interior]);
        }
        self.finish(convolve(&self.weights, &fext, n))
    }

    /// Applies one step of the limiting homogeneous operator `Q_±`.
    pub fn apply_limit(&self, u: &Field, side: Side) -> Result<Field> {
        self.check_input(u)?;
        let j = self.weights.half_width;
        let n = self.grid.len();
        let d = self.habitat.coefficient_limit(side);
        let values = u.values();
        let mut fext = vec![0.0; n + 2 * j];
        for (m, slot) in fext.iter_mut().enumerate() {
            let interior = (m as i64 - j as i64).clamp(0, n as i64 - 1) as usize;
            *slot = self.habitat.nonlinearity().apply(d, values[interior]);
        }
        self.finish(convolve(&self.weights, &fext, n))
    }

    /// Runs `steps` iterations from `u0`, recording a snapshot every
    /// `snapshot_every` steps (plus the initial and final states) and the
    /// sup-norm change of every step.
    pub fn iterate(&self, u0: &Field, steps: usize, snapshot_every: usize) -> Result<Trajectory> {
        if snapshot_every == 0 {
            return Err(Error::invalid("snapshot_every", "must be at least 1"));
        }
        let mut snapshots = vec![(0, u0.clone())];
        let mut deltas = Vec::with_capacity(steps);
        let mut current = u0.clone();
        for step in 1..=steps {
            let next = self.apply(&current)?;
            deltas.push(next.sup_diff(&current)?);
            current = next;
            if step % snapshot_every == 0 || step == steps {
                snapshots.push((step, current.clone()));
            }
        }
        Ok(Trajectory { snapshots, deltas })
    }

    fn check_input(&self, u: &Field) -> Result<()> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch("field grid differs from operator grid".into()));
        }
        for (i, &v) in u.values().iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Precondition(format!(
                    "input field must be finite and nonnegative; found {v} at x = {}",
                    self.grid.point(i)
                )));
            }
        }
        Ok(())
    }

    fn finish(&self, values: Vec<f64>) -> Result<Field> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition(
                "evolution step produced a non-finite value; the growth map is unbounded on this data"
                    .into(),
            ));
        }
        Field::from_values(self.grid, values)
    }
}

/// Discretized linear operator `v ↦ k * (rate · v)` with a frozen spatial
/// rate profile. Used for envelope bounds and spectral-radius estimates.
#[derive(Debug, Clone)]
pub struct LinearOp {
    grid: SpatialGrid,
    weights: QuadratureWeights,
    rate_ext: Vec<f64>,
}

impl LinearOp {
    /// Builds the operator from a rate profile and its limits beyond the grid.
    pub fn new(
        kernel: &Kernel,
        grid: SpatialGrid,
        rate: impl Fn(f64) -> f64,
        rate_minus: f64,
        rate_plus: f64,
    ) -> Result<Self> {
        let weights = kernel.quadrature_weights(grid.spacing())?;
        let rate_ext = extend_profile(grid, weights.half_width, rate, rate_minus, rate_plus);
        if rate_ext.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::invalid("rate", "rate profile must be finite and nonnegative"));
        }
        Ok(LinearOp { grid, weights, rate_ext })
    }

    /// Grid the operator acts on.
    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    /// Applies the linear step.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch("field grid differs from operator grid".into()));
        }
        let j = self.weights.half_width;
        let n = self.grid.len();
        let values = u.values();
        let mut fext = vec![0.0; n + 2 * j];
        for (m, slot) in fext.iter_mut().enumerate() {
            let interior = (m as i64 - j as i64).clamp(0, n as i64 - 1) as usize;
            *slot = self.rate_ext[m] * values[interior];
        }
        Field::from_values(self.grid, convolve(&self.weights, &fext, n))
    }
}

/// Orbit record: selected snapshots plus the sup-norm change of every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    snapshots: Vec<(usize, Field)>,
    deltas: Vec<f64>,
}

impl Trajectory {
    /// Wraps externally produced snapshots (strictly increasing steps, one
    /// shared grid). Per-step deltas are not reconstructed.
    pub fn from_snapshots(snapshots: Vec<(usize, Field)>) -> Result<Trajectory> {
        if snapshots.is_empty() {
            return Err(Error::Precondition("need at least one snapshot".into()));
        }
        if snapshots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Precondition("snapshot steps must be strictly increasing".into()));
        }
        let grid = snapshots[0].1.grid();
        if snapshots.iter().any(|(_, f)| f.grid() != grid) {
            return Err(Error::GridMismatch("snapshots live on different grids".into()));
        }
        Ok(Trajectory { snapshots, deltas: Vec::new() })
    }

    /// Recorded `(step, state)` pairs, in step order; always contains the
    /// initial and final states.
    pub fn snapshots(&self) -> &[(usize, Field)] {
        &self.snapshots
    }

    /// Sup-norm change `‖u_{k} - u_{k-1}‖_∞` for every step `k = 1..`.
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.deltas.len()
    }

    /// Final state.
    pub fn last(&self) -> &Field {
        &self.snapshots.last().unwrap().1
    }

    /// State recorded at `step`, if a snapshot was kept there.
    pub fn snapshot_at(&self, step: usize) -> Option<&Field> {
        self.snapshots
            .iter()
            .find(|(s, _)| *s == step)
            .map(|(_, f)| f)
    }
}

/// Profile values on the extended grid: `minus` beyond the left edge, the
/// interior function inside, `plus` beyond the right edge.
fn extend_profile(
    grid: SpatialGrid,
    half_width: usize,
    f: impl Fn(f64) -> f64,
    minus: f64,
    plus: f64,
) -> Vec<f64> {
    let n = grid.len();
    (0..n + 2 * half_width)
        .map(|m| {
            if m < half_width {
                minus
            } else if m >= n + half_width {
                plus
            } else {
                f(grid.point(m - half_width))
            }
        })
        .collect()
}

/// Convolution against the stencil: `out[i] = Σ_q w[q] fext[i + 2J - q]`.
fn convolve(weights: &QuadratureWeights, fext: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (q, &w) in weights.weights.iter().enumerate() {
        let offset = 2 * weights.half_width - q;
        for (o, f) in out.iter_mut().zip(&fext[offset..offset + n]) {
            *o += w * f;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::habitat::Habitat;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(-20.0, 20.0, 401).unwrap()
    }

    fn identity_op() -> EvolutionOp {
        EvolutionOp::new(
            Habitat::linear(1.0).unwrap(),
            Kernel::gaussian(0.0, 1.0).unwrap(),
            grid(),
        )
        .unwrap()
    }

    #[test]
    fn constants_are_preserved_by_the_neutral_habitat() {
        let op = identity_op();
        let u = Field::constant(grid(), 0.7);
        let v = op.apply(&u).unwrap();
        for &val in v.values() {
            assert_abs_diff_eq!(val, 0.7, epsilon = 1e-14);
        }
    }

    #[test]
    fn linear_habitat_scales_constants_by_its_slope() {
        let op = EvolutionOp::new(
            Habitat::linear(1.6).unwrap(),
            Kernel::gaussian(0.0, 1.0).unwrap(),
            grid(),
        )
        .unwrap();
        let v = op.apply(&Field::constant(grid(), 2.0)).unwrap();
        for &val in v.values() {
            assert_abs_diff_eq!(val, 3.2, epsilon = 1e-13);
        }
    }

    #[test]
    fn drifting_kernel_translates_mass_by_its_mean() {
        let op = EvolutionOp::new(
            Habitat::linear(1.0).unwrap(),
            Kernel::gaussian(2.0, 0.5).unwrap(),
            grid(),
        )
        .unwrap();
        let u = Field::from_fn(grid(), |x| (-x * x).exp());
        let v = op.apply(&u).unwrap();
        let argmax = grid()
            .points()
            .zip(v.values())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_abs_diff_eq!(argmax, 2.0, epsilon = 0.2);
        // With linear growth and a far-away edge, discrete mass is conserved.
        let mass = |f: &Field| f.values().iter().sum::<f64>() * grid().spacing();
        assert_relative_eq!(mass(&v), mass(&u), max_relative = 1e-9);
    }

    #[test]
    fn saturated_state_is_fixed_deep_inside_the_fertile_zone() {
        let op = EvolutionOp::new(
            Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap(),
            Kernel::gaussian(0.0, 1.0).unwrap(),
            grid(),
        )
        .unwrap();
        let v = op.apply(&Field::constant(grid(), 1.0)).unwrap();
        // Where every stencil point has rate >= 1, recruitment at carrying
        // capacity returns the capacity exactly.
        assert_abs_diff_eq!(v.eval(12.0), 1.0, epsilon = 1e-13);
        // On the hostile side the state decays.
        assert!(v.eval(-12.0) < 0.55);
    }

    #[test]
    fn order_is_preserved_for_monotone_habitats() {
        let op = EvolutionOp::new(
            Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap(),
            Kernel::gaussian(0.0, 1.0).unwrap(),
            grid(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..20 {
            let lo = Field::from_fn(grid(), |_| rng.random::<f64>());
            let hi = Field::from_values(
                grid(),
                lo.values().iter().map(|v| v + rng.random::<f64>()).collect(),
            )
            .unwrap();
            let qlo = op.apply(&lo).unwrap();
            let qhi = op.apply(&hi).unwrap();
            for (a, b) in qlo.values().iter().zip(qhi.values()) {
                assert!(a <= b, "order violated: {a} > {b}");
            }
        }
    }

    #[test]
    fn limit_operator_agrees_on_homogeneous_habitats() {
        let op = identity_op();
        let u = Field::from_fn(grid(), |x| 0.5 + 0.3 * (0.4 * x).sin().abs());
        let q = op.apply(&u).unwrap();
        let qm = op.apply_limit(&u, Side::Minus).unwrap();
        let qp = op.apply_limit(&u, Side::Plus).unwrap();
        assert_eq!(q.values(), qm.values());
        assert_eq!(q.values(), qp.values());
    }

    #[test]
    fn envelope_linearization_dominates_the_nonlinear_step() {
        let habitat = Habitat::beverton_holt(0.5, E, 1.0, 1.0).unwrap();
        let kernel = Kernel::gaussian(0.0, 1.0).unwrap();
        let env = crate::habitat::build_envelope(&habitat, 0.1, 1.0).unwrap();
        let op = EvolutionOp::new(habitat, kernel.clone(), grid()).unwrap();
        let lin = LinearOp::new(&kernel, grid(), |x| env.rate(x), env.rate_minus(), env.rate_plus())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u = Field::from_fn(grid(), |_| rng.random::<f64>());
            let q = op.apply(&u).unwrap();
            let l = lin.apply(&u).unwrap();
            for (a, b) in q.values().iter().zip(l.values()) {
                assert!(*a <= b + 1e-12, "envelope undercut the step: {a} > {b}");
            }
        }
    }

    #[test]
    fn iterate_records_snapshots_and_deltas() {
        let op = identity_op();
        let u0 = Field::from_fn(grid(), |x| (-x * x).exp());
        let traj = op.iterate(&u0, 5, 2).unwrap();
        let steps: Vec<usize> = traj.snapshots().iter().map(|(s, _)| *s).collect();
        assert_eq!(steps, vec![0, 2, 4, 5]);
        assert_eq!(traj.deltas().len(), 5);
        assert!(traj.deltas().iter().all(|d| *d > 0.0));
        assert!(traj.snapshot_at(4).is_some());
        assert!(traj.snapshot_at(3).is_none());
        assert_eq!(traj.steps(), 5);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let op = identity_op();
        let other = SpatialGrid::new(0.0, 1.0, 16).unwrap();
        assert!(op.apply(&Field::constant(other, 1.0)).is_err());
        let negative = Field::from_fn(grid(), |x| if x > 0.0 { -1.0 } else { 1.0 });
        assert!(op.apply(&negative).is_err());
        let nan = Field::from_fn(grid(), |x| if x == 0.0 { f64::NAN } else { 1.0 });
        assert!(op.apply(&nan).is_err());
        let u0 = Field::constant(grid(), 1.0);
        assert!(op.iterate(&u0, 3, 0).is_err());
    }
}

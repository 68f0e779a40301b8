//! Randomized invariants.
//!
//! Structural properties that must hold for *any* admissible parameters, not
//! just the tuned examples: interpolation stays inside the data range,
//! kernels keep unit mass after discretization, the log moment function is
//! convex, evolution steps preserve order and subhomogeneity, and windowed
//! suprema never exceed global ones.

use habwave_core::{EvolutionOp, Field, Habitat, Kernel, Side, SpatialGrid};
use proptest::prelude::*;

fn small_grid() -> SpatialGrid {
    SpatialGrid::new(-15.0, 15.0, 151).expect("valid grid")
}

/// Admissible kernel parameters: bounded mean/variance keep the default
/// truncation radius (and hence the stencil) small enough for fast tests.
fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![
        (-2.0..2.0f64, 0.2..2.0f64)
            .prop_map(|(m, v)| Kernel::gaussian(m, v).expect("valid kernel")),
        (0.8..4.0f64, -1.5..1.5f64)
            .prop_map(|(r, s)| Kernel::laplace(r, s).expect("valid kernel")),
    ]
}

fn habitat_strategy() -> impl Strategy<Value = Habitat> {
    prop_oneof![
        (0.1..0.9f64, 1.2..4.0f64, 0.5..2.0f64, 0.5..2.0f64).prop_map(|(rm, rp, k, s)| {
            Habitat::beverton_holt(rm, rp, k, s).expect("valid habitat")
        }),
        (0.5..30.0f64).prop_map(|b| Habitat::gaussian_patch(b).expect("valid habitat")),
        (0.5..30.0f64).prop_map(|b| Habitat::patch_with_ramp(b).expect("valid habitat")),
    ]
}

/// Nonnegative bounded field from a handful of random bump parameters.
fn field_strategy(grid: SpatialGrid) -> impl Strategy<Value = Field> {
    proptest::collection::vec((-12.0..12.0f64, 0.3..4.0f64, 0.0..1.5f64), 1..4).prop_map(
        move |bumps| {
            Field::from_fn(grid, |x| {
                bumps
                    .iter()
                    .map(|(c, w, h)| h * (-((x - c) / w).powi(2)).exp())
                    .sum()
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolation_stays_inside_the_sampled_range(
        xs in proptest::collection::vec(-20.0..20.0f64, 1..20),
        seed in 0u64..1000,
    ) {
        let grid = small_grid();
        let field = Field::from_fn(grid, |x| ((x * 0.37 + seed as f64).sin() + 1.0) * 0.5);
        let lo = field.min_value();
        let hi = field.max_value();
        for x in xs {
            let v = field.eval(x);
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12,
                "eval({x}) = {v} escapes [{lo}, {hi}]");
        }
    }

    #[test]
    fn discretized_kernels_keep_unit_mass(kernel in kernel_strategy(), h in 0.02..0.2f64) {
        let weights = kernel.quadrature_weights(h).expect("weights");
        let mass: f64 = weights.weights.iter().sum();
        prop_assert!((mass - 1.0).abs() < 1e-9, "discrete mass {mass} drifts from 1");
        prop_assert!(weights.weights.iter().all(|w| *w >= 0.0), "negative weight");
    }

    #[test]
    fn log_moment_function_is_convex(kernel in kernel_strategy(), a in -1.5..1.5f64, d in 0.01..0.5f64) {
        // Chord above midpoint, evaluated only where the function exists.
        let (f_lo, f_mid, f_hi) = (
            kernel.log_mgf(a - d),
            kernel.log_mgf(a),
            kernel.log_mgf(a + d),
        );
        if let (Ok(lo), Ok(mid), Ok(hi)) = (f_lo, f_mid, f_hi) {
            prop_assert!(mid <= 0.5 * (lo + hi) + 1e-10,
                "midpoint {mid} above chord {}", 0.5 * (lo + hi));
        }
    }

    #[test]
    fn evolution_steps_preserve_pointwise_order(
        kernel in kernel_strategy(),
        habitat in habitat_strategy(),
        field in field_strategy(small_grid()),
        scale in 0.0..1.0f64,
    ) {
        let grid = small_grid();
        let op = EvolutionOp::new(habitat, kernel, grid).expect("operator");
        let lower = Field::from_fn(grid, |x| field.eval(x) * scale);
        let hi = op.apply(&field).expect("step");
        let lo = op.apply(&lower).expect("step");
        for (a, b) in lo.values().iter().zip(hi.values()) {
            prop_assert!(a <= &(b + 1e-12), "ordered inputs produced unordered outputs");
        }
    }

    #[test]
    fn growth_is_subhomogeneous_on_declared_habitats(
        habitat in habitat_strategy(),
        x in -10.0..10.0f64,
        u in 0.0..5.0f64,
        alpha in 0.01..1.0f64,
    ) {
        // f(x, alpha u) >= alpha f(x, u): scaling down loses no more than the
        // scale factor, which is what squeezes two orbits onto one state.
        let scaled = habitat.f(x, alpha * u);
        let bound = alpha * habitat.f(x, u);
        prop_assert!(scaled >= bound - 1e-12, "f(x, au) = {scaled} < a f(x,u) = {bound}");
    }

    #[test]
    fn windowed_suprema_never_exceed_the_global_one(
        field in field_strategy(small_grid()),
        lo in -20.0..20.0f64,
        len in 0.0..25.0f64,
    ) {
        let sup = field.sup_on(lo, lo + len);
        if sup.points > 0 {
            prop_assert!(sup.value <= field.max_value() + 1e-15);
        }
    }

    #[test]
    fn caps_bound_one_evolution_step(
        kernel in kernel_strategy(),
        habitat in habitat_strategy(),
    ) {
        // Declared caps are invariant: a step from the constant cap stays
        // below the cap, which anchors the monotone descent.
        let grid = small_grid();
        let cap = habitat.caps()[0];
        let op = EvolutionOp::new(habitat, kernel, grid).expect("operator");
        let stepped = op.apply(&Field::constant(grid, cap)).expect("step");
        prop_assert!(stepped.max_value() <= cap * (1.0 + 1e-12),
            "step from cap {cap} reached {}", stepped.max_value());
    }

    #[test]
    fn spreading_speed_grows_with_the_coefficient(
        kernel in kernel_strategy(),
        coef in 1.1..4.0f64,
        bump in 0.05..1.0f64,
    ) {
        use habwave_core::speeds::spreading_speed;
        for side in [Side::Minus, Side::Plus] {
            let base = spreading_speed(coef, &kernel, side).expect("speed");
            let more = spreading_speed(coef + bump, &kernel, side).expect("speed");
            prop_assert!(more.c_star > base.c_star,
                "speed did not grow: {} -> {}", base.c_star, more.c_star);
        }
    }
}

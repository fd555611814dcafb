//! Property tests over randomized sets, points, and rates.

use dynreg_core::geometry::{FeasibleSet, Point};
use dynreg_core::learners::{ogd_step, pa_step, rho};
use dynreg_core::uniclass::UniclassLoss;
use proptest::prelude::*;

fn arb_point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-3.0f64..3.0, dim).prop_map(|v| Point::new(v).unwrap())
}

fn arb_set() -> impl Strategy<Value = FeasibleSet> {
    let ball = (2usize..=4, -1.0f64..1.0, 0.2f64..2.0).prop_map(|(dim, c, r)| {
        FeasibleSet::Ball {
            center: Point::new(vec![c; dim]).unwrap(),
            radius: r,
        }
    });
    let boxes = (2usize..=4, -2.0f64..0.0, 0.1f64..2.0).prop_map(|(dim, lo, width)| {
        FeasibleSet::Box {
            lower: Point::new(vec![lo; dim]).unwrap(),
            upper: Point::new(vec![lo + width; dim]).unwrap(),
        }
    });
    let simplex = (2usize..=5).prop_map(|dimension| FeasibleSet::Simplex { dimension });
    prop_oneof![ball, boxes, simplex]
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_feasible(
        (set, y) in arb_set().prop_flat_map(|s| {
            let dim = s.dim();
            (Just(s), arb_point(dim))
        })
    ) {
        let p = set.project(&y);
        prop_assert!(set.contains(&p, 1e-10));
        prop_assert!(set.project(&p).dist(&p) <= 1e-12);
    }

    #[test]
    fn projection_is_nonexpansive(
        (set, y1, y2) in arb_set().prop_flat_map(|s| {
            let dim = s.dim();
            (Just(s), arb_point(dim), arb_point(dim))
        })
    ) {
        let d_before = y1.dist(&y2);
        let d_after = set.project(&y1).dist(&set.project(&y2));
        prop_assert!(d_after <= d_before + 1e-12);
    }

    #[test]
    fn loss_sits_between_quadratic_envelopes(
        lambda in 0.2f64..4.0,
        x in arb_point(3),
        target in arb_point(3),
    ) {
        let loss = UniclassLoss::scaled_squared(lambda).unwrap();
        let d = x.dist(&target);
        let v = loss.eval(&x, &target);
        prop_assert!(v >= 0.5 * lambda * d * d - 1e-12);
        prop_assert!(v <= 0.5 * lambda * d * d + 1e-12);
    }

    #[test]
    fn contraction_factor_lies_in_unit_interval(
        lambda in 1e-3f64..100.0,
        eta in 1e-3f64..100.0,
    ) {
        let r = rho(lambda, eta).unwrap();
        prop_assert!(r > 0.0 && r < 1.0);
        // Larger rates contract harder.
        let r_slower = rho(lambda, eta * 0.5).unwrap();
        prop_assert!(r <= r_slower + 1e-15);
    }

    #[test]
    fn gradient_step_contracts_distance_to_target(
        (set, x_raw, target_raw) in arb_set().prop_flat_map(|s| {
            let dim = s.dim();
            (Just(s), arb_point(dim), arb_point(dim))
        }),
        lambda in 0.25f64..4.0,
        frac in 0.05f64..1.0,
    ) {
        let x = set.project(&x_raw);
        let target = set.project(&target_raw);
        let loss = UniclassLoss::scaled_squared(lambda).unwrap();
        let eta = frac / lambda; // any admissible rate
        let next = ogd_step(&x, &target, &loss, eta, &set);
        let bound = rho(lambda, eta).unwrap() * x.dist(&target);
        prop_assert!(next.dist(&target) <= bound + 1e-9);
    }

    #[test]
    fn pa_lands_on_the_insensitivity_sphere(
        x in arb_point(3),
        target in arb_point(3),
        epsilon in 0.0f64..1.0,
    ) {
        let d = x.dist(&target);
        let next = pa_step(&x, &target, epsilon);
        if d <= epsilon {
            prop_assert_eq!(next, x);
        } else {
            prop_assert!((next.dist(&target) - epsilon).abs() <= 1e-9);
        }
    }
}

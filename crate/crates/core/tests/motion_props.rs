use pareanim_core::field::{FlowGrid, InverseMotionField, MotionField};
use pareanim_core::motion::{
    decay, first_order_fill, invert_field, motion_mask, DecayConfig, DEFAULT_M_EPS, DEFAULT_W_MIN,
};
use proptest::prelude::*;

type Affine = [f64; 6];

fn eval(a: &Affine, x: f64, y: f64) -> [f64; 2] {
    [a[0] * x + a[1] * y + a[2], a[3] * x + a[4] * y + a[5]]
}

fn affine() -> impl Strategy<Value = Affine> {
    (
        prop::array::uniform2(-0.08..0.08f64),
        -4.0..4.0f64,
        prop::array::uniform2(-0.08..0.08f64),
        -4.0..4.0f64,
    )
        .prop_map(|(r0, b0, r1, b1)| [r0[0], r0[1], b0, r1[0], r1[1], b1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decay_is_bounded_and_peaked(kind in prop::sample::select(vec!["linear", "sine"]), lo in 0.05..0.95f64, hi in 1.05..4.0f64, omega in 0.01..6.0f64) {
        let cfg = DecayConfig { kind: kind.into(), omega_min: lo, omega_max: hi };
        let v = decay(omega, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(decay(1.0, &cfg).unwrap(), 1.0);
        if omega < lo || omega > hi {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn inverse_composes_to_identity(a in affine()) {
        let (w, h) = (96usize, 80usize);
        let field = MotionField(FlowGrid::from_fn(w, h, |x, y| eval(&a, x as f64, y as f64)));
        let inv = invert_field(&field, DEFAULT_W_MIN).unwrap();
        let mut good = 0;
        for y in 0..h {
            for x in 0..w {
                if !inv.is_valid(x, y) {
                    continue;
                }
                let v = inv.get(x, y);
                let (sx, sy) = (x as f64 + v[0] as f64, y as f64 + v[1] as f64);
                let f = eval(&a, sx, sy);
                let err = (sx + f[0] - x as f64).hypot(sy + f[1] - y as f64);
                if err <= 0.5 {
                    good += 1;
                }
            }
        }
        prop_assert!(good as f64 >= 0.99 * inv.valid_count() as f64);
    }

    #[test]
    fn affine_holes_fill_exactly(a in affine(), cx in 10.0..50.0f64, cy in 10.0..50.0f64, r in 1.0..8.0f64, step in 1usize..=2) {
        let mut g = FlowGrid::from_fn(64, 64, |x, y| eval(&a, x as f64, y as f64));
        for y in 0..64 {
            for x in 0..64 {
                if (x as f64 - cx).hypot(y as f64 - cy) <= r {
                    g.invalidate(x, y);
                }
            }
        }
        let out = first_order_fill(&InverseMotionField(g), step).unwrap();
        prop_assert_eq!(out.unreachable, 0);
        for y in 0..64 {
            for x in 0..64 {
                let e = eval(&a, x as f64, y as f64);
                let v = out.field.get(x, y);
                prop_assert!((v[0] as f64 - e[0]).abs() <= 1e-3 && (v[1] as f64 - e[1]).abs() <= 1e-3);
            }
        }
    }
}

#[test]
fn identity_field_has_empty_mask() {
    let inv = invert_field(&MotionField(FlowGrid::zeros(40, 30, true)), DEFAULT_W_MIN).unwrap();
    let filled = first_order_fill(&inv, 2).unwrap();
    assert!(motion_mask(&filled.field, DEFAULT_M_EPS).is_zero());
}

#[test]
fn mask_marks_exactly_the_moved_pixels() {
    let inv = InverseMotionField(FlowGrid::from_fn(32, 32, |x, y| {
        if x > 10 && y < 20 {
            [0.0, 2e-4]
        } else if x == 3 {
            [5e-5, 0.0]
        } else {
            [0.0, 0.0]
        }
    }));
    let mask = motion_mask(&inv, DEFAULT_M_EPS);
    for y in 0..32 {
        for x in 0..32 {
            assert_eq!(mask.get(x, y), x > 10 && y < 20);
        }
    }
}

#[test]
fn neighbouring_holes_fill_exactly() {
    let a = [0.05, -0.03, 1.5, 0.02, 0.07, -2.0];
    let mut g = FlowGrid::from_fn(48, 48, |x, y| eval(&a, x as f64, y as f64));
    // two holes separated by a one-pixel valid column
    for y in 10..30 {
        for x in (12..20).chain(21..29) {
            g.invalidate(x, y);
        }
    }
    for step in [1, 2] {
        let out = first_order_fill(&InverseMotionField(g.clone()), step).unwrap();
        assert_eq!(out.unreachable, 0);
        for y in 0..48 {
            for x in 0..48 {
                let e = eval(&a, x as f64, y as f64);
                let v = out.field.get(x, y);
                assert!(
                    (v[0] as f64 - e[0]).abs() <= 1e-3 && (v[1] as f64 - e[1]).abs() <= 1e-3,
                    "({x}, {y})"
                );
            }
        }
    }
}

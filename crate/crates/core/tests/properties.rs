use std::sync::OnceLock;

use proptest::prelude::*;
use satfront::*;

fn front() -> &'static WaveProfile {
    static FRONT: OnceLock<WaveProfile> = OnceLock::new();
    FRONT.get_or_init(|| {
        let r = BistableReaction::cubic(0.4).unwrap();
        bistable_front(&r, &SaturatingFlux::mean_curvature(), 0.02, &ProfileOptions::default()).unwrap().1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubic_scalars_have_closed_forms(a in 0.01f64..0.49) {
        let r = BistableReaction::cubic(a).unwrap();
        prop_assert!((r.eps_bar() - a.powi(3) * (2.0 - a) / 12.0).abs() < 1e-15);
        prop_assert!((r.f_minus(a) - r.eps_bar()).abs() < 1e-15);
        // F(v₀) = 0 with v₀ the smaller root of s²/4 - (1 + a)s/3 + a/2
        let (b, c) = (-(1.0 + a) / 3.0, a / 2.0);
        let v0 = 2.0 * (-b - (b * b - c).sqrt());
        prop_assert!((r.v_zero() - v0).abs() < 1e-12);
        prop_assert!(r.primitive(r.v_zero()).abs() < 1e-15);
        prop_assert!((r.f_prime_alpha() - a * (1.0 - a)).abs() < 1e-15);
    }

    #[test]
    fn primitives_add_up_to_the_total(a in 0.05f64..0.45, s in 0.0f64..1.0) {
        let r = BistableReaction::cubic(a).unwrap();
        prop_assert!((r.f_plus(s) - r.f_minus(s) - r.total_integral()).abs() < 1e-15);
        prop_assert!(r.f_plus(s) >= -1e-18);
    }

    #[test]
    fn jump_endpoints_solve_both_levels(a in 0.1f64..0.45, t in 0.01f64..0.99) {
        let r = BistableReaction::cubic(a).unwrap();
        let level = t * r.eps_bar();
        let (vm, vp) = jump_endpoints(&r, level).unwrap();
        prop_assert!(0.0 < vm && vm < a && a < vp && vp < 1.0);
        prop_assert!((r.f_minus(vm) - level).abs() < 1e-15);
        prop_assert!((r.f_plus(vp) - level).abs() < 1e-15);
    }

    #[test]
    fn mean_curvature_flux_inverts(y in -0.999f64..0.999) {
        let fl = SaturatingFlux::mean_curvature();
        let t = fl.r(y);
        prop_assert!((fl.q(t) - y).abs() < 1e-12 * (1.0 + t.abs()));
        prop_assert_eq!(fl.r(-y), -t);
        prop_assert!(fl.p(t).abs() < 1.0);
    }

    #[test]
    fn power_flux_is_odd_and_bounded(m in 1.2f64..4.0, delta in 0.2f64..5.0, s in -50.0f64..50.0) {
        let fl = SaturatingFlux::power(m, delta).unwrap();
        prop_assert_eq!(fl.p(-s), -fl.p(s));
        prop_assert!(fl.p(s).abs() <= delta.powf(-0.5) * (1.0 + 1e-12));
    }

    #[test]
    fn zero_speed_shots_follow_the_primitive(eps in 0.03f64..1.0) {
        let r = BistableReaction::cubic(0.4).unwrap();
        let fl = SaturatingFlux::mean_curvature();
        let field = ReducedField::new(&r, &fl, eps, 0.0).unwrap();
        let t = shoot(&field, 0.0, Direction::Forward, 1.0, &ShootOptions::default()).unwrap();
        for (v, y) in t.samples() {
            prop_assert!((y - r.f_minus(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn pairing_scales_with_the_test_function(center in -1.5f64..1.5, width in 0.2f64..3.0, k in -4.0f64..4.0) {
        let p = front();
        let base = Bump::new(center, width);
        let one = distributional_pairing(p, &base).unwrap();
        let scaled = distributional_pairing(p, &Bump { scale: k, ..base }).unwrap();
        prop_assert!((scaled - k * one).abs() < 1e-12 * (1.0 + one.abs()));
        // an increasing front pairs positively with a nonnegative bump
        prop_assert!(one > 0.0);
    }
}

use satfront::shooting::{self, Classification, MonostableMode, Regime, SpeedKind};
use satfront::*;

fn setup() -> (BistableReaction, SaturatingFlux) {
    (BistableReaction::cubic(0.4).unwrap(), SaturatingFlux::mean_curvature())
}

#[test]
fn critical_speed_at_one_hundredth() {
    let (r, fl) = setup();
    let s = shooting::critical_speed_bistable(&r, &fl, 0.01, 1e-9, &ShootOptions::default()).unwrap();
    assert_eq!(s.kind, SpeedKind::BistableStar);
    assert_eq!(s.regime, Regime::RegularFront);
    assert!((s.value - 6.3255e-4).abs() < 1e-7, "{}", s.value);
    assert!(s.bracket[0] <= s.value && s.value <= s.bracket[1]);
    assert!(s.bracket[1] - s.bracket[0] <= 1e-9);
}

#[test]
fn critical_speed_grows_with_eps() {
    let (r, fl) = setup();
    let speeds: Vec<f64> = [0.009, 0.02, 0.05, 0.2]
        .iter()
        .map(|&e| shooting::critical_speed_bistable(&r, &fl, e, 1e-10, &ShootOptions::default()).unwrap().value)
        .collect();
    assert!(speeds.windows(2).all(|w| w[0] < w[1]), "{speeds:?}");
}

#[test]
fn speeds_do_not_depend_on_solver_tolerance() {
    let (r, fl) = setup();
    let o = ShootOptions::default();
    let a = shooting::critical_speed_bistable(&r, &fl, 0.03, 1e-11, &o).unwrap().value;
    let b = shooting::critical_speed_bistable(&r, &fl, 0.03, 1e-11, &o.halved().halved()).unwrap().value;
    assert!((a - b).abs() / a < 1e-5, "{a} vs {b}");
}

#[test]
fn below_threshold_is_a_steady_state() {
    let (r, fl) = setup();
    let eb = shooting::eps_threshold(&r, &fl);
    assert!((eb - 32.0 / 3750.0).abs() < 1e-15);
    for eps in [0.001, 0.005, 0.0085] {
        let s = shooting::critical_speed_bistable(&r, &fl, eps, 1e-8, &ShootOptions::default()).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.regime, Regime::DiscontinuousSteadyState);
    }
}

#[test]
fn zero_speed_classification_follows_the_energy() {
    let (r, fl) = setup();
    let o = ShootOptions::default();
    // F⁻ stays below εM0 = 0.5 and returns to zero at v₀ = 2/3
    let wide = ReducedField::new(&r, &fl, 0.5, 0.0).unwrap();
    let Classification::TooLow { v_star } = shooting::classify_bistable(&wide, &o).unwrap() else { panic!() };
    assert!((v_star - 2.0 / 3.0).abs() < 1e-8);
    // F⁻ reaches εM0 before α
    let narrow = ReducedField::new(&r, &fl, 0.005, 0.0).unwrap();
    assert_eq!(shooting::classify_bistable(&narrow, &o).unwrap(), Classification::TooHigh);
}

#[test]
fn monostable_modes_agree_on_the_closed_form() {
    let (r, fl) = setup();
    let o = ShootOptions::default();
    for eps in [0.5, 0.05, 0.01, 0.001] {
        let closed = 2.0 * (0.24f64 * eps).sqrt();
        let lin = shooting::critical_speed_monostable(&r, &fl, eps, MonostableMode::Linearized, &o).unwrap();
        assert!((lin.value - closed).abs() <= 1e-14 * closed);
        assert_eq!(lin.ipof_holds, Some(false));
        let shot = shooting::critical_speed_monostable(&r, &fl, eps, MonostableMode::Shooting { rel_tol: 1e-9 }, &o).unwrap();
        // landing on the double root at α is only resolved to ~1e-5
        assert!((shot.value - closed).abs() / closed < 1e-4, "eps {eps}: {} vs {closed}", shot.value);
    }
}

#[test]
fn require_ipof_rejects_a_cubic_above_its_tangent() {
    let (r, fl) = setup();
    let err = shooting::critical_speed_monostable(&r, &fl, 0.01, MonostableMode::RequireIpof, &ShootOptions::default())
        .unwrap_err();
    assert_eq!(err.kind(), "ipof");
}

#[test]
fn monostable_speed_scales_with_square_root_of_eps() {
    let (r, fl) = setup();
    let o = ShootOptions::default();
    let k: Vec<f64> = [0.2, 0.02, 0.002]
        .iter()
        .map(|&e| {
            shooting::critical_speed_monostable(&r, &fl, e, MonostableMode::Shooting { rel_tol: 1e-9 }, &o).unwrap().value
                / f64::sqrt(e)
        })
        .collect();
    assert!(k.iter().all(|x| (x - k[0]).abs() < 1e-4 * k[0]), "{k:?}");
}

#[test]
fn bad_inputs_are_domain_errors() {
    let (r, fl) = setup();
    let o = ShootOptions::default();
    assert_eq!(shooting::critical_speed_bistable(&r, &fl, -1.0, 1e-8, &o).unwrap_err().kind(), "domain");
    assert!(ReducedField::new(&r, &fl, 0.0, 0.1).is_err());
    let field = ReducedField::new(&r, &fl, 0.1, 0.1).unwrap();
    assert!(shoot(&field, 0.5, Direction::Forward, 0.2, &o).is_err());
    assert!(shoot(&field, 1.5, Direction::Backward, 0.2, &o).is_err());
}

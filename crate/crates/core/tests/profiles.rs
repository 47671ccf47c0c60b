use satfront::limits::{step_target, sup_outside, FrontFamily};
use satfront::profiles::{Monotonicity, ProfileMeta};
use satfront::shooting::{self, MonostableMode};
use satfront::*;

fn setup() -> (BistableReaction, SaturatingFlux) {
    (BistableReaction::cubic(0.4).unwrap(), SaturatingFlux::mean_curvature())
}

/// Least-squares slope of `ln g(v)` against `z` over samples with `g` in `[lo, hi]`.
fn log_slope(p: &WaveProfile, g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> =
        p.samples().filter(|&(_, v, _, _)| (lo..=hi).contains(&g(v))).map(|(z, v, _, _)| (z, g(v).ln())).collect();
    assert!(pts.len() > 10, "only {} tail samples", pts.len());
    let n = pts.len() as f64;
    let (mz, ml) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let cov: f64 = pts.iter().map(|p| (p.0 - mz) * (p.1 - ml)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mz).powi(2)).sum();
    cov / var
}

/// Roots of `ε λ² - c λ + f'(q) = 0`, the linearization at an equilibrium `q`.
fn rates(eps: f64, c: f64, fq: f64) -> (f64, f64) {
    let d = (c * c - 4.0 * eps * fq).sqrt();
    ((c - d) / (2.0 * eps), (c + d) / (2.0 * eps))
}

#[test]
fn monostable_tails_follow_the_linearization() {
    let (r, fl) = setup();
    let (eps, c) = (0.01, 0.2);
    let p = monostable_front(&r, &fl, eps, c, &ProfileOptions::default()).unwrap();
    // toward α the slow root dominates; toward 1 the negative root
    let left = log_slope(&p, |v| v - 0.4, 1e-7, 1e-5);
    let right = log_slope(&p, |v| 1.0 - v, 1e-7, 1e-5);
    let (slow, _) = rates(eps, c, 0.24);
    let (neg, _) = rates(eps, c, -0.6);
    assert!((left - slow).abs() < 0.01 * slow, "{left} vs {slow}");
    assert!((right - neg).abs() < 0.01 * neg.abs(), "{right} vs {neg}");
}

#[test]
fn bistable_tails_follow_the_linearization() {
    let (r, fl) = setup();
    let eps = 0.05;
    let (speed, p) = bistable_front(&r, &fl, eps, &ProfileOptions::default()).unwrap();
    let c = speed.value;
    let left = log_slope(&p, |v| v, 1e-7, 1e-5);
    let right = log_slope(&p, |v| 1.0 - v, 1e-7, 1e-5);
    let (_, pos) = rates(eps, c, -0.4);
    let (neg, _) = rates(eps, c, -0.6);
    assert!((left - pos).abs() < 0.01 * pos, "{left} vs {pos}");
    assert!((right - neg).abs() < 0.01 * neg.abs(), "{right} vs {neg}");
}

#[test]
fn fronts_are_monotone_and_normalized() {
    let (r, fl) = setup();
    let o = ProfileOptions::default();
    let m = monostable_front(&r, &fl, 0.05, 0.3, &o).unwrap();
    assert!((m.value_at(0.0) - 0.7).abs() < 1e-9);
    let (_, b) = bistable_front(&r, &fl, 0.05, &o).unwrap();
    assert!((b.value_at(0.0) - 0.5).abs() < 1e-9);
    for p in [&m, &b] {
        assert_eq!(p.kind, ProfileKind::RegularFront);
        let v: Vec<f64> = p.samples().map(|s| s.1).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(p.window, (-o.window, o.window));
        // end values are continued outside the samples
        assert!((p.value_at(1e3) - 1.0).abs() < 1e-7);
    }
}

#[test]
fn speeds_below_the_threshold_are_refused() {
    let (r, fl) = setup();
    let c_plus = shooting::critical_speed_monostable(&r, &fl, 0.05, MonostableMode::Linearized, &ShootOptions::default())
        .unwrap()
        .value;
    let err = monostable_front(&r, &fl, 0.05, 0.9 * c_plus, &ProfileOptions::default()).unwrap_err();
    assert_eq!(err.kind(), "regime");
}

/// `z(v) = -∫_v^{v⁻} ds / R(F⁻(s)/ε)` on the left branch of a steady state.
fn steady_left_z(r: &BistableReaction, eps: f64, v: f64, v_minus: f64) -> f64 {
    let rr = |u: f64| (u * (2.0 - u)).sqrt() / (1.0 - u);
    let g = |s: f64| 1.0 / rr((r.f_minus(s) / eps).min(1.0));
    let n = 20_000;
    let h = (v_minus - v) / n as f64;
    let mut sum = g(v) + g(v_minus);
    for k in 1..n {
        sum += if k % 2 == 1 { 4.0 } else { 2.0 } * g(v + k as f64 * h);
    }
    -sum * h / 3.0
}

#[test]
fn steady_state_matches_quadrature_of_its_branches() {
    let (r, fl) = setup();
    let eps = 0.004;
    let p = build_discontinuous_steady(&r, eps, &fl, &ProfileOptions::default()).unwrap();
    assert_eq!(p.kind, ProfileKind::DiscontinuousSteady);
    let j = p.jump.unwrap();
    assert!((r.f_minus(j.v_minus) - eps).abs() < 1e-14);
    assert!((r.f_plus(j.v_plus) - eps).abs() < 1e-14);
    for frac in [0.3, 0.6, 0.9] {
        let v = frac * j.v_minus;
        let z = steady_left_z(&r, eps, v, j.v_minus);
        assert!((p.value_at(z) - v).abs() < 1e-6, "v = {v}, z = {z}: {}", p.value_at(z));
    }
    assert!((p.value_at(-1e-12) - j.v_minus).abs() < 1e-6);
    assert!((p.value_at(0.0) - j.v_plus).abs() < 1e-6);
}

#[test]
fn steady_distance_to_the_step_is_bounded_by_the_jump() {
    let (r, fl) = setup();
    let o = ProfileOptions::default();
    for eps in [0.008, 0.004, 0.001] {
        let p = build_discontinuous_steady(&r, eps, &fl, &o).unwrap();
        let j = p.jump.unwrap();
        let d = sup_outside(&p, &step_target(&r, FrontFamily::Bistable), 0.5);
        assert!(d <= j.v_minus.max(1.0 - j.v_plus) + 1e-9, "eps {eps}: {d}");
    }
}

#[test]
fn border_steady_state_and_out_of_range_eps() {
    let (r, fl) = setup();
    let o = ProfileOptions::default();
    let p = build_discontinuous_steady(&r, r.eps_bar(), &fl, &o).unwrap();
    assert_eq!(p.kind, ProfileKind::BorderSteady);
    assert!((p.jump.unwrap().v_minus - 0.4).abs() < 1e-12);
    assert_eq!(build_discontinuous_steady(&r, 0.02, &fl, &o).unwrap_err().kind(), "domain");
}

#[test]
fn inviscid_front_solves_its_first_order_equation() {
    let (r, _) = setup();
    let c = 0.2;
    let p = inviscid_front(&r, c, &ProfileOptions::default()).unwrap();
    assert_eq!(p.kind, ProfileKind::Inviscid);
    assert!((p.value_at(0.0) - 0.7).abs() < 1e-9);
    let h = 1e-4;
    for z in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        let dv = (p.value_at(z + h) - p.value_at(z - h)) / (2.0 * h);
        assert!((c * dv - r.f(p.value_at(z))).abs() < 1e-6, "z = {z}");
    }
}

#[test]
fn glued_wave_is_continuous_and_alternates() {
    let (r, fl) = setup();
    let eps = 0.05;
    let so = ShootOptions::default();
    let star = shooting::critical_speed_bistable(&r, &fl, eps, 1e-10, &so).unwrap().value;
    let plus = shooting::linear_speed(r.f_prime_alpha(), &fl, eps);
    let c = 0.5 * (star + plus);
    let p = glue_nonmonotone(&r, &fl, eps, c, GlueStart::FromOne, 5, &ProfileOptions::default()).unwrap();
    assert_eq!(p.kind, ProfileKind::Nonmonotone);
    assert_eq!(p.pieces.len(), p.junctions.len() + 1);
    for w in p.pieces.windows(2) {
        assert_ne!(w[0].monotonicity, w[1].monotonicity);
        let (a, b) = (w[0].v[w[0].len() - 1], w[1].v[0]);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    // the first zero sits at z = 0
    assert!((p.value_at(0.0) - p.zeros[0]).abs() < 1e-9);
    assert!(p.pieces.iter().any(|q| q.monotonicity == Monotonicity::Decreasing));
}

#[test]
fn glue_from_zero_between_the_speeds_blows_up() {
    let (r, fl) = setup();
    let eps = 0.05;
    let star = shooting::critical_speed_bistable(&r, &fl, eps, 1e-10, &ShootOptions::default()).unwrap().value;
    let plus = shooting::linear_speed(r.f_prime_alpha(), &fl, eps);
    let err = glue_nonmonotone(&r, &fl, eps, 0.5 * (star + plus), GlueStart::FromZero, 4, &ProfileOptions::default())
        .unwrap_err();
    assert_eq!(err.kind(), "regime");
}

#[test]
fn csv_and_metadata_describe_the_same_profile() {
    let (r, fl) = setup();
    let p = monostable_front(&r, &fl, 0.1, 0.4, &ProfileOptions::default()).unwrap();
    let csv = p.to_csv();
    let n = p.samples().count();
    assert_eq!(csv.lines().count(), n + 1);
    assert!(csv.starts_with("z,v,piece_index,monotonicity\n"));
    let meta = p.meta(Some(p.residual(&r, &fl)));
    let back: ProfileMeta = serde_json::from_str(&serde_json::to_string(&meta).unwrap()).unwrap();
    assert_eq!(back.z_range, p.z_range());
    assert_eq!(back.kind, ProfileKind::RegularFront);
    assert!(back.residual.unwrap().max_abs < 1e-4);
}

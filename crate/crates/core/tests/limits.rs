use satfront::limits::{energy_report, FrontFamily, Metric, TestFunction, MONOTONE_SLACK};
use satfront::*;

fn setup() -> (BistableReaction, SaturatingFlux) {
    (BistableReaction::cubic(0.4).unwrap(), SaturatingFlux::mean_curvature())
}

fn curvature_r(u: f64) -> f64 {
    let u = u.min(1.0);
    (u * (2.0 - u)).sqrt() / (1.0 - u)
}

/// `∫ ψ(z(v)) dv` along one branch of a zero-speed steady state, with `z(v)`
/// from `dz/dv = 1/R(y(v)/ε)`. The branch starts at `v_start` (where `z = 0`)
/// and runs toward the equilibrium `v_end`; `x = ln|v - v_end|` is the
/// integration variable so the logarithmic tail is resolved.
fn branch_integral(y: impl Fn(f64) -> f64, eps: f64, v_start: f64, v_end: f64, psi: &Bump) -> f64 {
    let sign = (v_start - v_end).signum();
    let v_of = |x: f64| v_end + sign * x.exp();
    let (x0, x1) = ((v_start - v_end).abs().ln(), (v_start - v_end).abs().ln() - 40.0);
    let n = 400_000;
    let h = (x1 - x0) / n as f64;
    // dz/dx = (dv/dx) / R = sign·eˣ / R
    let dz = |x: f64| sign * x.exp() / curvature_r(y(v_of(x)) / eps);
    let (mut z, mut total) = (0.0, 0.0);
    let mut prev = (dz(x0), psi.value(0.0) * x0.exp());
    for k in 1..=n {
        let x = x0 + k as f64 * h;
        let d = dz(x);
        z += 0.5 * (prev.0 + d) * h;
        let g = psi.value(z) * x.exp();
        total += 0.5 * (prev.1 + g) * h.abs();
        prev = (d, g);
    }
    total
}

#[test]
fn steady_state_pairing_matches_branch_quadrature() {
    let (r, fl) = setup();
    let eps = 0.004;
    // off-center, so a mirrored branch would show up
    let psi = Bump::new(0.2, 0.9);
    let p = build_discontinuous_steady(&r, eps, &fl, &ProfileOptions::default()).unwrap();
    let j = p.jump.unwrap();
    let left = branch_integral(|v| r.f_minus(v), eps, j.v_minus, 0.0, &psi);
    let right = branch_integral(|v| r.f_plus(v), eps, j.v_plus, 1.0, &psi);
    let exact = left + (j.v_plus - j.v_minus) * psi.value(0.0) + right;
    let got = distributional_pairing(&p, &psi).unwrap();
    assert!((got - exact).abs() < 1e-7, "{got} vs {exact}");
    let mirrored = Bump::new(-0.2, 0.9);
    assert!((distributional_pairing(&p, &mirrored).unwrap() - got).abs() > 1e-4);
}

struct Sum<'a>(&'a Bump, &'a Bump, f64);

impl TestFunction for Sum<'_> {
    fn support(&self) -> (f64, f64) {
        let (a, b) = (self.0.support(), self.1.support());
        (a.0.min(b.0), a.1.max(b.1))
    }
    fn value(&self, z: f64) -> f64 {
        self.0.value(z) + self.2 * self.1.value(z)
    }
    fn derivative(&self, z: f64) -> f64 {
        self.0.derivative(z) + self.2 * self.1.derivative(z)
    }
}

#[test]
fn pairing_is_linear_in_the_test_function() {
    let (r, fl) = setup();
    let (_, p) = bistable_front(&r, &fl, 0.02, &ProfileOptions::default()).unwrap();
    let (a, b) = (Bump::new(-0.3, 0.8), Bump::new(0.5, 1.5));
    let pa = distributional_pairing(&p, &a).unwrap();
    let pb = distributional_pairing(&p, &b).unwrap();
    let sum = distributional_pairing(&p, &Sum(&a, &b, -2.5)).unwrap();
    assert!((sum - (pa - 2.5 * pb)).abs() < 1e-12);
    let doubled = distributional_pairing(&p, &Bump { scale: 2.0, ..a }).unwrap();
    assert!((doubled - 2.0 * pa).abs() < 1e-12);
}

#[test]
fn pairing_vanishes_where_the_front_is_flat() {
    let (r, fl) = setup();
    let (_, p) = bistable_front(&r, &fl, 0.001, &ProfileOptions::default()).unwrap();
    let away = distributional_pairing(&p, &Bump::new(3.0, 1.5)).unwrap();
    assert!(away.abs() < 1e-9, "{away}");
}

#[test]
fn pairing_outside_the_window_is_an_error() {
    let (r, fl) = setup();
    let p = build_discontinuous_steady(&r, 0.004, &fl, &ProfileOptions::default()).unwrap();
    let err = distributional_pairing(&p, &Bump::new(49.5, 1.0)).unwrap_err();
    assert_eq!(err.kind(), "window");
}

#[test]
fn bistable_pairings_approach_the_delta() {
    let (r, fl) = setup();
    let rep = pairing_convergence(&r, &fl, FrontFamily::Bistable, &[0.05, 0.005, 0.0005], &Bump::default(), &ProfileOptions::default())
        .unwrap();
    assert_eq!(rep.metric, Metric::DistributionalPairing);
    assert!((rep.limit_value.unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    assert!(rep.is_strictly_decreasing(), "{:?}", rep.values);
    assert!(rep.final_distance() < 0.001 * rep.limit_value.unwrap());
}

#[test]
fn bistable_fronts_approach_the_step() {
    let (r, fl) = setup();
    let grid = [0.1, 0.01, 0.008, 0.005, 0.001, 0.0005];
    let rep = critical_front_convergence(&r, &fl, FrontFamily::Bistable, &grid, 0.5, &ProfileOptions::default()).unwrap();
    assert!(rep.is_monotone(MONOTONE_SLACK));
    assert!(rep.final_distance() < 0.02);
    assert_eq!(rep.to_csv().lines().count(), grid.len() + 1);
    let header: serde_json::Value = serde_json::from_str(&rep.header_json().unwrap()).unwrap();
    assert_eq!(header["metric"], "sup_outside_i0");
    assert_eq!(header["i0_halfwidth"], 0.5);
}

#[test]
fn monostable_fronts_at_fixed_speed_approach_the_inviscid_front() {
    let (r, fl) = setup();
    let o = ProfileOptions::default();
    let z = numeric::linspace(-5.0, 5.0, 401);
    let rep = fixed_speed_convergence(&r, &fl, 0.2, &[0.04, 0.02, 0.01, 0.005], &z, &o).unwrap();
    assert!(rep.is_strictly_decreasing(), "{:?}", rep.values);
    // the gap closes roughly linearly in ε
    let v = &rep.values;
    assert!(v[v.len() - 1] < 0.2 * v[0]);
    for e in rep.energies.unwrap() {
        assert!((e - 0.0252).abs() < 1e-4);
    }
    // both sides share the normalization at z = 0
    let at_zero = fixed_speed_convergence(&r, &fl, 0.2, &[0.01], &[0.0], &o).unwrap();
    assert!(at_zero.values[0] < 1e-9);
}

#[test]
fn fixed_speed_below_threshold_is_a_regime_error() {
    let (r, fl) = setup();
    let err = fixed_speed_convergence(&r, &fl, 0.1, &[0.05, 0.01], &[0.0], &ProfileOptions::default()).unwrap_err();
    assert_eq!(err.kind(), "regime");
}

#[test]
fn energy_report_targets_the_reaction_drop() {
    let (r, fl) = setup();
    let rep = energy_report(&r, &fl, 0.3, &[0.05, 0.01], &ProfileOptions::default()).unwrap();
    assert!((rep.limit_value.unwrap() - 0.0252).abs() < 1e-14);
    assert!(rep.distances().iter().all(|d| *d < 1e-4), "{:?}", rep.values);
}

#[test]
fn speed_sweep_above_threshold() {
    let (r, fl) = setup();
    let eb = r.eps_bar();
    let grid: Vec<f64> = [1.0, 0.3, 0.1].iter().map(|d| eb * (1.0 + d)).collect();
    let sweep = speed_sweep(&r, &fl, &grid, 1e-10, &ProfileOptions::default()).unwrap();
    assert!(sweep.critical_vanishes(0.3));
    assert!(sweep.sqrt_scaling_spread() < 1e-4);
    let below = speed_sweep(&r, &fl, &[0.01, eb], 1e-8, &ProfileOptions::default()).unwrap_err();
    assert_eq!(below.kind(), "domain");
}

#[test]
fn grids_must_decrease() {
    let (r, fl) = setup();
    let o = ProfileOptions::default();
    for grid in [&[][..], &[0.01, 0.02][..], &[0.01, -0.001][..]] {
        let err = critical_front_convergence(&r, &fl, FrontFamily::Bistable, grid, 0.5, &o).unwrap_err();
        assert_eq!(err.kind(), "domain");
    }
}

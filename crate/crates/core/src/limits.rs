//! Vanishing-diffusion experiments: fronts at fixed speed tend to the
//! inviscid front, critical fronts tend to step functions, their derivatives
//! to multiples of δ₀, and the critical speed vanishes at the threshold.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::SaturatingFlux;
use crate::error::{Error, Result};
use crate::numeric;
use crate::profiles::{bistable_front, inviscid_front, monostable_front, ProfileOptions, WaveProfile};
use crate::reaction::{BistableReaction, Reaction};
use crate::shooting::{self, MonostableMode};

/// Number of points of the sup-distance grid.
pub const SUP_POINTS: usize = 2001;

/// Relative slack allowed when checking that a report converges.
pub const MONOTONE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SupOutsideI0,
    DistributionalPairing,
    Speed,
    EnergyIdentity,
}

/// Which critical front a step-function experiment follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontFamily {
    /// `V⁺_ε` from α to 1 at `c⁺_ε`, tending to `H_α`.
    Monostable,
    /// `V*_ε` from 0 to 1 at `c*_ε`, tending to `H₀`.
    Bistable,
}

/// One quantity along a decreasing grid of ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub eps_grid: Vec<f64>,
    pub metric: Metric,
    pub values: Vec<f64>,
    /// Description of the limit object.
    pub limit_target: String,
    /// Numeric limit of `values`, when there is one.
    pub limit_value: Option<f64>,
    pub i0_halfwidth: Option<f64>,
    /// Evaluation points in `z`, when the metric uses a fixed grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z_grid: Vec<f64>,
    /// `c ∫ (v')²` per ε, when the fronts carry it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
}

impl ConvergenceReport {
    /// `|value - limit|` per ε (the values themselves without a numeric limit).
    pub fn distances(&self) -> Vec<f64> {
        let l = self.limit_value.unwrap_or(0.0);
        self.values.iter().map(|v| (v - l).abs()).collect()
    }

    /// Whether the distances to the limit are nonincreasing within a
    /// relative `slack`, ignoring the first step.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let d = self.distances();
        d.windows(2).skip(1).all(|w| w[1] <= w[0] * (1.0 + slack))
    }

    /// Whether the distances strictly decrease along the whole grid.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.distances().windows(2).all(|w| w[1] < w[0])
    }

    /// Distance to the limit at the smallest ε.
    pub fn final_distance(&self) -> f64 {
        self.distances().last().copied().unwrap_or(f64::NAN)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,value\n");
        for (e, v) in self.eps_grid.iter().zip(&self.values) {
            let _ = writeln!(s, "{e:.16e},{v:.16e}");
        }
        s
    }

    /// Metadata without the values.
    pub fn header_json(&self) -> Result<String> {
        let header = serde_json::json!({
            "metric": self.metric,
            "target": self.limit_target,
            "limit_value": self.limit_value,
            "i0_halfwidth": self.i0_halfwidth,
            "eps_grid": self.eps_grid,
            "z_grid": if self.z_grid.is_empty() { None } else { Some((self.z_grid[0], self.z_grid[self.z_grid.len() - 1], self.z_grid.len())) },
        });
        Ok(serde_json::to_string_pretty(&header)?)
    }
}

fn check_grid(eps_grid: &[f64]) -> Result<()> {
    if eps_grid.is_empty() {
        return Err(Error::Domain("empty eps grid".into()));
    }
    if eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Domain("eps values must be positive and finite".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps grid must be strictly decreasing".into()));
    }
    Ok(())
}

fn check_values(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Domain(format!("non-finite value at grid index {i}"))),
        None => Ok(()),
    }
}

/// Monostable fronts at a fixed speed `c` against the inviscid front
/// `c V' = f(V)`, both with value `(α + 1)/2` at `z = 0`.
pub fn fixed_speed_convergence(
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    c: f64,
    eps_grid: &[f64],
    z_grid: &[f64],
    opts: &ProfileOptions,
) -> Result<ConvergenceReport> {
    check_grid(eps_grid)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("fixed-speed limits need c > 0, got {c}")));
    }
    if z_grid.is_empty() {
        return Err(Error::Domain("empty z grid".into()));
    }
    let fpa = reaction.derivative(reaction.alpha());
    for &eps in eps_grid {
        let c_plus = shooting::linear_speed(fpa, flux, eps);
        if c < c_plus {
            return Err(Error::Regime(format!(
                "no front at speed {c} for eps = {eps}: the monostable threshold is {c_plus}"
            )));
        }
    }
    let limit = inviscid_front(reaction, c, opts)?;
    let rows: Vec<(f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| {
            let front = monostable_front(reaction, flux, eps, c, opts)?;
            let sup = z_grid
                .iter()
                .map(|&z| (front.value_at(z) - limit.value_at(z)).abs())
                .fold(0.0, f64::max);
            Ok((sup, front.energy()))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    check_values(&values)?;
    Ok(ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        metric: Metric::SupOutsideI0,
        values,
        limit_target: format!("V_c, inviscid front at c = {c}"),
        limit_value: Some(0.0),
        i0_halfwidth: None,
        z_grid: z_grid.to_vec(),
        energies: Some(rows.iter().map(|r| r.1).collect()),
    })
}

/// The critical front of `family` at each ε (a steady state with a jump for
/// bistable ε at or below the threshold).
pub fn critical_front(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    family: FrontFamily,
    eps: f64,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    match family {
        FrontFamily::Monostable => {
            let c = shooting::linear_speed(reaction.f_prime_alpha(), flux, eps);
            monostable_front(reaction, flux, eps, c, opts)
        }
        FrontFamily::Bistable => Ok(bistable_front(reaction, flux, eps, opts)?.1),
    }
}

/// The step function a family tends to: `H_α` or `H₀`.
pub fn step_target(reaction: &dyn Reaction, family: FrontFamily) -> impl Fn(f64) -> f64 {
    let low = match family {
        FrontFamily::Monostable => reaction.alpha(),
        FrontFamily::Bistable => 0.0,
    };
    move |z| if z < 0.0 { low } else { 1.0 }
}

/// `sup |V - H|` over [`SUP_POINTS`] points of the profile window with `|z| >= i0`.
pub fn sup_outside(profile: &WaveProfile, target: &dyn Fn(f64) -> f64, i0_halfwidth: f64) -> f64 {
    let (a, b) = profile.z_range();
    numeric::linspace(a, b, SUP_POINTS)
        .into_iter()
        .filter(|z| z.abs() >= i0_halfwidth)
        .map(|z| (profile.value_at(z) - target(z)).abs())
        .fold(0.0, f64::max)
}

/// Distance of the critical fronts to their step-function limit outside
/// `(-i0_halfwidth, i0_halfwidth)`.
pub fn critical_front_convergence(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    family: FrontFamily,
    eps_grid: &[f64],
    i0_halfwidth: f64,
    opts: &ProfileOptions,
) -> Result<ConvergenceReport> {
    check_grid(eps_grid)?;
    if !(i0_halfwidth > 0.0) {
        return Err(Error::Domain(format!("i0 half-width must be positive, got {i0_halfwidth}")));
    }
    let target = step_target(reaction, family);
    let values: Vec<f64> = eps_grid
        .par_iter()
        .map(|&eps| Ok(sup_outside(&critical_front(reaction, flux, family, eps, opts)?, &target, i0_halfwidth)))
        .collect::<Result<_>>()?;
    check_values(&values)?;
    Ok(ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        metric: Metric::SupOutsideI0,
        values,
        limit_target: match family {
            FrontFamily::Monostable => "H_alpha".into(),
            FrontFamily::Bistable => "H_0".into(),
        },
        limit_value: Some(0.0),
        i0_halfwidth: Some(i0_halfwidth),
        z_grid: Vec::new(),
        energies: None,
    })
}

/// A smooth test function with compact support.
pub trait TestFunction: Sync {
    /// Closed interval outside which the function vanishes.
    fn support(&self) -> (f64, f64);
    fn value(&self, z: f64) -> f64;
    fn derivative(&self, z: f64) -> f64;
}

/// `ψ(z) = scale · exp(1/(((z - center)/width)² - 1))` on `|z - center| < width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub scale: f64,
}

impl Default for Bump {
    fn default() -> Self {
        Self { center: 0.0, width: 1.0, scale: 1.0 }
    }
}

impl Bump {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width, scale: 1.0 }
    }

    /// `ψ(center) = scale / e`.
    pub fn peak(&self) -> f64 {
        self.scale * (-1.0f64).exp()
    }
}

impl TestFunction for Bump {
    fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    fn value(&self, z: f64) -> f64 {
        let x = (z - self.center) / self.width;
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.scale * (1.0 / (x * x - 1.0)).exp()
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        let x = (z - self.center) / self.width;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 / (x * x - 1.0);
        -2.0 * x * q * q * self.scale * q.exp() / self.width
    }
}

/// `-∫ V ψ' dz`, integrated along the samples of each piece so that jumps
/// and steep layers are handled exactly by the parameterization. Beyond the
/// samples (but inside the window) `V` is constant and contributes
/// `V ψ` at the sample edges.
pub fn distributional_pairing(profile: &WaveProfile, psi: &dyn TestFunction) -> Result<f64> {
    let (lo, hi) = psi.support();
    let (a, b) = profile.window;
    if lo < a || hi > b {
        return Err(Error::Window(format!(
            "test function supported on [{lo}, {hi}] but the profile covers [{a}, {b}]"
        )));
    }
    let g = |z: f64| psi.derivative(z);
    let inside: f64 = profile.pieces.iter().map(|p| p.integrate_against(&g, lo, hi)).sum();
    let (za, zb) = profile.z_range();
    let (va, vb) = (profile.value_at(za), profile.value_at(zb));
    // ∫_{-∞}^{za} va ψ' = va ψ(za) and ∫_{zb}^{∞} vb ψ' = -vb ψ(zb)
    Ok(-(inside + va * psi.value(za) - vb * psi.value(zb)))
}

/// Pairings of the critical fronts with `psi`, against `(1 - α) ψ(0)` or `ψ(0)`.
pub fn pairing_convergence(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    family: FrontFamily,
    eps_grid: &[f64],
    psi: &dyn TestFunction,
    opts: &ProfileOptions,
) -> Result<ConvergenceReport> {
    check_grid(eps_grid)?;
    let values: Vec<f64> = eps_grid
        .par_iter()
        .map(|&eps| distributional_pairing(&critical_front(reaction, flux, family, eps, opts)?, psi))
        .collect::<Result<_>>()?;
    check_values(&values)?;
    let jump = match family {
        FrontFamily::Monostable => 1.0 - reaction.alpha(),
        FrontFamily::Bistable => 1.0,
    };
    Ok(ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        metric: Metric::DistributionalPairing,
        values,
        limit_target: match family {
            FrontFamily::Monostable => "(1 - alpha) delta_0 paired with psi".into(),
            FrontFamily::Bistable => "delta_0 paired with psi".into(),
        },
        limit_value: Some(jump * psi.value(0.0)),
        i0_halfwidth: None,
        z_grid: Vec::new(),
        energies: None,
    })
}

/// `c*_ε` and `c⁺_ε` along a grid above the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedSweep {
    pub critical: ConvergenceReport,
    pub monostable: ConvergenceReport,
}

impl SpeedSweep {
    /// `c*` decreases with ε and is at most `vanish_ratio` times its first
    /// value at the last grid point.
    pub fn critical_vanishes(&self, vanish_ratio: f64) -> bool {
        let v = &self.critical.values;
        v.windows(2).all(|w| w[1] < w[0]) && v[v.len() - 1] <= vanish_ratio * v[0]
    }

    /// Largest relative spread of `c⁺/√ε` across the grid.
    pub fn sqrt_scaling_spread(&self) -> f64 {
        let k: Vec<f64> = self
            .monostable
            .values
            .iter()
            .zip(&self.monostable.eps_grid)
            .map(|(c, e)| c / e.sqrt())
            .collect();
        let (lo, hi) = k.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        (hi - lo) / hi
    }
}

/// Both speeds along `eps_grid`, which must lie above the threshold; `c*` by
/// bisection to `tol`, `c⁺` by shooting to relative accuracy `tol`.
pub fn speed_sweep(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    eps_grid: &[f64],
    tol: f64,
    opts: &ProfileOptions,
) -> Result<SpeedSweep> {
    check_grid(eps_grid)?;
    let threshold = shooting::eps_threshold(reaction, flux);
    if eps_grid[eps_grid.len() - 1] <= threshold {
        return Err(Error::Domain(format!("speed sweeps need eps above the threshold {threshold}")));
    }
    let rows: Vec<(f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| {
            let star = shooting::critical_speed_bistable(reaction, flux, eps, tol, &opts.shoot)?.value;
            let plus = shooting::critical_speed_monostable(
                reaction,
                flux,
                eps,
                MonostableMode::Shooting { rel_tol: tol.max(1e-12) },
                &opts.shoot,
            )?
            .value;
            Ok((star, plus))
        })
        .collect::<Result<_>>()?;
    let report = |values: Vec<f64>, target: &str, limit: Option<f64>| ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        metric: Metric::Speed,
        values,
        limit_target: target.into(),
        limit_value: limit,
        i0_halfwidth: None,
        z_grid: Vec::new(),
        energies: None,
    };
    let star: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let plus: Vec<f64> = rows.iter().map(|r| r.1).collect();
    check_values(&star)?;
    check_values(&plus)?;
    Ok(SpeedSweep {
        critical: report(star, "c* -> 0 as eps -> threshold", Some(0.0)),
        monostable: report(plus, "c+ = 2 sqrt(f'(alpha) eps) / kappa", None),
    })
}

/// `c ∫ (v')²` of monostable fronts at speed `c` against `F(1) - F(α)`.
pub fn energy_report(
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    c: f64,
    eps_grid: &[f64],
    opts: &ProfileOptions,
) -> Result<ConvergenceReport> {
    check_grid(eps_grid)?;
    let values: Vec<f64> = eps_grid
        .par_iter()
        .map(|&eps| Ok(monostable_front(reaction, flux, eps, c, opts)?.energy()))
        .collect::<Result<_>>()?;
    check_values(&values)?;
    let alpha = reaction.alpha();
    let drop = numeric::integrate(|s| reaction.f(s), alpha, 1.0, 1e-14, 1e-12)?;
    Ok(ConvergenceReport {
        eps_grid: eps_grid.to_vec(),
        metric: Metric::EnergyIdentity,
        values,
        limit_target: "F(1) - F(alpha)".into(),
        limit_value: Some(drop),
        i0_halfwidth: None,
        z_grid: Vec::new(),
        energies: None,
    })
}

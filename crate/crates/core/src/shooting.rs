//! Critical speeds.
//!
//! The bistable speed `c*` is found by bisection on the outcome of a forward
//! shot from 0: too slow and `y` returns to zero before 1, too fast and it
//! either reaches the ceiling or arrives at 1 with `y > 0`. Below the
//! threshold `ε̄ / M0` even `c = 0` blows up, and the only 0 → 1 connection is a
//! steady state with a jump.
//!
//! The monostable speed `c⁺` (fronts from α to 1) has the closed form
//! `2√(2 ε f'(α)) / κ`; it can be checked by shooting backward from 1 and
//! following `y / (v - α)²` on a logarithmic scale down to α.

use serde::{Deserialize, Serialize};

use crate::diffusion::SaturatingFlux;
use crate::error::{Error, Result};
use crate::integrator::{self, Flow, StepOptions};
use crate::reaction::{ipof_scan, BistableReaction, Reaction};
use crate::reduced::{shoot, Direction, ReducedField, ShootOptions, TerminalEvent};

/// Distance from the threshold within which a run counts as the border case.
pub const BORDER_TOL: f64 = 1e-9;
const SPEED_CAP: f64 = 1e6;
const LOG_SWITCH: f64 = 1e-2;
const LOG_T_MIN: f64 = -700.0;
const LOG_ESCAPE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedKind {
    BistableStar,
    MonostablePlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RegularFront,
    BorderSteadyState,
    DiscontinuousSteadyState,
}

/// A critical-speed computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedResult {
    pub kind: SpeedKind,
    pub eps: f64,
    pub value: f64,
    pub bracket: [f64; 2],
    pub regime: Regime,
    pub iterations: usize,
    pub tol: f64,
    /// Whether `|f(s)| <= f'(α)|s - α|` holds (monostable results only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ipof_holds: Option<bool>,
}

impl SpeedResult {
    /// `b = c / ε`.
    pub fn scaled_value(&self) -> f64 {
        self.value / self.eps
    }
}

/// Outcome of a forward shot from 0 at a trial speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Classification {
    /// `y` returned to zero at `v_star < 1`.
    TooLow { v_star: f64 },
    TooHigh,
    Critical,
}

/// Threshold `ε̄ / M0` separating regular fronts from steady states.
pub fn eps_threshold(reaction: &BistableReaction, flux: &SaturatingFlux) -> f64 {
    reaction.eps_bar() / flux.m0()
}

pub fn classify_bistable(field: &ReducedField, opts: &ShootOptions) -> Result<Classification> {
    if field.c < 0.0 {
        return Err(Error::Domain(format!("speed must be nonnegative, got {}", field.c)));
    }
    let t = shoot(field, 0.0, Direction::Forward, 1.0, opts)?;
    Ok(match t.event {
        TerminalEvent::HitZero { v } if v < 1.0 => Classification::TooLow { v_star: v },
        TerminalEvent::HitZero { .. } => Classification::Critical,
        TerminalEvent::BlowUp { .. } => Classification::TooHigh,
        TerminalEvent::ReachedEndpoint { y, .. } => {
            if y.abs() <= 100.0 * opts.atol {
                Classification::Critical
            } else {
                Classification::TooHigh
            }
        }
    })
}

/// Linear threshold speed `2√(2 ε f'(α)) / κ`, i.e. `2√(ε f'(α))` for mean curvature.
pub fn linear_speed(f_prime_alpha: f64, flux: &SaturatingFlux, eps: f64) -> f64 {
    2.0 * (2.0 * eps * f_prime_alpha).sqrt() / flux.kappa()
}

/// Bisects for `c*`. Returns zero speed and a steady-state regime when `eps`
/// is at or below the threshold.
pub fn critical_speed_bistable(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    eps: f64,
    tol: f64,
    opts: &ShootOptions,
) -> Result<SpeedResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("speed tolerance must be positive, got {tol}")));
    }
    let field = ReducedField::new(reaction, flux, eps, 0.0)?;
    let steady = |regime| SpeedResult {
        kind: SpeedKind::BistableStar,
        eps,
        value: 0.0,
        bracket: [0.0, 0.0],
        regime,
        iterations: 0,
        tol,
        ipof_holds: None,
    };
    if (eps - eps_threshold(reaction, flux)).abs() <= BORDER_TOL {
        return Ok(steady(Regime::BorderSteadyState));
    }
    match classify_bistable(&field, opts)? {
        Classification::TooHigh => return Ok(steady(Regime::DiscontinuousSteadyState)),
        Classification::Critical => return Ok(SpeedResult { regime: Regime::RegularFront, ..steady(Regime::RegularFront) }),
        Classification::TooLow { .. } => {}
    }
    let (mut lo, mut hi) = (0.0, linear_speed(reaction.f_prime_alpha(), flux, eps));
    let mut iterations = 0;
    loop {
        iterations += 1;
        match classify_bistable(&field.with_speed(hi), opts)? {
            Classification::TooHigh => break,
            Classification::Critical => {
                lo = hi;
                break;
            }
            Classification::TooLow { .. } => {
                lo = hi;
                hi *= 2.0;
                if hi > SPEED_CAP {
                    return Err(Error::Bracket(format!("no speed below {SPEED_CAP} overshoots at eps = {eps}")));
                }
            }
        }
    }
    while hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify_bistable(&field.with_speed(mid), opts)? {
            Classification::TooLow { .. } => lo = mid,
            Classification::TooHigh => hi = mid,
            Classification::Critical => {
                lo = mid;
                hi = mid;
            }
        }
    }
    Ok(SpeedResult {
        kind: SpeedKind::BistableStar,
        eps,
        value: 0.5 * (lo + hi),
        bracket: [lo, hi],
        regime: Regime::RegularFront,
        iterations,
        tol,
        ipof_holds: None,
    })
}

/// How the monostable speed is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MonostableMode {
    /// Closed form; the linear bound on `f` is reported but not enforced.
    Linearized,
    /// Closed form, refused when the linear bound on `f` fails.
    RequireIpof,
    /// Bisection on whether the backward shot from 1 lands on α.
    Shooting { rel_tol: f64 },
}

pub fn critical_speed_monostable(
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    eps: f64,
    mode: MonostableMode,
    opts: &ShootOptions,
) -> Result<SpeedResult> {
    let field = ReducedField::new(reaction, flux, eps, 0.0)?;
    if (flux.exponent() - 0.5).abs() > 1e-12 {
        return Err(Error::Regime(
            "the monostable threshold needs a flux with R(u) ~ κ√u near 0".into(),
        ));
    }
    let fpa = reaction.derivative(reaction.alpha());
    let ipof = ipof_scan(reaction, fpa);
    let closed = linear_speed(fpa, flux, eps);
    let mut result = SpeedResult {
        kind: SpeedKind::MonostablePlus,
        eps,
        value: closed,
        bracket: [closed, closed],
        regime: Regime::RegularFront,
        iterations: 0,
        tol: 0.0,
        ipof_holds: Some(ipof.holds),
    };
    match mode {
        MonostableMode::Linearized => Ok(result),
        MonostableMode::RequireIpof => {
            if ipof.holds {
                Ok(result)
            } else {
                Err(Error::Ipof {
                    worst_point: ipof.worst_point,
                    ratio: ipof.ratio,
                })
            }
        }
        MonostableMode::Shooting { rel_tol } => {
            let (mut lo, mut hi) = (0.5 * closed, 2.0 * closed);
            let mut iterations = 0;
            while !monostable_lands(&field.with_speed(hi), opts)? {
                lo = hi;
                hi *= 2.0;
                iterations += 1;
                if hi > SPEED_CAP {
                    return Err(Error::Bracket(format!("no landing speed below {SPEED_CAP}")));
                }
            }
            while monostable_lands(&field.with_speed(lo), opts)? {
                hi = lo;
                lo *= 0.5;
                iterations += 1;
                if lo < 1e-300 {
                    return Err(Error::Bracket("fronts land at every positive speed".into()));
                }
            }
            while hi - lo > rel_tol * hi {
                iterations += 1;
                let mid = 0.5 * (lo + hi);
                if monostable_lands(&field.with_speed(mid), opts)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            result.value = 0.5 * (lo + hi);
            result.bracket = [lo, hi];
            result.iterations = iterations;
            result.tol = rel_tol * hi;
            Ok(result)
        }
    }
}

/// Whether the backward shot from 1 at `field.c` reaches α with `y → 0`.
///
/// Close to α the shot switches to `r = y / x²` with `t = ln x`, `x = v - α`:
/// `dr/dt = c (R(u)/√u) √(r/ε) - f(α + x)/x - 2r`, `u = r x² / ε`, which is
/// regular all the way to `x → 0`. Landing means `r` stays bounded and positive.
pub fn monostable_lands(field: &ReducedField, opts: &ShootOptions) -> Result<bool> {
    let alpha = field.reaction.alpha();
    let traj = shoot(field, 1.0, Direction::Backward, alpha + LOG_SWITCH, opts)?;
    let TerminalEvent::ReachedEndpoint { y, .. } = traj.event else {
        return Ok(false);
    };
    let r0 = y / (LOG_SWITCH * LOG_SWITCH);
    let (c, eps) = (field.c, field.eps);
    let step = StepOptions {
        atol: 1e-14,
        rtol: opts.rtol,
        max_step: 5.0,
        ..Default::default()
    };
    let mut escaped = false;
    integrator::integrate(
        |t, r: &[f64; 1]| {
            let x = t.exp();
            let rp = r[0].max(0.0);
            let u = rp * x * x / eps;
            [c * field.flux.r_over_sqrt(u) * (rp / eps).sqrt() - field.reaction.slope_from_alpha(x) - 2.0 * r[0]]
        },
        LOG_SWITCH.ln(),
        [r0],
        LOG_T_MIN,
        &step,
        None,
        |_, _| f64::INFINITY,
        |seg| {
            let r = seg.end()[0];
            if !(r > 0.0 && r < LOG_ESCAPE) {
                escaped = true;
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    Ok(!escaped)
}

/// Lower and upper estimates for the monostable speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedBracket {
    pub low: f64,
    /// `+∞` when no admissible constant exists below the scan cap.
    pub high: f64,
    /// Smallest admissible constant, when found.
    pub m_tilde: Option<f64>,
}

/// Default scan cap for [`stima_constant`].
pub const STIMA_CAP: f64 = 1e6;

/// Smallest `M` with `f(s) <= M (s - α) / √(1 - min(M, 1)(s - α)²)` on a
/// grid of `(α, 1]`, or `None` if even `cap` fails.
pub fn stima_constant(reaction: &dyn Reaction, cap: f64) -> Option<f64> {
    let alpha = reaction.alpha();
    let grid: Vec<(f64, f64)> = (1..=4000)
        .map(|i| {
            let x = (1.0 - alpha) * i as f64 / 4000.0;
            (x, reaction.f(alpha + x))
        })
        .collect();
    let holds = |m: f64| {
        let k = m.min(1.0);
        grid.iter().all(|&(x, f)| f <= m * x / (1.0 - k * x * x).sqrt() * (1.0 + 1e-14))
    };
    if !holds(cap) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, cap);
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Bracket `[2√(2εf'(α))/κ, 2√(2εM̃)/κ]` for the monostable speed.
pub fn estimate_speed_bracket(reaction: &dyn Reaction, flux: &SaturatingFlux, eps: f64) -> SpeedBracket {
    estimate_speed_bracket_capped(reaction, flux, eps, STIMA_CAP)
}

pub fn estimate_speed_bracket_capped(reaction: &dyn Reaction, flux: &SaturatingFlux, eps: f64, cap: f64) -> SpeedBracket {
    let fpa = reaction.derivative(reaction.alpha());
    let m_tilde = stima_constant(reaction, cap);
    SpeedBracket {
        low: linear_speed(fpa, flux, eps),
        high: m_tilde.map_or(f64::INFINITY, |m| linear_speed(m, flux, eps)),
        m_tilde,
    }
}

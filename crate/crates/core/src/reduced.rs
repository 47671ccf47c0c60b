//! The singular first-order equation `y' = c R(y/ε) - f(v)` on `0 <= y < ε M0`.
//!
//! Trajectories start at an anchor `q` with `y(q) = 0` and run in `v` until
//! they return to zero, hit the ceiling, or reach a prescribed endpoint.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diffusion::SaturatingFlux;
use crate::error::{Error, Result};
use crate::integrator::{self, DenseSegment, Flow, StepOptions};
use crate::reaction::Reaction;

/// The reduced field at fixed `ε` and speed `c`.
#[derive(Clone, Copy)]
pub struct ReducedField<'a> {
    pub reaction: &'a dyn Reaction,
    pub flux: &'a SaturatingFlux,
    pub eps: f64,
    /// Speed in the original (unscaled) variables.
    pub c: f64,
}

impl<'a> ReducedField<'a> {
    pub fn new(reaction: &'a dyn Reaction, flux: &'a SaturatingFlux, eps: f64, c: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        if !c.is_finite() {
            return Err(Error::Domain(format!("speed must be finite, got {c}")));
        }
        Ok(Self { reaction, flux, eps, c })
    }

    pub fn with_speed(&self, c: f64) -> Self {
        Self { c, ..*self }
    }

    /// Upper bound `ε M0` of the admissible range of `y`.
    pub fn ceiling(&self) -> f64 {
        self.eps * self.flux.m0()
    }

    /// `b_ε = c / ε`.
    pub fn scaled_speed(&self) -> f64 {
        self.c / self.eps
    }

    /// `g_ε(s) = f(s) / ε`.
    pub fn scaled_reaction(&self, s: f64) -> f64 {
        self.reaction.f(s) / self.eps
    }

    /// `c R(y/ε) - f(v)` with `R` extended oddly to `y < 0`; NaN outside
    /// `(-ε M0, ε M0)` so that trial steps leaving the domain get rejected.
    pub(crate) fn rhs(&self, v: f64, y: f64) -> f64 {
        let u = y / self.eps;
        if u.abs() >= self.flux.m0() {
            return f64::NAN;
        }
        let drift = if self.c == 0.0 { 0.0 } else { self.c * self.flux.r(u) };
        drift - self.reaction.f(v)
    }
}

/// `c R(y/ε) - f(v)` for `0 <= y < ε M0`.
pub fn field_value(field: &ReducedField, v: f64, y: f64) -> Result<f64> {
    if !(y >= 0.0) || y >= field.ceiling() {
        return Err(Error::Domain(format!(
            "y = {y} outside [0, {}) at v = {v}",
            field.ceiling()
        )));
    }
    Ok(field.rhs(v, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `v` increasing.
    Forward,
    /// `v` decreasing.
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TerminalEvent {
    /// `y` returned to zero at `v`.
    HitZero { v: f64 },
    /// `y` reached the ceiling guard at `v`.
    BlowUp { v: f64 },
    /// The requested endpoint was reached with `y > 0`.
    ReachedEndpoint { v: f64, y: f64 },
}

impl TerminalEvent {
    pub fn location(&self) -> f64 {
        match *self {
            TerminalEvent::HitZero { v } | TerminalEvent::BlowUp { v } | TerminalEvent::ReachedEndpoint { v, .. } => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Offset from an equilibrium anchor where integration starts.
    pub seed_h: f64,
    /// Blow-up is declared at `y >= (1 - blowup_margin) ε M0`.
    pub blowup_margin: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        // y behaves like (v - q)² near equilibria, so the absolute tolerance
        // has to sit far below the relative one
        Self {
            atol: 1e-16,
            rtol: 1e-10,
            seed_h: 1e-4,
            blowup_margin: 1e-6,
            max_step: 0.02,
            max_steps: 1_000_000,
        }
    }
}

impl ShootOptions {
    pub fn halved(&self) -> Self {
        Self {
            atol: self.atol / 2.0,
            rtol: self.rtol / 2.0,
            ..*self
        }
    }

    fn step_options(&self) -> StepOptions {
        StepOptions {
            atol: self.atol,
            rtol: self.rtol,
            max_step: self.max_step,
            min_step: 1e-300,
            max_steps: self.max_steps,
        }
    }
}

/// Local model of `y` between the anchor and the first integrated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SeedModel {
    /// `y = γ x^k`, `x = |v - anchor|`.
    Power { gamma: f64, k: f64 },
    /// `y = a x + b x^k + d x²` at a non-equilibrium zero.
    Transversal { a: f64, b: f64, k: f64, d: f64 },
}

impl SeedModel {
    pub fn y(&self, x: f64) -> f64 {
        match *self {
            SeedModel::Power { gamma, k } => gamma * x.powf(k),
            SeedModel::Transversal { a, b, k, d } => a * x + b * x.powf(k) + d * x * x,
        }
    }
}

/// Starting point of a shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub anchor: f64,
    pub v: f64,
    pub y: f64,
    pub model: SeedModel,
}

fn seed_error(anchor: f64, reason: impl Into<String>) -> Error {
    Error::Seed {
        anchor,
        reason: reason.into(),
    }
}

/// Computes where a shot from `anchor` starts: `(anchor ± h, y(h))` with `y`
/// from the local balance of `c R(y/ε)` against the linearized reaction.
pub fn seed_offset(field: &ReducedField, anchor: f64, direction: Direction, opts: &ShootOptions) -> Result<Seed> {
    let sigma = direction.sign();
    let (c, eps) = (field.c, field.eps);
    let kappa = field.flux.kappa();
    let p = field.flux.exponent();
    let f_q = field.reaction.f(anchor);

    if f_q.abs() > 1e-14 {
        // transversal zero: y' = -f(q) ≠ 0 there
        let a = -sigma * f_q;
        if !(a > 0.0) {
            return Err(seed_error(anchor, format!("y would turn negative: f = {f_q} has the wrong sign for this direction")));
        }
        let alpha = field.reaction.alpha();
        let h = (1e-4 * (anchor - alpha).abs()).min(opts.seed_h * 1e-2);
        let k = 1.0 + p;
        let b = sigma * c * kappa * (a / eps).powf(p) / k;
        let d = -field.reaction.derivative(anchor) / 2.0;
        let model = SeedModel::Transversal { a, b, k, d };
        return Ok(Seed {
            anchor,
            v: anchor + sigma * h,
            y: model.y(h),
            model,
        });
    }

    let fp = field.reaction.derivative(anchor);
    let h = opts.seed_h;
    let model = if (p - 0.5).abs() < 1e-12 {
        // y = s² x²  ⇒  2 s² - B s + f'(q) = 0
        let big_b = sigma * c * kappa / eps.sqrt();
        let mut disc = big_b * big_b - 8.0 * fp;
        if disc < 0.0 && disc > -1e-12 * big_b * big_b {
            disc = 0.0;
        }
        if disc < 0.0 {
            return Err(seed_error(
                anchor,
                format!("no real growth rate: discriminant {disc:e} < 0 (speed below the linear threshold)"),
            ));
        }
        let s = if fp < 0.0 {
            (big_b + disc.sqrt()) / 4.0
        } else if big_b > 0.0 {
            if fp == 0.0 {
                big_b / 2.0
            } else {
                // the slower of the two admissible rates
                2.0 * fp / (big_b + disc.sqrt())
            }
        } else {
            return Err(seed_error(anchor, "no positive growth rate: speed has the wrong sign for this direction"));
        };
        SeedModel::Power { gamma: s * s, k: 2.0 }
    } else {
        let sc = sigma * c;
        if sc > 0.0 {
            let k = 1.0 / (1.0 - p);
            let gamma = (sc * kappa * eps.powf(-p) * (1.0 - p)).powf(k);
            SeedModel::Power { gamma, k }
        } else if sc < 0.0 && fp < 0.0 {
            let gamma = eps * (fp / (sc * kappa)).powf(1.0 / p);
            SeedModel::Power { gamma, k: 1.0 / p }
        } else if sc == 0.0 && fp < 0.0 {
            SeedModel::Power { gamma: -fp / 2.0, k: 2.0 }
        } else {
            return Err(seed_error(anchor, "no admissible growth law at this anchor"));
        }
    };
    Ok(Seed {
        anchor,
        v: anchor + sigma * h,
        y: model.y(h),
        model,
    })
}

/// A computed solution `v ↦ y(v)` with its terminal event.
#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    pub anchor: f64,
    pub direction: Direction,
    pub event: TerminalEvent,
    pub eps: f64,
    pub c: f64,
    pub seed: Seed,
    pub atol: f64,
    pub rtol: f64,
    segments: Vec<DenseSegment<1>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub anchor: f64,
    pub direction: Direction,
    pub event: TerminalEvent,
    pub event_location: f64,
    pub eps: f64,
    pub c: f64,
    pub seed: Seed,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl ReducedTrajectory {
    /// Where the trajectory stops.
    pub fn end(&self) -> f64 {
        self.event.location()
    }

    /// `(min v, max v)` covered, anchor included.
    pub fn v_range(&self) -> (f64, f64) {
        let e = self.end();
        (self.anchor.min(e), self.anchor.max(e))
    }

    /// `y(v)` from the seed model or the dense output; `None` outside the range.
    pub fn eval(&self, v: f64) -> Option<f64> {
        let sigma = self.direction.sign();
        let x = sigma * (v - self.anchor);
        let end_x = sigma * (self.end() - self.anchor);
        if !(x >= 0.0 && x <= end_x) {
            return None;
        }
        if x <= sigma * (self.seed.v - self.anchor) || self.segments.is_empty() {
            return Some(self.seed.model.y(x));
        }
        let idx = self.segments.partition_point(|s| sigma * (s.t1() - v) < 0.0);
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        let y = seg.eval(v)[0];
        Some(if let TerminalEvent::HitZero { .. } = self.event { y.max(0.0) } else { y })
    }

    /// `y` at the terminal point.
    pub fn end_value(&self) -> f64 {
        match self.event {
            TerminalEvent::HitZero { .. } => 0.0,
            TerminalEvent::ReachedEndpoint { y, .. } => y,
            TerminalEvent::BlowUp { v } => self.eval(v).unwrap_or(f64::NAN),
        }
    }

    /// Ordered `(v, y)` samples: anchor, seed point, step ends and three
    /// interior points of every step, cut at the terminal event.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let sigma = self.direction.sign();
        let end = self.end();
        let mut out = vec![(self.anchor, 0.0), (self.seed.v, self.seed.y)];
        for seg in &self.segments {
            for th in [0.25, 0.5, 0.75, 1.0] {
                let v = seg.t0 + th * seg.h;
                if sigma * (v - end) >= 0.0 {
                    break;
                }
                out.push((v, seg.eval_theta(th)[0]));
            }
        }
        out.push((end, self.end_value()));
        out
    }

    pub fn meta(&self) -> TrajectoryMeta {
        TrajectoryMeta {
            anchor: self.anchor,
            direction: self.direction,
            event: self.event,
            event_location: self.end(),
            eps: self.eps,
            c: self.c,
            seed: self.seed,
            tolerances: Tolerances { atol: self.atol, rtol: self.rtol },
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("v,y\n");
        for (v, y) in self.samples() {
            let _ = writeln!(s, "{v:.16e},{y:.16e}");
        }
        s
    }

    pub fn meta_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.meta())?)
    }
}

/// Shoots from an equilibrium (or transversal zero) `anchor` toward `stop_at`.
pub fn shoot(
    field: &ReducedField,
    anchor: f64,
    direction: Direction,
    stop_at: f64,
    opts: &ShootOptions,
) -> Result<ReducedTrajectory> {
    if !(0.0..=1.0).contains(&anchor) {
        return Err(Error::Domain(format!("anchor {anchor} outside [0, 1]")));
    }
    if direction.sign() * (stop_at - anchor) <= 0.0 {
        return Err(Error::Domain(format!(
            "stop_at = {stop_at} is not {} of the anchor {anchor}",
            if direction == Direction::Forward { "right" } else { "left" }
        )));
    }
    let seed = seed_offset(field, anchor, direction, opts)?;
    shoot_from_seed(field, seed, direction, stop_at, opts)
}

/// Shoots from an explicit seed.
pub fn shoot_from_seed(
    field: &ReducedField,
    seed: Seed,
    direction: Direction,
    stop_at: f64,
    opts: &ShootOptions,
) -> Result<ReducedTrajectory> {
    let sigma = direction.sign();
    let ceiling = field.ceiling();
    let guard = (1.0 - opts.blowup_margin) * ceiling;
    let mut traj = ReducedTrajectory {
        anchor: seed.anchor,
        direction,
        event: TerminalEvent::ReachedEndpoint { v: stop_at, y: f64::NAN },
        eps: field.eps,
        c: field.c,
        seed,
        atol: opts.atol,
        rtol: opts.rtol,
        segments: Vec::new(),
    };
    if sigma * (stop_at - seed.v) <= 0.0 {
        traj.event = TerminalEvent::ReachedEndpoint {
            v: stop_at,
            y: seed.model.y(sigma * (stop_at - seed.anchor)),
        };
        return Ok(traj);
    }
    if seed.y >= guard {
        traj.event = TerminalEvent::BlowUp { v: seed.v };
        return Ok(traj);
    }

    let mut event = None;
    let mut segments = Vec::new();
    let out = integrator::integrate(
        |v, y: &[f64; 1]| [field.rhs(v, y[0])],
        seed.v,
        [seed.y],
        stop_at,
        &opts.step_options(),
        Some(opts.seed_h.min((stop_at - seed.v).abs()) * 0.1),
        |v, y| {
            let y = y[0];
            if y > 0.5 * ceiling {
                let slope = field.rhs(v, y).abs();
                if slope > 0.0 {
                    return 0.1 * (ceiling - y) / slope;
                }
            }
            f64::INFINITY
        },
        |seg| {
            let y1 = seg.end()[0];
            segments.push(*seg);
            if y1 <= 0.0 {
                event = Some(TerminalEvent::HitZero { v: locate_level(seg, 0.0) });
                Flow::Stop
            } else if y1 >= guard {
                event = Some(TerminalEvent::BlowUp { v: locate_level(seg, guard) });
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    traj.segments = segments;
    traj.event = event.unwrap_or(TerminalEvent::ReachedEndpoint { v: out.t, y: out.y[0] });
    Ok(traj)
}

/// Illinois iteration for `y(v) = level` on a step whose ends straddle the level.
fn locate_level(seg: &DenseSegment<1>, level: f64) -> f64 {
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let mut fa = seg.start()[0] - level;
    let mut fb = seg.end()[0] - level;
    if fb == 0.0 {
        return seg.t1();
    }
    if fa.signum() == fb.signum() {
        return seg.t1();
    }
    let mut side = 0;
    for _ in 0..200 {
        let m = (a * fb - b * fa) / (fb - fa);
        let fm = seg.eval_theta(m)[0] - level;
        if fm == 0.0 || (b - a).abs() < 4.0 * f64::EPSILON {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fb.signum() {
            b = m;
            fb = fm;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = m;
            fa = fm;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    seg.t0 + 0.5 * (a + b) * seg.h
}

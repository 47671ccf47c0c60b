//! Wave profiles `z ↦ v(z)` rebuilt from reduced trajectories.
//!
//! A branch with `y = ε Q(v')` is traced in an arclength-like parameter θ:
//!
//! ```text
//! dz/dθ = 1 / √(1 + R²),   dv/dθ = R / √(1 + R²),   R = R(y(v)/ε)
//! ```
//!
//! which stays regular both where `v'` vanishes (equilibria, junctions) and
//! where it is infinite (the jump points of steady states). For mean
//! curvature the rates are simply `(1 - u, √(u(2 - u)))` with `u = y/ε`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diffusion::SaturatingFlux;
use crate::error::{Error, Result};
use crate::integrator::{self, DenseSegment, Flow, StepOptions};
use crate::numeric;
use crate::reaction::{BistableReaction, Reaction};
use crate::reduced::{shoot, Direction, ReducedField, ReducedTrajectory, ShootOptions, TerminalEvent};
use crate::shooting::{self, SpeedResult, BORDER_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    RegularFront,
    DiscontinuousSteady,
    BorderSteady,
    Nonmonotone,
    Inviscid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Jump endpoints of a steady state, located at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub v_minus: f64,
    pub v_plus: f64,
}

/// A point where two monotone pieces of a glued wave meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub z: f64,
    pub v: f64,
    /// `R(y/ε)` of the incoming and outgoing reduced solutions at `v`.
    pub slope_in: f64,
    pub slope_out: f64,
}

/// One monotone branch, sampled in a parameter `τ` along which `z` increases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePiece {
    pub tau: Vec<f64>,
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub z_tau: Vec<f64>,
    pub v_tau: Vec<f64>,
    pub monotonicity: Monotonicity,
}

impl ProfilePiece {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    /// `v'(z)` at each sample (infinite at vertical points).
    pub fn slopes(&self) -> Vec<f64> {
        self.v_tau.iter().zip(&self.z_tau).map(|(v, z)| v / z).collect()
    }

    fn shifted(mut self, dz: f64) -> Self {
        self.z.iter_mut().for_each(|z| *z += dz);
        self
    }

    /// Hermite cubic in τ on interval `i` at local coordinate `s ∈ [0, 1]`.
    fn hermite(&self, i: usize, s: f64) -> (f64, f64) {
        let h = self.tau[i + 1] - self.tau[i];
        let (s2, s3) = (s * s, s * s * s);
        let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
        let z = h00 * self.z[i] + h10 * h * self.z_tau[i] + h01 * self.z[i + 1] + h11 * h * self.z_tau[i + 1];
        let v = h00 * self.v[i] + h10 * h * self.v_tau[i] + h01 * self.v[i + 1] + h11 * h * self.v_tau[i + 1];
        (z, v)
    }

    /// `∫ v g(z) dz` over the intervals of this piece that meet `[lo, hi]`,
    /// by Gauss–Kronrod in τ on each interval.
    pub(crate) fn integrate_against(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.len().saturating_sub(1) {
            let (za, zb) = (self.z[i].min(self.z[i + 1]), self.z[i].max(self.z[i + 1]));
            if zb < lo || za > hi {
                continue;
            }
            let h = self.tau[i + 1] - self.tau[i];
            let integrand = |s: f64| {
                let (z, v) = self.hermite(i, s);
                let s2 = s * s;
                let dz = (6.0 * s2 - 6.0 * s) * (self.z[i] - self.z[i + 1])
                    + (3.0 * s2 - 4.0 * s + 1.0) * h * self.z_tau[i]
                    + (3.0 * s2 - 2.0 * s) * h * self.z_tau[i + 1];
                v * g(z) * dz
            };
            total += numeric::gk15(&integrand, 0.0, 1.0).0;
        }
        total
    }

    fn value_at(&self, z: f64) -> f64 {
        let n = self.len();
        if z <= self.z[0] {
            return self.v[0];
        }
        if z >= self.z[n - 1] {
            return self.v[n - 1];
        }
        let i = self.z.partition_point(|&zi| zi <= z).clamp(1, n - 1) - 1;
        if self.z[i + 1] == self.z[i] {
            return self.v[i];
        }
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if self.hermite(i, m).0 < z {
                a = m;
            } else {
                b = m;
            }
        }
        self.hermite(i, 0.5 * (a + b)).1
    }
}

/// A sampled wave profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub kind: ProfileKind,
    /// Ordered left to right in `z`.
    pub pieces: Vec<ProfilePiece>,
    pub jump: Option<Jump>,
    pub speed_c: f64,
    /// Diffusion parameter; `None` for inviscid fronts.
    pub eps: Option<f64>,
    /// Value imposed at `z = 0` (for steady states, the jump sits at `z = 0`).
    pub normalization: f64,
    pub junctions: Vec<Junction>,
    /// Turning values of a glued wave, in the order they were found.
    pub zeros: Vec<f64>,
    /// Interval of `z` the profile stands for: sampled, or settled to within
    /// the end tolerance of an equilibrium whose value is continued.
    pub window: (f64, f64),
}

/// Sup-norm and count of the finite-difference residual of the wave equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max_abs: f64,
    /// Sample where the largest residual occurs.
    pub worst_z: f64,
    pub worst_v: f64,
    pub rms: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub kind: ProfileKind,
    pub jump: Option<Jump>,
    pub speed: f64,
    pub eps: Option<f64>,
    pub normalization: f64,
    pub z_range: (f64, f64),
    pub window: (f64, f64),
    pub junctions: Vec<Junction>,
    pub zeros: Vec<f64>,
    pub residual: Option<ResidualStats>,
}

impl WaveProfile {
    /// Range of the samples; see also [`WaveProfile::window`].
    pub fn z_range(&self) -> (f64, f64) {
        (self.pieces[0].z_range().0, self.pieces[self.pieces.len() - 1].z_range().1)
    }

    /// `v(z)`; outside the sampled window the end values are continued.
    /// At a shared boundary the piece to the right wins.
    pub fn value_at(&self, z: f64) -> f64 {
        let idx = self
            .pieces
            .iter()
            .rposition(|p| p.z_range().0 <= z)
            .unwrap_or(0);
        self.pieces[idx].value_at(z)
    }

    /// All samples as `(z, v, piece index, monotonicity)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, usize, Monotonicity)> + '_ {
        self.pieces.iter().enumerate().flat_map(|(k, p)| {
            p.z.iter().zip(&p.v).map(move |(&z, &v)| (z, v, k, p.monotonicity))
        })
    }

    /// Residual of the wave equation in arclength form,
    /// `ε dW/dτ - c dv/dτ + f(v) dz/dτ` with `W = P(v')`, where every derivative
    /// is a fourth-order central difference of the samples. This is the
    /// `z`-residual times `dz/dτ ≤ 1`, so it stays meaningful where `v'` is huge.
    /// Only runs of uniformly spaced samples are used. Returns `(z, v, r)`.
    pub fn residuals(&self, reaction: &dyn Reaction, flux: &SaturatingFlux) -> Vec<(f64, f64, f64)> {
        let eps = self.eps.unwrap_or(0.0);
        let c = self.speed_c;
        let d4 = |g: &[f64], i: usize, h: f64| (g[i - 2] - 8.0 * g[i - 1] + 8.0 * g[i + 1] - g[i + 2]) / (12.0 * h);
        let mut out = Vec::new();
        for p in &self.pieces {
            for (start, end, h) in uniform_runs(&p.tau) {
                let (zs, vs) = (&p.z[start..end], &p.v[start..end]);
                let n = end - start;
                if n < 9 {
                    continue;
                }
                let mut w = vec![0.0; n];
                for i in 2..n - 2 {
                    let (dz, dv) = (d4(zs, i, h), d4(vs, i, h));
                    w[i] = match flux {
                        SaturatingFlux::MeanCurvature => dv / dz.hypot(dv),
                        _ if dz > 0.0 => flux.p(dv / dz),
                        _ => flux.p(dv.signum() * f64::MAX),
                    };
                }
                for i in 4..n - 4 {
                    let dw = if self.kind == ProfileKind::Inviscid { 0.0 } else { d4(&w, i, h) };
                    let r = eps * dw - c * d4(vs, i, h) + reaction.f(vs[i]) * d4(zs, i, h);
                    out.push((zs[i], vs[i], r));
                }
            }
        }
        out
    }

    /// Summary of [`WaveProfile::residuals`].
    pub fn residual(&self, reaction: &dyn Reaction, flux: &SaturatingFlux) -> ResidualStats {
        let res = self.residuals(reaction, flux);
        let mut stats = ResidualStats { max_abs: 0.0, worst_z: f64::NAN, worst_v: f64::NAN, rms: 0.0, points: res.len() };
        let mut sq = 0.0;
        for &(z, v, r) in &res {
            if r.abs() > stats.max_abs {
                stats.max_abs = r.abs();
                stats.worst_z = z;
                stats.worst_v = v;
            }
            sq += r * r;
        }
        if !res.is_empty() {
            stats.rms = (sq / res.len() as f64).sqrt();
        }
        stats
    }

    /// `c ∫ (v')² dz`, integrated in τ so that steep parts stay resolved.
    pub fn energy(&self) -> f64 {
        let mut total = 0.0;
        for p in &self.pieces {
            let g: Vec<f64> = p
                .v_tau
                .iter()
                .zip(&p.z_tau)
                .map(|(&vt, &zt)| if zt > 0.0 { vt * vt / zt } else { 0.0 })
                .collect();
            for i in 0..p.len().saturating_sub(1) {
                total += 0.5 * (g[i] + g[i + 1]) * (p.tau[i + 1] - p.tau[i]);
            }
        }
        self.speed_c * total
    }

    pub fn meta(&self, residual: Option<ResidualStats>) -> ProfileMeta {
        ProfileMeta {
            kind: self.kind,
            jump: self.jump,
            speed: self.speed_c,
            eps: self.eps,
            normalization: self.normalization,
            z_range: self.z_range(),
            window: self.window,
            junctions: self.junctions.clone(),
            zeros: self.zeros.clone(),
            residual,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,v,piece_index,monotonicity\n");
        for (z, v, k, m) in self.samples() {
            let m = match m {
                Monotonicity::Increasing => "increasing",
                Monotonicity::Decreasing => "decreasing",
            };
            let _ = writeln!(s, "{z:.16e},{v:.16e},{k},{m}");
        }
        s
    }
}

/// Knobs shared by all profile builders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub shoot: ShootOptions,
    /// Tolerances for tracing `(z, v)` in θ.
    pub trace_atol: f64,
    pub trace_rtol: f64,
    /// Spacing of the output samples in θ.
    pub sample_spacing: f64,
    /// Half-width of the `z` window.
    pub window: f64,
    /// Distance in `v` from an equilibrium at which tracing stops.
    pub end_tol: f64,
    /// Relative distance from a junction where the local series takes over.
    pub junction_tol: f64,
    /// Weight of changes in `y/ε` in the sampling parameter.
    pub layer_weight: f64,
    /// Weight of the turning angle of `(θ, ℓ y/ε)` in the sampling parameter.
    pub turn_weight: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            shoot: ShootOptions {
                atol: 1e-24,
                rtol: 1e-12,
                seed_h: 1e-6,
                ..ShootOptions::default()
            },
            trace_atol: 1e-13,
            trace_rtol: 1e-12,
            sample_spacing: 0.05,
            window: 50.0,
            end_tol: 1e-8,
            junction_tol: 1e-6,
            layer_weight: 2.0,
            turn_weight: 1.0,
        }
    }
}

impl ProfileOptions {
    /// Every tolerance and the sample spacing divided by two.
    pub fn halved(&self) -> Self {
        Self {
            shoot: self.shoot.halved(),
            trace_atol: self.trace_atol / 2.0,
            trace_rtol: self.trace_rtol / 2.0,
            sample_spacing: self.sample_spacing / 2.0,
            ..*self
        }
    }
}

/// The reduced solution `y(v)` over `[q1, q2]` that a front is rebuilt from,
/// possibly stitched from two shots that meet at `split`.
#[derive(Debug, Clone)]
pub struct FrontCurve {
    pub q1: f64,
    pub q2: f64,
    pub eps: f64,
    pub c: f64,
    lower: ReducedTrajectory,
    upper: Option<(f64, ReducedTrajectory)>,
}

impl FrontCurve {
    /// A single shot covering `[q1, q2]`.
    pub fn single(traj: ReducedTrajectory, q1: f64, q2: f64, tol: f64) -> Result<Self> {
        let (lo, hi) = traj.v_range();
        if lo > q1 + tol || hi < q2 - tol {
            return Err(Error::Domain(format!(
                "trajectory covers [{lo}, {hi}] but the front needs [{q1}, {q2}] (terminal event {:?})",
                traj.event
            )));
        }
        Ok(Self { q1, q2, eps: traj.eps, c: traj.c, lower: traj, upper: None })
    }

    /// `lower` on `[q1, split]`, `upper` on `[split, q2]`.
    pub fn stitched(lower: ReducedTrajectory, upper: ReducedTrajectory, split: f64, q1: f64, q2: f64) -> Result<Self> {
        for (t, a, b) in [(&lower, q1, split), (&upper, split, q2)] {
            let (lo, hi) = t.v_range();
            if lo > a || hi < b {
                return Err(Error::Domain(format!(
                    "trajectory covers [{lo}, {hi}], needed [{a}, {b}] (terminal event {:?})",
                    t.event
                )));
            }
        }
        Ok(Self { q1, q2, eps: lower.eps, c: lower.c, lower, upper: Some((split, upper)) })
    }

    pub fn eval(&self, v: f64) -> f64 {
        let v = v.clamp(self.q1, self.q2);
        let t = match &self.upper {
            Some((split, up)) if v >= *split => up,
            _ => &self.lower,
        };
        t.eval(v).unwrap_or(0.0).max(0.0)
    }

    /// `|y_lower(split) - y_upper(split)|` for stitched curves.
    pub fn mismatch(&self) -> f64 {
        match &self.upper {
            Some((s, up)) => (self.lower.eval(*s).unwrap_or(f64::NAN) - up.eval(*s).unwrap_or(f64::NAN)).abs(),
            None => 0.0,
        }
    }
}

/// Maximal index ranges `[start, end)` on which `tau` has a constant step.
fn uniform_runs(tau: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start + 1 < tau.len() {
        let h = tau[start + 1] - tau[start];
        let mut end = start + 1;
        while end + 1 < tau.len() && ((tau[end + 1] - tau[end]) - h).abs() <= 1e-9 * h.abs() {
            end += 1;
        }
        runs.push((start, end + 1, h));
        start = end;
    }
    runs
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    theta: f64,
    z: f64,
    v: f64,
    zt: f64,
    vt: f64,
}

/// How fast the sampling density may change: `|d(1/S)/dθ| <= GRADING`, i.e.
/// `S` changes by about `GRADING · spacing` relative per sample.
const GRADING: f64 = 2.0;

/// Width, in the sampling parameter, of the Gaussian that smooths the density.
const SMOOTHING: f64 = 0.25;

/// One direction of an arclength trace: the accepted steps up to `theta_end`.
struct Path {
    segments: Vec<DenseSegment<2>>,
    theta_end: f64,
}

impl Path {
    fn eval(&self, theta: f64, start: [f64; 2]) -> [f64; 2] {
        if self.segments.is_empty() || theta == 0.0 {
            return start;
        }
        let forward = self.theta_end > 0.0;
        let i = self
            .segments
            .partition_point(|s| if forward { s.t1() < theta } else { s.t1() > theta })
            .min(self.segments.len() - 1);
        self.segments[i].eval(theta)
    }

    /// Step ends and three interior points per step, ordered by |θ|.
    fn grid(&self) -> Vec<f64> {
        let mut g = vec![0.0];
        for seg in &self.segments {
            for j in 1..=4 {
                let th = seg.t0 + seg.h * j as f64 / 4.0;
                if (th - self.theta_end) * self.theta_end.signum() >= 0.0 {
                    break;
                }
                g.push(th);
            }
        }
        if self.theta_end != 0.0 {
            g.push(self.theta_end);
        }
        g
    }
}

/// Traces the curve `(z, v)` of a reduced solution `y(v)` in arclength θ,
/// then samples it uniformly in a graded parameter `σ` whose density grows
/// with `|du/dθ|` and with the turning of the graph `(θ, ℓu)`, `u = y/ε`.
/// Thin layers where `y` relaxes onto a slow curve thus get enough samples.
struct Tracer<'a> {
    y: &'a dyn Fn(f64) -> f64,
    reaction: &'a dyn Reaction,
    c: f64,
    eps: f64,
    flux: &'a SaturatingFlux,
    step: StepOptions,
    spacing: f64,
    layer_weight: f64,
    turn_weight: f64,
}

impl<'a> Tracer<'a> {
    fn new(
        y: &'a dyn Fn(f64) -> f64,
        reaction: &'a dyn Reaction,
        c: f64,
        eps: f64,
        flux: &'a SaturatingFlux,
        opts: &ProfileOptions,
    ) -> Self {
        Self {
            y,
            reaction,
            c,
            eps,
            flux,
            step: trace_step(opts),
            spacing: opts.sample_spacing,
            layer_weight: opts.layer_weight,
            turn_weight: opts.turn_weight,
        }
    }

    fn u(&self, v: f64) -> f64 {
        ((self.y)(v) / self.eps).clamp(0.0, self.flux.m0())
    }

    fn rates(&self, v: f64) -> (f64, f64) {
        self.flux.arclength_rates(self.u(v))
    }

    /// `du/dθ` from the reduced equation.
    fn u_rate(&self, u: f64, v: f64) -> f64 {
        let drift = if self.c == 0.0 { 0.0 } else { self.c * self.flux.r(u) };
        (drift - self.reaction.f(v)) / self.eps * self.flux.arclength_rates(u).1
    }

    /// Raw sampling density `dσ/dθ`.
    fn density(&self, v: f64) -> f64 {
        let l = self.layer_weight;
        if l == 0.0 {
            return 1.0;
        }
        let m0 = self.flux.m0();
        let u = self.u(v);
        let b = self.flux.arclength_rates(u).1;
        let g = self.u_rate(u, v);
        let du = 1e-6 * u.min(m0 - u);
        let g_u = if du > 0.0 { (self.u_rate(u + du, v) - self.u_rate(u - du, v)) / (2.0 * du) } else { 0.0 };
        let dv = 1e-7;
        let g_v = (self.u_rate(u, v + dv) - self.u_rate(u, v - dv)) / (2.0 * dv);
        let turn = l * (g_u * g + g_v * b) / (1.0 + (l * g).powi(2));
        let s = (1.0 + (l * g).powi(2) + (self.turn_weight * turn).powi(2)).sqrt();
        if s.is_finite() { s.min(1e12) } else { 1e12 }
    }

    /// Integrates in the direction `sign` of θ until `v` passes `v_stop` or
    /// `z` passes `z_stop`.
    fn path(&self, z0: f64, v0: f64, sign: f64, v_stop: f64, z_stop: f64) -> Result<Path> {
        let theta_max = 2.0 * ((z_stop - z0).abs() + (v_stop - v0).abs()) + 1.0;
        let done = |s: &[f64; 2]| (sign * (s[1] - v_stop)).max(sign * (s[0] - z_stop));
        let mut segments: Vec<DenseSegment<2>> = Vec::new();
        if done(&[z0, v0]) >= 0.0 {
            return Ok(Path { segments, theta_end: 0.0 });
        }
        let mut theta_end = None;
        let out = integrator::integrate(
            |_, s: &[f64; 2]| {
                let (a, b) = self.rates(s[1]);
                [a, b]
            },
            0.0,
            [z0, v0],
            sign * theta_max,
            &self.step,
            None,
            |_, _| f64::INFINITY,
            |seg| {
                segments.push(*seg);
                if done(&seg.end()) >= 0.0 {
                    let (mut a, mut b) = (0.0, 1.0);
                    for _ in 0..80 {
                        let m = 0.5 * (a + b);
                        if done(&seg.eval_theta(m)) >= 0.0 {
                            b = m;
                        } else {
                            a = m;
                        }
                    }
                    theta_end = Some(seg.t0 + b * seg.h);
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )?;
        Ok(Path { segments, theta_end: theta_end.unwrap_or(out.t) })
    }

    /// Samples the union of a backward and a forward path, uniformly in σ.
    fn sample(&self, start: [f64; 2], back: Option<&Path>, fwd: Option<&Path>) -> Vec<Sample> {
        // θ grid in increasing order, with its path states
        let mut theta: Vec<f64> = Vec::new();
        if let Some(p) = back {
            theta.extend(p.grid().into_iter().rev());
        }
        if let Some(p) = fwd {
            let g = p.grid();
            let skip = usize::from(!theta.is_empty());
            theta.extend(g.into_iter().skip(skip));
        }
        if theta.is_empty() {
            theta.push(0.0);
        }
        let state = |th: f64| -> [f64; 2] {
            match (th < 0.0, back, fwd) {
                (true, Some(p), _) | (false, _, Some(p)) => p.eval(th, start),
                (true, None, Some(p)) | (false, Some(p), None) => p.eval(th, start),
                _ => start,
            }
        };
        theta.dedup_by(|b, a| *b <= *a);
        let n = theta.len();
        let mut dens: Vec<f64> = theta.iter().map(|&th| self.density(state(th)[1])).collect();
        for i in 1..n {
            let lim = 1.0 / (1.0 / dens[i - 1] + GRADING * (theta[i] - theta[i - 1]));
            dens[i] = dens[i].max(lim);
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let lim = 1.0 / (1.0 / dens[i + 1] + GRADING * (theta[i + 1] - theta[i]));
            dens[i] = dens[i].max(lim);
        }
        // smooth ln S with a Gaussian of fixed width in the graded parameter
        let mut sg = vec![0.0; n];
        for i in 1..n {
            sg[i] = sg[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (theta[i] - theta[i - 1]);
        }
        let log_d: Vec<f64> = dens.iter().map(|d| d.ln()).collect();
        let weight: Vec<f64> = (0..n)
            .map(|i| 0.5 * (sg[(i + 1).min(n - 1)] - sg[i.saturating_sub(1)]))
            .collect();
        let mut smooth = vec![0.0; n];
        let (mut lo, mut hi) = (0usize, 0usize);
        for i in 0..n {
            while sg[i] - sg[lo] > 4.0 * SMOOTHING {
                lo += 1;
            }
            while hi + 1 < n && sg[hi + 1] - sg[i] <= 4.0 * SMOOTHING {
                hi += 1;
            }
            let (mut num, mut den) = (0.0, 0.0);
            for j in lo..=hi {
                let k = (-0.5 * ((sg[j] - sg[i]) / SMOOTHING).powi(2)).exp() * weight[j];
                num += k * log_d[j];
                den += k;
            }
            smooth[i] = if den > 0.0 { (num / den).exp() } else { dens[i] };
        }
        let spline = numeric::CubicSpline::new(theta.clone(), smooth);
        let density_at = |i: usize, t: f64| spline.eval_in(i, t).max(1e-3);
        let mut sigma = vec![0.0; n];
        for i in 1..n {
            sigma[i] = sigma[i - 1] + spline.integral_in(i - 1, theta[i] - theta[i - 1]);
        }
        let zero = theta.iter().position(|&t| t == 0.0).unwrap_or(0);
        let offset = sigma[zero];
        sigma.iter_mut().for_each(|s| *s -= offset);
        let theta_of = |target: f64| -> (f64, f64) {
            let i = sigma.partition_point(|&s| s <= target).clamp(1, n - 1) - 1;
            let dt = theta[i + 1] - theta[i];
            let goal = target - sigma[i];
            let (mut a, mut b) = (0.0, dt);
            let mut t = dt * goal / (sigma[i + 1] - sigma[i]).max(f64::MIN_POSITIVE);
            for _ in 0..100 {
                let g = spline.integral_in(i, t) - goal;
                if g.abs() <= 1e-15 * goal.abs().max(1e-300) || (b - a) <= 1e-15 * dt {
                    break;
                }
                if g > 0.0 {
                    b = t;
                } else {
                    a = t;
                }
                let newton = t - g / density_at(i, t);
                t = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
            }
            (theta[i] + t, density_at(i, t))
        };
        let dens: Vec<f64> = (0..n).map(|i| if i + 1 < n { density_at(i, 0.0) } else { density_at(n - 2, theta[n - 1] - theta[n - 2]) }).collect();
        let h = self.spacing;
        let (s_lo, s_hi) = (sigma[0], sigma[n - 1]);
        let k_lo = -((-s_lo / h) * (1.0 - 1e-12)).floor() as i64;
        let k_hi = ((s_hi / h) * (1.0 - 1e-12)).floor() as i64;
        let mut out = Vec::new();
        let mut push = |sg: f64, th: f64, d: f64| {
            let s = state(th);
            let (a, b) = self.rates(s[1]);
            out.push(Sample { theta: sg, z: s[0], v: s[1], zt: a / d, vt: b / d });
        };
        if s_lo < 0.0 {
            push(s_lo, theta[0], dens[0]);
        }
        for k in k_lo..=k_hi {
            let sg = k as f64 * h;
            let near_end = (sg - s_lo) < 1e-9 * h || (s_hi - sg) < 1e-9 * h;
            if k != 0 && near_end {
                continue;
            }
            let (th, d) = if k == 0 { (0.0, dens[zero]) } else { theta_of(sg) };
            push(sg, th, d);
        }
        if s_hi > 0.0 {
            push(s_hi, theta[n - 1], dens[n - 1]);
        }
        out
    }

    /// Traces from `(z0, v0)` in one direction; samples ordered by σ.
    fn run(&self, z0: f64, v0: f64, sign: f64, v_stop: f64, z_stop: f64) -> Result<Vec<Sample>> {
        let p = self.path(z0, v0, sign, v_stop, z_stop)?;
        Ok(if sign > 0.0 {
            self.sample([z0, v0], None, Some(&p))
        } else {
            self.sample([z0, v0], Some(&p), None)
        })
    }

    /// Traces both ways from `(z0, v0)`; samples ordered by σ.
    fn both_ways(&self, z0: f64, v0: f64, lo: (f64, f64), hi: (f64, f64)) -> Result<Vec<Sample>> {
        let back = self.path(z0, v0, -1.0, lo.0, lo.1)?;
        let fwd = self.path(z0, v0, 1.0, hi.0, hi.1)?;
        Ok(self.sample([z0, v0], Some(&back), Some(&fwd)))
    }
}

fn piece_from(samples: &[Sample]) -> ProfilePiece {
    ProfilePiece {
        tau: samples.iter().map(|s| s.theta).collect(),
        z: samples.iter().map(|s| s.z).collect(),
        v: samples.iter().map(|s| s.v).collect(),
        z_tau: samples.iter().map(|s| s.zt).collect(),
        v_tau: samples.iter().map(|s| s.vt).collect(),
        monotonicity: Monotonicity::Increasing,
    }
}

fn trace_step(opts: &ProfileOptions) -> StepOptions {
    StepOptions {
        atol: opts.trace_atol,
        rtol: opts.trace_rtol,
        max_step: 0.4 * opts.sample_spacing,
        ..Default::default()
    }
}

/// Rebuilds the increasing front from a reduced solution positive on `(q1, q2)`,
/// normalized by `v(0) = (q1 + q2)/2`.
pub fn reconstruct_front(
    curve: &FrontCurve,
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    let y = |v: f64| curve.eval(v);
    let tracer = Tracer::new(&y, reaction, curve.c, curve.eps, flux, opts);
    let mid = 0.5 * (curve.q1 + curve.q2);
    if !(y(mid) > 0.0) {
        return Err(Error::Domain(format!("reduced solution vanishes at the midpoint v = {mid}")));
    }
    let samples = tracer.both_ways(
        0.0,
        mid,
        (curve.q1 + opts.end_tol, -opts.window),
        (curve.q2 - opts.end_tol, opts.window),
    )?;
    Ok(WaveProfile {
        kind: ProfileKind::RegularFront,
        pieces: vec![piece_from(&samples)],
        jump: None,
        speed_c: curve.c,
        eps: Some(curve.eps),
        normalization: mid,
        junctions: Vec::new(),
        zeros: Vec::new(),
        window: (-opts.window, opts.window),
    })
}

/// Monostable front from α to 1 at speed `c >= c⁺`.
pub fn monostable_front(
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    eps: f64,
    c: f64,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    let alpha = reaction.alpha();
    let field = ReducedField::new(reaction, flux, eps, c)?;
    let c_plus = shooting::linear_speed(reaction.derivative(alpha), flux, eps);
    if c < c_plus * (1.0 - 1e-12) {
        return Err(Error::Regime(format!(
            "speed {c} is below the monostable threshold {c_plus} at eps = {eps}"
        )));
    }
    let traj = shoot(&field, 1.0, Direction::Backward, alpha, &opts.shoot)?;
    match traj.event {
        TerminalEvent::BlowUp { v } => {
            return Err(Error::Regime(format!("reduced solution blows up at v = {v}")))
        }
        TerminalEvent::HitZero { v } if v - alpha > opts.end_tol => {
            return Err(Error::Domain(format!("reduced solution vanishes at v = {v} above alpha")))
        }
        _ => {}
    }
    let curve = FrontCurve::single(traj, alpha, 1.0, opts.end_tol)?;
    reconstruct_front(&curve, reaction, flux, opts)
}

/// The critical 0 → 1 front, or the steady state with a jump when `eps` is at
/// or below the threshold.
pub fn bistable_front(
    reaction: &BistableReaction,
    flux: &SaturatingFlux,
    eps: f64,
    opts: &ProfileOptions,
) -> Result<(SpeedResult, WaveProfile)> {
    let speed = shooting::critical_speed_bistable(reaction, flux, eps, 1e-16, &opts.shoot)?;
    if speed.regime != shooting::Regime::RegularFront {
        return Ok((speed, build_discontinuous_steady(reaction, eps, flux, opts)?));
    }
    // The backward shot from 1 is attracted to the right solution near 0, but
    // the forward shot from 0 is sharper in the last stretch before 0.
    let split = 0.1 * reaction.alpha();
    let field = ReducedField::new(reaction, flux, eps, speed.value)?;
    let lower = shoot(&field, 0.0, Direction::Forward, 1.0, &opts.shoot)?;
    let upper = shoot(&field, 1.0, Direction::Backward, 0.0, &opts.shoot)?;
    let curve = FrontCurve::stitched(lower, upper, split, 0.0, 1.0)?;
    let mut profile = reconstruct_front(&curve, reaction, flux, opts)?;
    profile.speed_c = speed.value;
    Ok((speed, profile))
}

/// Zero-speed weak solution with a jump at `z = 0` from `v_minus` to `v_plus`,
/// `F⁻(v_minus) = ε M0 = F⁺(v_plus)`.
pub fn build_discontinuous_steady(
    reaction: &BistableReaction,
    eps: f64,
    flux: &SaturatingFlux,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    let threshold = shooting::eps_threshold(reaction, flux);
    if !(eps > 0.0) || eps > threshold + BORDER_TOL {
        return Err(Error::Domain(format!(
            "steady states with a jump need 0 < eps <= {threshold}, got {eps}"
        )));
    }
    let (v_minus, v_plus) = jump_endpoints(reaction, eps * flux.m0())?;
    let kind = if (eps - threshold).abs() <= BORDER_TOL {
        ProfileKind::BorderSteady
    } else {
        ProfileKind::DiscontinuousSteady
    };
    let left_y = |v: f64| reaction.f_minus(v.min(v_minus));
    let right_y = |v: f64| reaction.f_plus(v.max(v_plus));
    let left = Tracer::new(&left_y, reaction, 0.0, eps, flux, opts).run(0.0, v_minus, -1.0, opts.end_tol, -opts.window)?;
    let right =
        Tracer::new(&right_y, reaction, 0.0, eps, flux, opts).run(0.0, v_plus, 1.0, 1.0 - opts.end_tol, opts.window)?;
    Ok(WaveProfile {
        kind,
        pieces: vec![piece_from(&left), piece_from(&right)],
        jump: Some(Jump { v_minus, v_plus }),
        speed_c: 0.0,
        eps: Some(eps),
        normalization: 0.5,
        junctions: Vec::new(),
        zeros: Vec::new(),
        window: (-opts.window, opts.window),
    })
}

/// Roots of `F⁻(v) = level` on `(0, α]` and `F⁺(v) = level` on `(α, 1)`.
pub fn jump_endpoints(reaction: &BistableReaction, level: f64) -> Result<(f64, f64)> {
    let alpha = reaction.alpha();
    let v_minus = if level >= reaction.eps_bar() {
        alpha
    } else {
        numeric::brent(|v| reaction.f_minus(v) - level, 0.0, alpha, 1e-15)?
    };
    let v_plus = numeric::brent(|v| reaction.f_plus(v) - level, alpha, 1.0, 1e-15)?;
    Ok((v_minus, v_plus))
}

/// Which equilibrium a glued wave leaves from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlueStart {
    /// Backward from 1 at speed `c`; the wave tends to 1 as `z → +∞`.
    FromOne,
    /// Forward from 0 at speed `c`; the wave tends to 0 as `z → -∞`.
    FromZero,
}

struct GluePiece {
    traj: ReducedTrajectory,
    lo: f64,
    hi: f64,
    lo_junction: bool,
    hi_junction: bool,
}

/// Nonmonotone wave built by shooting alternately backward and forward from
/// the zeros of the previous piece, flipping the sign of the speed each time.
pub fn glue_nonmonotone(
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    eps: f64,
    c: f64,
    start: GlueStart,
    max_turns: usize,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    let alpha = reaction.alpha();
    let base = ReducedField::new(reaction, flux, eps, c)?;
    let (mut anchor, mut dir) = match start {
        GlueStart::FromOne => (1.0, Direction::Backward),
        GlueStart::FromZero => (0.0, Direction::Forward),
    };
    let mut speed = c;
    let mut anchor_is_junction = false;
    let mut pieces = Vec::new();
    let mut zeros = Vec::new();
    let settle = 1e-9;

    for _ in 0..=max_turns {
        let field = base.with_speed(speed);
        let stop = if dir == Direction::Forward { 1.0 } else { 0.0 };
        let mut sopts = opts.shoot;
        if anchor_is_junction {
            let scale = reaction.f(anchor).abs() * (anchor - alpha).abs();
            sopts.atol = sopts.atol.min(1e-12 * scale);
        }
        let traj = shoot(&field, anchor, dir, stop, &sopts)?;
        let (end, end_junction) = match traj.event {
            TerminalEvent::BlowUp { v } => {
                return Err(Error::Regime(format!(
                    "piece from {anchor} at speed {speed} blows up at v = {v}"
                )))
            }
            TerminalEvent::HitZero { v } => (v, true),
            TerminalEvent::ReachedEndpoint { v, y } => {
                if y.abs() > 1e-9 * eps {
                    return Err(Error::Regime(format!(
                        "piece from {anchor} at speed {speed} reaches v = {v} with y = {y}: the profile would leave [0, 1]"
                    )));
                }
                (v, false)
            }
        };
        let (lo, hi, lo_junction, hi_junction) = if anchor < end {
            (anchor, end, anchor_is_junction, end_junction)
        } else {
            (end, anchor, end_junction, anchor_is_junction)
        };
        pieces.push(GluePiece { traj, lo, hi, lo_junction, hi_junction });
        zeros.push(end);
        if (end - alpha).abs() < settle || zeros.len() > max_turns {
            break;
        }
        anchor = end;
        anchor_is_junction = end_junction;
        dir = dir.reverse();
        speed = -speed;
    }

    // trace each piece as an increasing branch in its own coordinates
    let mut traced = Vec::with_capacity(pieces.len());
    for gp in &pieces {
        traced.push(trace_glue_piece(gp, reaction, flux, eps, opts)?);
    }

    let leftward = start == GlueStart::FromOne;
    let mut placed: Vec<ProfilePiece> = Vec::new();
    let mut junctions = Vec::new();
    let mut edge = 0.0;
    for (k, (gp, piece)) in pieces.iter().zip(traced).enumerate() {
        let increasing = k % 2 == 0;
        // the end of this piece that touches the previous one
        let attach_hi = leftward == increasing;
        let mut p = piece;
        if !increasing {
            let n = p.len();
            let z_hi = p.z[n - 1];
            let mut q = ProfilePiece {
                tau: p.tau.iter().rev().map(|t| -t).collect(),
                z: p.z.iter().rev().map(|z| z_hi - z).collect(),
                v: p.v.iter().rev().copied().collect(),
                z_tau: p.z_tau.iter().rev().copied().collect(),
                v_tau: p.v_tau.iter().rev().map(|v| -v).collect(),
                monotonicity: Monotonicity::Decreasing,
            };
            std::mem::swap(&mut p, &mut q);
        }
        // z of the attaching end in the piece's current coordinates
        let n = p.len();
        let attach_z = match (increasing, attach_hi) {
            (true, true) | (false, false) => p.z[n - 1],
            _ => p.z[0],
        };
        let attach_z = if leftward { p.z[n - 1].max(attach_z) } else { p.z[0].min(attach_z) };
        let p = p.shifted(edge - attach_z);
        let (zl, zr) = p.z_range();
        let anchor_v = gp.traj.anchor;
        if k > 0 {
            let prev = &pieces[k - 1].traj;
            let slope_in = flux.r(prev.end_value().abs() / eps);
            let slope_out = flux.r(gp.traj.eval(anchor_v).unwrap_or(0.0).abs() / eps);
            junctions.push(Junction { z: edge, v: anchor_v, slope_in, slope_out });
        }
        edge = if leftward { zl } else { zr };
        placed.push(p);
    }
    if leftward {
        placed.reverse();
        junctions.reverse();
    }
    // put the first zero at z = 0
    let first_zero = if leftward { placed[placed.len() - 1].z_range().0 } else { placed[0].z_range().1 };
    let placed: Vec<ProfilePiece> = placed.into_iter().map(|p| p.shifted(-first_zero)).collect();
    junctions.iter_mut().for_each(|j| j.z -= first_zero);
    // the side left at the last turning value is only as wide as its samples
    // unless the turns have settled onto α
    let (zl, zr) = (placed[0].z_range().0, placed[placed.len() - 1].z_range().1);
    let settled = zeros.last().is_some_and(|v| (v - alpha).abs() < settle);
    let window = match (leftward, settled) {
        (_, true) => (zl.min(-opts.window), zr.max(opts.window)),
        (true, false) => (zl, zr.max(opts.window)),
        (false, false) => (zl.min(-opts.window), zr),
    };
    Ok(WaveProfile {
        kind: ProfileKind::Nonmonotone,
        pieces: placed,
        jump: None,
        speed_c: c,
        eps: Some(eps),
        normalization: zeros[0],
        junctions,
        zeros,
        window,
    })
}

/// Traces one glued piece as increasing in its own `ζ`, finishing each
/// junction end with the local law `v'(z) ≈ κ (A x / ε)^p`, `A = |f(v_k)|`.
fn trace_glue_piece(
    gp: &GluePiece,
    reaction: &dyn Reaction,
    flux: &SaturatingFlux,
    eps: f64,
    opts: &ProfileOptions,
) -> Result<ProfilePiece> {
    let (lo, hi) = (gp.lo, gp.hi);
    let width = hi - lo;
    let y = |v: f64| gp.traj.eval(v.clamp(lo, hi)).unwrap_or(0.0).max(0.0);
    let mut tracer = Tracer::new(&y, reaction, gp.traj.c, eps, flux, opts);
    // small-amplitude pieces near α keep a few hundred samples over their length
    tracer.spacing = opts.sample_spacing.min(width / 20.0).max(opts.sample_spacing / 20.0);
    let jt = opts.junction_tol * width;
    let lo_stop = if gp.lo_junction { lo + jt } else { lo + opts.end_tol };
    let hi_stop = if gp.hi_junction { hi - jt } else { hi - opts.end_tol };
    let mid = 0.5 * (lo + hi);
    let mut s = tracer.both_ways(0.0, mid, (lo_stop, -opts.window), (hi_stop, opts.window))?;
    let (kappa, p) = (flux.kappa(), flux.exponent());
    let tail = |v_k: f64, x: f64| {
        let a = reaction.f(v_k).abs();
        x.powf(1.0 - p) / ((1.0 - p) * kappa * (a / eps).powf(p))
    };
    if gp.lo_junction {
        let first = s[0];
        let dz = tail(lo, (first.v - lo).max(0.0));
        s.insert(0, Sample { theta: first.theta - dz, z: first.z - dz, v: lo, zt: 1.0, vt: 0.0 });
    }
    if gp.hi_junction {
        let last = s[s.len() - 1];
        let dz = tail(hi, (hi - last.v).max(0.0));
        s.push(Sample { theta: last.theta + dz, z: last.z + dz, v: hi, zt: 1.0, vt: 0.0 });
    }
    Ok(piece_from(&s))
}

/// Inviscid front `c v' = f(v)` between α and 1 with `v(0) = (α + 1)/2`.
pub fn inviscid_front(reaction: &dyn Reaction, c: f64, opts: &ProfileOptions) -> Result<WaveProfile> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("inviscid fronts need c > 0, got {c}")));
    }
    let (q1, q2) = (reaction.alpha(), 1.0);
    let mid = 0.5 * (q1 + q2);
    let step = StepOptions {
        atol: 1e-14,
        rtol: opts.trace_rtol,
        max_step: 0.5,
        ..Default::default()
    };
    let run = |sign: f64, v_stop: f64| -> Result<Vec<Sample>> {
        let mut segs: Vec<DenseSegment<1>> = Vec::new();
        let mut z_end = None;
        let out = integrator::integrate(
            |_, v: &[f64; 1]| [reaction.f(v[0]) / c],
            0.0,
            [mid],
            sign * opts.window,
            &step,
            None,
            |_, _| f64::INFINITY,
            |seg| {
                segs.push(*seg);
                if sign * (seg.end()[0] - v_stop) >= 0.0 {
                    let (mut a, mut b) = (0.0, 1.0);
                    for _ in 0..80 {
                        let m = 0.5 * (a + b);
                        if sign * (seg.eval_theta(m)[0] - v_stop) >= 0.0 {
                            b = m;
                        } else {
                            a = m;
                        }
                    }
                    z_end = Some(seg.t0 + b * seg.h);
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )?;
        let z_end = z_end.unwrap_or(out.t);
        let mut samples = Vec::new();
        let mut k = 0usize;
        let mut idx = 0usize;
        loop {
            let z = sign * k as f64 * opts.sample_spacing;
            let last = sign * (z - z_end) >= 0.0;
            let z = if last { z_end } else { z };
            while idx + 1 < segs.len() && sign * (z - segs[idx].t1()) > 0.0 {
                idx += 1;
            }
            let v = if k == 0 || segs.is_empty() { mid } else { segs[idx].eval(z)[0] };
            samples.push(Sample { theta: z, z, v, zt: 1.0, vt: reaction.f(v) / c });
            if last {
                break;
            }
            k += 1;
        }
        Ok(samples)
    };
    let back = run(-1.0, q1 + opts.end_tol)?;
    let fwd = run(1.0, q2 - opts.end_tol)?;
    let mut all: Vec<Sample> = back.into_iter().rev().collect();
    all.extend(fwd.into_iter().skip(1));
    Ok(WaveProfile {
        kind: ProfileKind::Inviscid,
        pieces: vec![piece_from(&all)],
        jump: None,
        speed_c: c,
        eps: None,
        normalization: mid,
        junctions: Vec::new(),
        zeros: Vec::new(),
        window: (-opts.window, opts.window),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (BistableReaction, SaturatingFlux) {
        (BistableReaction::cubic(0.4).unwrap(), SaturatingFlux::mean_curvature())
    }

    #[test]
    fn monostable_front_is_increasing_and_normalized() {
        let (r, fl) = setup();
        let p = monostable_front(&r, &fl, 0.01, 0.12, &ProfileOptions::default()).unwrap();
        assert_eq!(p.pieces.len(), 1);
        let pc = &p.pieces[0];
        assert!(pc.v.windows(2).all(|w| w[1] > w[0]));
        assert!(pc.z.windows(2).all(|w| w[1] > w[0]));
        assert!((p.value_at(0.0) - 0.7).abs() < 1e-12);
        assert!(pc.v[0] < 0.4 + 2e-8 && pc.v[pc.len() - 1] > 1.0 - 2e-8);
    }

    #[test]
    fn energy_identity_for_monostable_front() {
        let (r, fl) = setup();
        let p = monostable_front(&r, &fl, 0.01, 0.12, &ProfileOptions::default()).unwrap();
        let target = r.primitive(1.0) - r.primitive(0.4);
        assert!((p.energy() / target - 1.0).abs() < 1e-4, "{}", p.energy());
    }

    #[test]
    fn steady_state_endpoints_and_border() {
        let (r, fl) = setup();
        let o = ProfileOptions::default();
        let p = build_discontinuous_steady(&r, 0.005, &fl, &o).unwrap();
        let j = p.jump.unwrap();
        assert!((r.f_minus(j.v_minus) - 0.005).abs() < 1e-15);
        assert!((r.f_plus(j.v_plus) - 0.005).abs() < 1e-15);
        assert!(j.v_minus < 0.4 && j.v_plus > 0.4);
        let b = build_discontinuous_steady(&r, r.eps_bar(), &fl, &o).unwrap();
        assert_eq!(b.kind, ProfileKind::BorderSteady);
        assert!((b.jump.unwrap().v_minus - 0.4).abs() < 1e-12);
        assert!(matches!(build_discontinuous_steady(&r, 0.01, &fl, &o), Err(Error::Domain(_))));
    }

    #[test]
    fn inviscid_front_scales_with_speed() {
        let (r, _) = setup();
        let o = ProfileOptions::default();
        let a = inviscid_front(&r, 0.2, &o).unwrap();
        let b = inviscid_front(&r, 0.4, &o).unwrap();
        assert!((a.value_at(0.0) - 0.7).abs() < 1e-15);
        for z in [-3.0, -1.0, 0.5, 2.0] {
            assert!((a.value_at(z) - b.value_at(2.0 * z)).abs() < 1e-8);
        }
        let pc = &a.pieces[0];
        assert!(pc.v.iter().all(|&v| v > 0.4 && v < 1.0));
        assert!(pc.v.windows(2).all(|w| w[1] > w[0]));
        assert!(matches!(inviscid_front(&r, 0.0, &o), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_speed_glue_bounces_between_zero_and_v_zero() {
        let (r, fl) = setup();
        let p = glue_nonmonotone(&r, &fl, 0.5, 0.0, GlueStart::FromZero, 4, &ProfileOptions::default()).unwrap();
        assert!(p.zeros.len() >= 4);
        for (k, &z) in p.zeros.iter().enumerate() {
            let target = if k % 2 == 0 { 2.0 / 3.0 } else { 0.0 };
            assert!((z - target).abs() < 1e-6, "zero {k} = {z}");
        }
    }
}

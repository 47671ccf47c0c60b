//! Strongly saturating fluxes `P(s) = s φ(|s|)`.
//!
//! Each flux carries `Q(t) = ∫₀ᵗ s P'(s) ds`, its bounded range `[0, M0)` and
//! the inverse `R = Q⁻¹`, which blows up at `M0`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric;

const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e4;
const GRID_N: usize = 401;

/// A flux with finite `M0 = ∫₀^∞ s P'(s) ds`.
#[derive(Debug, Clone, PartialEq)]
pub enum SaturatingFlux {
    /// `P(s) = s / √(1 + s²)`
    MeanCurvature,
    /// `P(s) = s^m / √(1 + δ s^{2m})`
    Power(Arc<PowerFlux>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFlux {
    m: f64,
    delta: f64,
    m0: f64,
    t_grid: Vec<f64>,
    q_grid: Vec<f64>,
}

impl SaturatingFlux {
    pub fn mean_curvature() -> Self {
        SaturatingFlux::MeanCurvature
    }

    /// Builds the power flux, computing `M0` numerically and caching `Q` on a
    /// log grid.
    pub fn power(m: f64, delta: f64) -> Result<Self> {
        if !(m > 1.0 && m.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("power flux needs m > 1 and delta > 0, got m = {m}, delta = {delta}")));
        }
        PowerFlux::new(m, delta).map(|p| SaturatingFlux::Power(Arc::new(p)))
    }

    pub fn p(&self, s: f64) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => s / (1.0 + s * s).sqrt(),
            SaturatingFlux::Power(p) => {
                let a = s.abs().powf(p.m);
                (a / (1.0 + p.delta * a * a).sqrt()).copysign(s)
            }
        }
    }

    /// `φ(s) = P(s) / s` for `s > 0`.
    pub fn phi(&self, s: f64) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => 1.0 / (1.0 + s * s).sqrt(),
            SaturatingFlux::Power(_) => self.p(s) / s,
        }
    }

    pub fn p_prime(&self, s: f64) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => (1.0 + s * s).powf(-1.5),
            SaturatingFlux::Power(p) => {
                let s = s.abs();
                if s == 0.0 { 0.0 } else { power_sp(p.m, p.delta, s) / s }
            }
        }
    }

    pub fn m0(&self) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => 1.0,
            SaturatingFlux::Power(p) => p.m0,
        }
    }

    /// `Q(t)`, odd in `t`.
    pub fn q(&self, t: f64) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => {
                let t2 = t * t;
                // 1 - 1/√(1+t²) without cancellation for small t
                (t2 / ((1.0 + t2).sqrt() * (1.0 + (1.0 + t2).sqrt()))).copysign(t)
            }
            SaturatingFlux::Power(p) => p.q(t.abs()).copysign(t),
        }
    }

    /// `R = Q⁻¹` on `(-M0, M0)`, odd; `+∞` at or beyond `M0`.
    pub fn r(&self, y: f64) -> f64 {
        let u = y.abs();
        let v = match self {
            SaturatingFlux::MeanCurvature => {
                if u >= 1.0 {
                    f64::INFINITY
                } else {
                    (u * (2.0 - u)).sqrt() / (1.0 - u)
                }
            }
            SaturatingFlux::Power(p) => p.r(u),
        };
        v.copysign(y)
    }

    /// Exponent `p` of the small-argument law `R(u) ≈ κ u^p`.
    pub fn exponent(&self) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => 0.5,
            SaturatingFlux::Power(p) => 1.0 / (p.m + 1.0),
        }
    }

    /// Coefficient `κ` of the small-argument law `R(u) ≈ κ u^p`.
    pub fn kappa(&self) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => std::f64::consts::SQRT_2,
            SaturatingFlux::Power(p) => ((p.m + 1.0) / p.m).powf(1.0 / (p.m + 1.0)),
        }
    }

    /// `R(u) / √u` for `u > 0`; finite at `u = 0` only when the exponent is 1/2.
    pub fn r_over_sqrt(&self, u: f64) -> f64 {
        match self {
            SaturatingFlux::MeanCurvature => {
                let u = u.max(0.0);
                (2.0 - u).sqrt() / (1.0 - u)
            }
            SaturatingFlux::Power(_) => self.r(u) / u.sqrt(),
        }
    }

    /// Tangent-normalized pair `(1, R) / √(1 + R²)` at level `u`, finite up to
    /// and including the ceiling `u = M0`.
    pub fn arclength_rates(&self, u: f64) -> (f64, f64) {
        match self {
            SaturatingFlux::MeanCurvature => {
                let u = u.clamp(-1.0, 1.0);
                let a = u.abs();
                (1.0 - a, (a * (2.0 - a)).sqrt().copysign(u))
            }
            SaturatingFlux::Power(_) => {
                let r = self.r(u);
                if r.is_infinite() {
                    (0.0, r.signum())
                } else {
                    let n = r.hypot(1.0);
                    (1.0 / n, r / n)
                }
            }
        }
    }
}

impl PowerFlux {
    fn new(m: f64, delta: f64) -> Result<Self> {
        let g = |s: f64| power_sp(m, delta, s);
        let t_grid = numeric::logspace(GRID_LO, GRID_HI, GRID_N);
        let mut q_grid = Vec::with_capacity(GRID_N);
        let mut acc = numeric::integrate(g, 0.0, GRID_LO, 0.0, 1e-14)?;
        q_grid.push(acc);
        for w in t_grid.windows(2) {
            acc += numeric::integrate(g, w[0], w[1], 0.0, 1e-14)?;
            q_grid.push(acc);
        }
        let mut flux = Self { m, delta, m0: f64::NAN, t_grid, q_grid };
        let tail = flux.tail(GRID_HI)?;
        flux.m0 = acc + tail;
        if !(flux.m0.is_finite() && flux.m0 > 0.0) {
            return Err(Error::Quadrature(format!("M0 estimate not finite for m = {m}, delta = {delta}")));
        }
        Ok(flux)
    }

    fn g(&self, s: f64) -> f64 {
        power_sp(self.m, self.delta, s)
    }

    /// `∫ₜ^∞ s P'(s) ds` through `s = t / τ`.
    fn tail(&self, t: f64) -> Result<f64> {
        let integrand = |tau: f64| {
            if tau <= 0.0 {
                0.0
            } else {
                self.g(t / tau) * t / (tau * tau)
            }
        };
        let v = numeric::integrate(integrand, 0.0, 1.0, 0.0, 1e-13)?;
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("tail of Q at t = {t} does not converge")));
        }
        Ok(v)
    }

    fn q(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t <= GRID_LO {
            return numeric::gk15(&|s| self.g(s), 0.0, t).0;
        }
        if t >= GRID_HI {
            return self.m0 - self.tail(t).unwrap_or(0.0);
        }
        let i = self.t_grid.partition_point(|&x| x <= t) - 1;
        self.q_grid[i] + numeric::gk15(&|s| self.g(s), self.t_grid[i], t).0
    }

    /// Safeguarded Newton on `Q(t) = y`, using the complement near `M0`.
    fn r(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y >= self.m0 {
            return f64::INFINITY;
        }
        let i = self.q_grid.partition_point(|&q| q <= y);
        let (mut lo, mut hi) = if i == 0 {
            (0.0, GRID_LO)
        } else if i >= self.q_grid.len() {
            let mut hi = GRID_HI * 2.0;
            while self.q(hi) < y && hi < 1e300 {
                hi *= 4.0;
            }
            (GRID_HI, hi)
        } else {
            (self.t_grid[i - 1], self.t_grid[i])
        };
        let kappa = ((self.m + 1.0) / self.m).powf(1.0 / (self.m + 1.0));
        let mut t = (kappa * y.powf(1.0 / (self.m + 1.0))).clamp(lo, hi);
        for _ in 0..100 {
            let resid = self.q(t) - y;
            if resid > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.g(t);
            let mut next = t - resid / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-14 * next.abs() || hi - lo <= 1e-15 * hi {
                return next;
            }
            t = next;
        }
        t
    }
}

/// `s P'(s) = m s^m (1 + δ s^{2m})^{-3/2}`, rearranged for large `s`.
fn power_sp(m: f64, delta: f64, s: f64) -> f64 {
    if s <= 1.0 {
        m * s.powf(m) * (1.0 + delta * s.powf(2.0 * m)).powf(-1.5)
    } else {
        let w = s.powf(-m);
        m * w * w * (w * w + delta).powf(-1.5)
    }
}

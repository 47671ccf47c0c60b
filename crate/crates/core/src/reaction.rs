//! Bistable reaction terms `f` with zeros at 0, α and 1.
//!
//! `f < 0` on `(0, α)`, `f > 0` on `(α, 1)` and `∫₀¹ f > 0`. Outside `[0, 1]`
//! the reaction is extended by zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

const TABLE_EQ_TOL: f64 = 1e-6;
const IPOF_GRID: usize = 100_000;

/// The minimal interface the shooting code needs from a reaction.
pub trait Reaction: Send + Sync {
    fn f(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    fn alpha(&self) -> f64;

    /// `f(α + x) / x`, accurate for tiny `|x|`.
    fn slope_from_alpha(&self, x: f64) -> f64 {
        if x.abs() > 1e-6 {
            self.f(self.alpha() + x) / x
        } else {
            self.derivative(self.alpha())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `k s (1 - s)(s - a)`
    Cubic { a: f64, k: f64 },
    Table(Pchip),
}

/// A validated bistable reaction together with its derived scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct BistableReaction {
    shape: Shape,
    alpha: f64,
    f_prime_alpha: f64,
    lipschitz_l: f64,
    eps_bar: f64,
    v_zero: f64,
    total_integral: f64,
}

/// Result of scanning `|f(s)| <= f'(α) |s - α|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpofReport {
    pub holds: bool,
    /// Point where `|f(s)| / (f'(α)|s - α|)` is largest.
    pub worst_point: f64,
    pub ratio: f64,
}

impl BistableReaction {
    /// `f(s) = s(1 - s)(s - a)` for `0 < a < 1/2`.
    pub fn cubic(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::Domain(format!("cubic reaction needs 0 < a < 1/2, got {a}")));
        }
        Ok(Self::cubic_scaled(a, 1.0))
    }

    fn cubic_scaled(a: f64, k: f64) -> Self {
        // 3v² - 4(1 + a)v + 6a = 0, smaller root, written to avoid cancellation
        let b = 4.0 * (1.0 + a);
        let disc = (b * b - 72.0 * a).sqrt();
        let v_zero = 12.0 * a / (b + disc);
        Self {
            shape: Shape::Cubic { a, k },
            alpha: a,
            f_prime_alpha: k * a * (1.0 - a),
            lipschitz_l: k * a.max(1.0 - a),
            eps_bar: k * a.powi(3) * (2.0 - a) / 12.0,
            v_zero,
            total_integral: k * (1.0 - 2.0 * a) / 12.0,
        }
    }

    /// Monotone cubic (PCHIP) interpolant of tabulated `(s, f(s))` pairs.
    pub fn from_table(samples: &[(f64, f64)], alpha: f64) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::Validation("table needs at least 4 samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Validation("table abscissae must be strictly increasing".into()));
        }
        if samples.iter().any(|(s, f)| !s.is_finite() || !f.is_finite()) {
            return Err(Error::Validation("table contains non-finite values".into()));
        }
        let (s0, f0) = samples[0];
        let (s1, f1) = samples[samples.len() - 1];
        if s0.abs() > 1e-12 || (s1 - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("table must cover [0, 1], got [{s0}, {s1}]")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Validation(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if f0.abs() > TABLE_EQ_TOL || f1.abs() > TABLE_EQ_TOL {
            return Err(Error::Validation(format!(
                "equilibria: f(0) = {f0}, f(1) = {f1} are not zero"
            )));
        }
        let table = Pchip::new(samples);
        let f_alpha = table.eval(alpha);
        if f_alpha.abs() > TABLE_EQ_TOL {
            return Err(Error::Validation(format!("equilibria: f(alpha) = {f_alpha} is not zero")));
        }
        let total_integral = table.primitive(1.0);
        if !(total_integral > 0.0) {
            return Err(Error::Validation(format!(
                "total integral not positive: ∫₀¹ f = {total_integral}"
            )));
        }
        for &(s, f) in &samples[1..samples.len() - 1] {
            if (s - alpha).abs() < 1e-9 {
                continue;
            }
            if !(f * (s - alpha) > 0.0) {
                let side = if s < alpha { "f < 0 on (0, alpha)" } else { "f > 0 on (alpha, 1)" };
                return Err(Error::Validation(format!("sign pattern {side} violated at s = {s} (f = {f})")));
            }
        }
        // the interpolant can only cross zero between samples of opposite sign,
        // but check densely on each of the three subintervals anyway
        for (lo, hi, sign, clause) in [
            (0.0, alpha, -1.0, "f < 0 on (0, alpha)"),
            (alpha, 1.0, 1.0, "f > 0 on (alpha, 1)"),
        ] {
            for s in numeric::linspace(lo, hi, 2001).into_iter().skip(1).take(1999) {
                if !(sign * table.eval(s) > 0.0) {
                    return Err(Error::Validation(format!("sign pattern {clause} violated by the interpolant at s = {s}")));
                }
            }
        }
        let f_prime_alpha = table.derivative(alpha);
        if !(f_prime_alpha > 0.0) {
            return Err(Error::Validation(format!("f'(alpha) = {f_prime_alpha} must be positive")));
        }
        let eps_bar = -table.primitive(alpha);
        let v_zero = numeric::brent(|s| table.primitive(s), alpha, 1.0, 1e-15)?;
        let mut lipschitz_l = table.derivative(0.0).abs().max(table.derivative(1.0).abs());
        for s in numeric::linspace(0.0, 1.0, 4001).into_iter().skip(1).take(3999) {
            let f = table.eval(s);
            lipschitz_l = lipschitz_l.max(-f / s).max(f / (1.0 - s));
        }
        Ok(Self {
            shape: Shape::Table(table),
            alpha,
            f_prime_alpha,
            lipschitz_l,
            eps_bar,
            v_zero,
            total_integral,
        })
    }

    /// The reaction `k f`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {k}")));
        }
        Ok(match &self.shape {
            Shape::Cubic { a, k: k0 } => Self::cubic_scaled(*a, k0 * k),
            Shape::Table(t) => {
                let mut t = t.clone();
                t.scale(k);
                Self {
                    shape: Shape::Table(t),
                    f_prime_alpha: self.f_prime_alpha * k,
                    lipschitz_l: self.lipschitz_l * k,
                    eps_bar: self.eps_bar * k,
                    total_integral: self.total_integral * k,
                    ..self.clone()
                }
            }
        })
    }

    pub fn f_prime_alpha(&self) -> f64 {
        self.f_prime_alpha
    }

    /// Smallest `l` with `-l s <= f(s) <= l (1 - s)` on `[0, 1]`.
    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    /// `∫₀¹ f⁻`, the threshold below which no regular 0 → 1 front exists.
    pub fn eps_bar(&self) -> f64 {
        self.eps_bar
    }

    /// The zero of `F` in `(α, 1)`.
    pub fn v_zero(&self) -> f64 {
        self.v_zero
    }

    pub fn total_integral(&self) -> f64 {
        self.total_integral
    }

    /// `F(s) = ∫₀ˢ f`.
    pub fn primitive(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match &self.shape {
            Shape::Cubic { a, k } => k * s * s * (-s * s / 4.0 + (1.0 + a) * s / 3.0 - a / 2.0),
            Shape::Table(t) => t.primitive(s),
        }
    }

    /// `F⁻(s) = -∫₀ˢ f`.
    pub fn f_minus(&self, s: f64) -> f64 {
        -self.primitive(s)
    }

    /// `F⁺(s) = ∫ₛ¹ f`.
    pub fn f_plus(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Cubic { a, k } => {
                // expand around 1 so that F⁺ keeps full relative accuracy near s = 1
                let s = s.clamp(0.0, 1.0);
                let x = 1.0 - s;
                // f(1 - x) = k (1 - x) x (1 - a - x); integrate in x from 0 to 1 - s
                k * x * x * ((1.0 - a) / 2.0 - (2.0 - a) * x / 3.0 + x * x / 4.0)
            }
            Shape::Table(_) => self.total_integral - self.primitive(s),
        }
    }

    /// Checks `|f(s)| <= f'(α)|s - α|` on a dense grid.
    pub fn validate_ipof(&self) -> IpofReport {
        ipof_scan(self, self.f_prime_alpha)
    }
}

/// Scans `|f(s)| / (slope |s - α|)` on a dense grid of `[0, 1]`.
pub fn ipof_scan(r: &dyn Reaction, slope: f64) -> IpofReport {
    let alpha = r.alpha();
    let mut worst = (alpha, 1.0_f64.min(r.slope_from_alpha(0.0).abs() / slope));
    for i in 0..=IPOF_GRID {
        let s = i as f64 / IPOF_GRID as f64;
        let x = s - alpha;
        let ratio = r.slope_from_alpha(x).abs() / slope;
        if ratio > worst.1 {
            worst = (s, ratio);
        }
    }
    IpofReport {
        holds: worst.1 <= 1.0 + 1e-12,
        worst_point: worst.0,
        ratio: worst.1,
    }
}

impl Reaction for BistableReaction {
    fn f(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match &self.shape {
            Shape::Cubic { a, k } => k * s * (1.0 - s) * (s - a),
            Shape::Table(t) => t.eval(s),
        }
    }

    fn derivative(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match &self.shape {
            Shape::Cubic { a, k } => k * (-3.0 * s * s + 2.0 * (1.0 + a) * s - a),
            Shape::Table(t) => t.derivative(s),
        }
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn slope_from_alpha(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Cubic { a, k } => {
                let s = a + x;
                if !(0.0..=1.0).contains(&s) {
                    return 0.0;
                }
                k * s * (1.0 - a - x)
            }
            Shape::Table(t) => {
                if x.abs() > 1e-6 {
                    self.f(self.alpha + x) / x
                } else {
                    let d = t.derivative(self.alpha);
                    let h = 1e-6_f64.copysign(x);
                    let secant = t.eval(self.alpha + h) / h;
                    d + (secant - d) * x / h
                }
            }
        }
    }
}

/// The reaction `g(s) = -f(1 - s)`, whose fronts are the mirror images
/// `Y(v) = y(1 - v)` of those of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedReaction {
    inner: BistableReaction,
}

impl ReflectedReaction {
    pub fn new(inner: BistableReaction) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &BistableReaction {
        &self.inner
    }
}

impl Reaction for ReflectedReaction {
    fn f(&self, s: f64) -> f64 {
        -self.inner.f(1.0 - s)
    }

    fn derivative(&self, s: f64) -> f64 {
        self.inner.derivative(1.0 - s)
    }

    fn alpha(&self) -> f64 {
        1.0 - self.inner.alpha
    }

    fn slope_from_alpha(&self, x: f64) -> f64 {
        self.inner.slope_from_alpha(-x)
    }
}

/// Fritsch-Carlson monotone cubic interpolant with exact running integrals.
#[derive(Debug, Clone, PartialEq)]
struct Pchip {
    s: Vec<f64>,
    f: Vec<f64>,
    d: Vec<f64>,
    cum: Vec<f64>,
}

impl Pchip {
    fn new(samples: &[(f64, f64)]) -> Self {
        let s: Vec<f64> = samples.iter().map(|p| p.0).collect();
        let f: Vec<f64> = samples.iter().map(|p| p.1).collect();
        let n = s.len();
        let h: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        let mut t = Self { s, f, d, cum: vec![0.0; n] };
        t.rebuild_cum();
        t
    }

    fn rebuild_cum(&mut self) {
        for i in 0..self.s.len() - 1 {
            let h = self.s[i + 1] - self.s[i];
            self.cum[i + 1] =
                self.cum[i] + h * (self.f[i] + self.f[i + 1]) / 2.0 + h * h * (self.d[i] - self.d[i + 1]) / 12.0;
        }
    }

    fn scale(&mut self, k: f64) {
        self.f.iter_mut().for_each(|v| *v *= k);
        self.d.iter_mut().for_each(|v| *v *= k);
        self.rebuild_cum();
    }

    fn segment(&self, x: f64) -> usize {
        self.s.partition_point(|&si| si <= x).clamp(1, self.s.len() - 1) - 1
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.s[i + 1] - self.s[i];
        let t = (x - self.s[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.f[i]
            + (t3 - 2.0 * t2 + t) * h * self.d[i]
            + (-2.0 * t3 + 3.0 * t2) * self.f[i + 1]
            + (t3 - t2) * h * self.d[i + 1]
    }

    fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.s[i + 1] - self.s[i];
        let t = (x - self.s[i]) / h;
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * self.f[i] + (-6.0 * t2 + 6.0 * t) * self.f[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.d[i]
            + (3.0 * t2 - 2.0 * t) * self.d[i + 1]
    }

    fn primitive(&self, x: f64) -> f64 {
        let x = x.clamp(self.s[0], self.s[self.s.len() - 1]);
        let i = self.segment(x);
        // a single Gauss-Kronrod panel is exact on a cubic
        self.cum[i] + numeric::gk15(&|t| self.eval(t), self.s[i], x).0
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

//! Dormand-Prince 5(4) with the 4th-order continuous extension.
//!
//! The integrator works on fixed-size states `[f64; N]` and reports every
//! accepted step to an observer as a [`DenseSegment`], which can be evaluated
//! anywhere inside the step. Observers may stop the integration, which is how
//! the event logic in [`crate::reduced`] and [`crate::profiles`] is built.
//! A right-hand side that returns a non-finite value makes the step be
//! rejected and retried with a smaller step; this keeps trial stages that
//! leave a singular domain from poisoning the solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Largest step allowed, in units of the independent variable.
    pub max_step: f64,
    /// Smallest step before the integration is declared stuck.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            max_step: f64::INFINITY,
            min_step: 1e-300,
            max_steps: 2_000_000,
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
    d0: [f64; N],
    d1: [f64; N],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.rcont[0][i] + self.rcont[1][i];
        }
        y
    }

    /// Derivative (right-hand side) at the start and end of the step.
    pub fn end_derivatives(&self) -> ([f64; N], [f64; N]) {
        (self.d0, self.d1)
    }

    /// Whether `t` lies inside the step (either orientation).
    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = if self.h == 0.0 { 0.0 } else { (t - self.t0) / self.h };
        self.eval_theta(theta)
    }

    pub fn eval_theta(&self, theta: f64) -> [f64; N] {
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        y
    }
}

/// What the observer wants after seeing an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Final state of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// True when the observer stopped the integration before `t_end`.
    pub stopped: bool,
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], opts: &StepOptions) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / sc;
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}

/// Integrate `y' = rhs(t, y)` from `t0` toward `t_end`.
///
/// `step_cap(t, y)` bounds the step length from the current state (positive,
/// possibly infinite). `observe` sees every accepted step.
pub fn integrate<const N: usize, F, L, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &StepOptions,
    h_init: Option<f64>,
    step_cap: L,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    L: Fn(f64, &[f64; N]) -> f64,
    O: FnMut(&DenseSegment<N>) -> Flow,
{
    let span = t_end - t0;
    let mut out = Outcome {
        t: t0,
        y: y0,
        accepted_steps: 0,
        rejected_steps: 0,
        stopped: false,
    };
    if span == 0.0 {
        return Ok(out);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    if !all_finite(&k1) {
        return Err(Error::Domain(format!("right-hand side is not finite at t = {t0}")));
    }
    let mut h = match h_init {
        Some(h) => h.abs(),
        None => initial_step(&mut rhs, t, &y, &k1, dir, opts),
    }
    .min(span.abs());
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        if out.accepted_steps + out.rejected_steps >= opts.max_steps {
            return Err(Error::Step { at: t, step: h });
        }
        let remaining = (t_end - t).abs();
        h = h.min(opts.max_step).min(step_cap(t, &y).abs());
        let mut landing = false;
        if h >= remaining || remaining - h <= 1e-13 * t.abs().max(1.0) {
            h = remaining;
            landing = true;
        }
        if !(h > opts.min_step) {
            return Err(Error::Step { at: t, step: h });
        }
        let hs = h * dir;

        let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t1 = if landing { t_end } else { t + hs };
        let k7 = rhs(t1, &y1);

        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| all_finite(k)) && all_finite(&y1);
        if !stages_ok {
            out.rejected_steps += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&y, &y1, &err, opts);
        if en <= 1.0 {
            let mut rcont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - hs * k7[i] - bspl;
                rcont[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let seg = DenseSegment {
                t0: t,
                h: t1 - t,
                rcont,
                d0: k1,
                d1: k7,
            };
            t = t1;
            y = y1;
            k1 = k7;
            out.accepted_steps += 1;
            out.t = t;
            out.y = y;
            if observe(&seg) == Flow::Stop {
                out.stopped = true;
                return Ok(out);
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h *= if last_rejected { fac.min(1.0) } else { fac };
            last_rejected = false;
        } else {
            out.rejected_steps += 1;
            last_rejected = true;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(out)
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dir: f64,
    opts: &StepOptions,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(opts.max_step);
    let y1 = axpy(y, h0 * dir, &[(1.0, k1)]);
    let k2 = rhs(t + h0 * dir, &y1);
    if !all_finite(&k2) {
        return h0 * 1e-3;
    }
    let mut d2 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.max_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_to_tolerance() {
        let opts = StepOptions { atol: 1e-12, rtol: 1e-12, ..Default::default() };
        let out = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &opts, None, |_, _| f64::INFINITY, |_| Flow::Continue)
            .unwrap();
        assert_eq!(out.t, 5.0);
        assert!((out.y[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn backward_integration_and_dense_output() {
        let opts = StepOptions { atol: 1e-12, rtol: 1e-12, ..Default::default() };
        let mut segs = Vec::new();
        integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            -3.0,
            &opts,
            None,
            |_, _| f64::INFINITY,
            |s| {
                segs.push(*s);
                Flow::Continue
            },
        )
        .unwrap();
        for s in &segs {
            let tm = s.t0 + 0.37 * s.h;
            let y = s.eval(tm);
            assert!((y[0] - tm.sin()).abs() < 1e-9, "dense sin at {tm}");
            assert!((y[1] - tm.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn observer_stops_and_caps_bound_steps() {
        let opts = StepOptions::default();
        let mut count = 0;
        let out = integrate(
            |_, _y: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            10.0,
            &opts,
            None,
            |_, _| 0.5,
            |s| {
                assert!(s.h <= 0.5 + 1e-15);
                count += 1;
                if count == 3 { Flow::Stop } else { Flow::Continue }
            },
        )
        .unwrap();
        assert!(out.stopped);
        assert_eq!(out.accepted_steps, 3);
    }

    #[test]
    fn non_finite_stages_are_rejected() {
        // y' = 1/sqrt(1 - y): finite on y < 1, blows up at the wall
        let opts = StepOptions { atol: 1e-10, rtol: 1e-10, ..Default::default() };
        let mut last = 0.0;
        let out = integrate(
            |_, y: &[f64; 1]| [if y[0] < 1.0 { 1.0 / (1.0 - y[0]).sqrt() } else { f64::NAN }],
            0.0,
            [0.0],
            0.6,
            &opts,
            None,
            |_, y| 0.1 * (1.0 - y[0]).max(0.0) + 1e-14,
            |s| {
                last = s.end()[0];
                if last > 0.999 { Flow::Stop } else { Flow::Continue }
            },
        );
        // exact solution reaches the wall at t = 2/3, after t_end
        let out = out.unwrap();
        assert!(!out.stopped);
        let exact = 1.0 - (1.0 - 1.5 * 0.6f64).powf(2.0 / 3.0);
        assert!((out.y[0] - exact).abs() < 1e-8);
    }
}

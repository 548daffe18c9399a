//! Dormand–Prince 5(4) with the classic elementary step-size controller.
//!
//! The stepper integrates exactly up to requested stop times, so sampled
//! output lives on the integration grid and needs no interpolation. The
//! controller's step proposal survives a truncated step.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-12,
            h_max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size fell below the minimum at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

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

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for &(c, k) in terms {
        if c == 0.0 {
            continue;
        }
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

/// Adaptive integrator for `y' = f(t, y)` with a fixed-size state.
pub struct Dopri5<const N: usize, F> {
    f: F,
    opts: OdeOptions,
    t: f64,
    y: [f64; N],
    dy: [f64; N],
    h: Option<f64>,
    accepted: usize,
    rejected: usize,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t: f64, y: [f64; N], opts: OdeOptions) -> Self {
        let dy = f(t, &y);
        Dopri5 {
            f,
            opts,
            t,
            y,
            dy,
            h: None,
            accepted: 0,
            rejected: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[f64; N] {
        &self.dy
    }

    pub fn accepted_steps(&self) -> usize {
        self.accepted
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn set_max_step(&mut self, h_max: f64) {
        self.opts.h_max = h_max;
        if let Some(h) = self.h.as_mut() {
            *h = h.min(h_max);
        }
    }

    /// Replace the state, e.g. at a discontinuity of the right-hand side.
    pub fn reset(&mut self, t: f64, y: [f64; N]) {
        self.t = t;
        self.y = y;
        self.dy = (self.f)(t, &y);
    }

    fn weight(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self, dir: f64) -> f64 {
        // Hairer–Nørsett–Wanner starting step heuristic
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..N {
            let sc = self.weight(self.y[i], 0.0);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.dy[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.opts.h_max);
        let y1 = lin(&self.y, dir * h0, &[(1.0, &self.dy)]);
        let f1 = (self.f)(self.t + dir * h0, &y1);
        let mut d2 = 0.0;
        for i in 0..N {
            let sc = self.weight(self.y[i], 0.0);
            d2 += ((f1[i] - self.dy[i]) / sc).powi(2);
        }
        let d2 = (d2 / N as f64).sqrt() / h0;
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / m).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// One attempted step of size `h`; returns the error norm, new state and
    /// its derivative.
    fn attempt(&mut self, h: f64) -> (f64, [f64; N], [f64; N]) {
        let (t, y, k1) = (self.t, self.y, self.dy);
        let k2 = (self.f)(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
        let k3 = (self.f)(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = (self.f)(t + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = (self.f)(
            t + C5 * h,
            &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = (self.f)(
            t + h,
            &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y5 = lin(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = (self.f)(t + h, &y5);
        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.weight(y[i], y5[i]);
            err += (e / sc).powi(2);
        }
        ((err / N as f64).sqrt(), y5, k7)
    }

    /// Advance exactly to `t_end`, calling `on_step(t, y, dy)` after every
    /// accepted step (including the final one).
    pub fn advance_to<O>(&mut self, t_end: f64, mut on_step: O) -> Result<(), OdeError>
    where
        O: FnMut(f64, &[f64; N], &[f64; N]),
    {
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(dir),
        }
        .min(self.opts.h_max);

        loop {
            let remaining = (t_end - self.t) * dir;
            if remaining <= 0.0 {
                return Ok(());
            }
            // snap to the target rather than leave a sliver behind
            let last = h >= remaining * (1.0 - 1e-12) || remaining - h < 1e-3 * h;
            let h_try = if last { remaining } else { h };
            let (err, y_new, dy_new) = self.attempt(dir * h_try);

            if !err.is_finite() {
                // a blown-up trial state; shrink hard and retry
                self.rejected += 1;
                h = 0.1 * h_try;
                if h < self.opts.h_min {
                    return Err(OdeError::NonFinite { t: self.t });
                }
                continue;
            }

            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + dir * h_try };
                self.y = y_new;
                self.dy = dy_new;
                self.accepted += 1;
                if !y_new.iter().all(|v| v.is_finite()) {
                    return Err(OdeError::NonFinite { t: self.t });
                }
                on_step(self.t, &self.y, &self.dy);
                // a truncated final step says nothing about the next proposal
                let h_next = if last && h_try < h { h } else { h_try * fac };
                h = h_next.min(self.opts.h_max);
                self.h = Some(h);
            } else {
                self.rejected += 1;
                h = h_try * fac.min(1.0);
                if h < self.opts.h_min {
                    return Err(OdeError::StepFailure { t: self.t, h });
                }
            }
        }
    }
}

/// Classical fixed-step RK4; used as an independent reference in tests.
pub fn rk4_fixed<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, dt: f64) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let n = ((t1 - t0) / dt).abs().ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &lin(&y, h, &[(0.5, &k1)]));
        let k3 = f(t + 0.5 * h, &lin(&y, h, &[(0.5, &k2)]));
        let k4 = f(t + h, &lin(&y, h, &[(1.0, &k3)]));
        y = lin(
            &y,
            h,
            &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
        );
    }
    y
}

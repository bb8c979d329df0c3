//! Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! The stepper is exposed directly so callers that need event detection
//! (section crossings, blow-up) can drive it step by step and query the
//! interpolant between accepted steps.

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

// Hairer's dense-output coefficients for DOPRI5.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Integration stops (not an error) once any component exceeds this in magnitude.
    pub blowup: f64,
    pub h_min: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            max_steps: 2_000_000,
            blowup: 1e8,
            h_min: 1e-14,
        }
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    BlowUp { t: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_error: f64,
}

/// Adaptive DOPRI5 stepper for an N-dimensional autonomous-or-not system.
pub struct Dopri5<F, const N: usize>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    opts: OdeOptions,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    // dense output of the last accepted step
    t_old: f64,
    h_old: f64,
    rcont: [[f64; N]; 5],
    pub stats: StepStats,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    /// `t_dir_end` only fixes the direction of integration and scales the first step.
    pub fn new(f: F, t0: f64, y0: [f64; N], t_dir_end: f64, opts: OdeOptions) -> Result<Self> {
        if t_dir_end == t0 {
            return Err(Error::InvalidInput("degenerate time span".into()));
        }
        let dir = (t_dir_end - t0).signum();
        let k1 = f(t0, &y0);
        check_finite(t0, &k1)?;
        let mut s = Self {
            f,
            opts,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            dir,
            t_old: t0,
            h_old: 0.0,
            rcont: [[0.0; N]; 5],
            stats: StepStats::default(),
        };
        s.h = s.initial_step((t_dir_end - t0).abs());
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Start of the last accepted step (dense output is valid on [t_prev, t]).
    pub fn t_prev(&self) -> f64 {
        self.t_old
    }

    fn initial_step(&self, span: f64) -> f64 {
        // Hairer & Wanner, Solving ODEs I, II.4
        let sc: Vec<f64> = (0..N)
            .map(|i| self.opts.atol + self.opts.rtol * self.y[i].abs())
            .collect();
        let d0 = rms((0..N).map(|i| self.y[i] / sc[i]));
        let d1 = rms((0..N).map(|i| self.k1[i] / sc[i]));
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span);
        let y1 = axpy(&self.y, self.dir * h0, &[(1.0, &self.k1)]);
        let f1 = (self.f)(self.t + self.dir * h0, &y1);
        let d2 = rms((0..N).map(|i| (f1[i] - self.k1[i]) / sc[i])) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dm).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advance one accepted step, never stepping past `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<()> {
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::Integration {
                    t: self.t,
                    reason: "maximum number of steps exceeded".into(),
                });
            }
            let remaining = (t_limit - self.t) * self.dir;
            let mut h = self.h.min(remaining);
            if remaining <= 0.0 {
                return Ok(());
            }
            // avoid a sliver of a final step
            if remaining - h < 1e-12 * remaining.max(1.0) {
                h = remaining;
            }
            if h < self.opts.h_min * self.t.abs().max(1.0) && h < remaining {
                return Err(Error::Integration {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let hs = self.dir * h;
            let t = self.t;
            let y = &self.y;
            let k1 = self.k1;
            let k2 = (self.f)(t + C2 * hs, &axpy(y, hs, &[(A21, &k1)]));
            let k3 = (self.f)(t + C3 * hs, &axpy(y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = (self.f)(
                t + C4 * hs,
                &axpy(y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = (self.f)(
                t + C5 * hs,
                &axpy(y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let y6 = axpy(
                y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = (self.f)(t + hs, &y6);
            let y_new = axpy(
                y,
                hs,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = (self.f)(t + hs, &y_new);

            let mut err_sq = 0.0;
            let mut finite = true;
            for i in 0..N {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / sc).powi(2);
                finite &= y_new[i].is_finite() && k7[i].is_finite();
            }
            let err = (err_sq / N as f64).sqrt();
            if !finite || !err.is_finite() {
                if y_new.iter().all(|v| v.is_finite()) && !k7.iter().all(|v| v.is_finite()) {
                    return Err(Error::Integration {
                        t,
                        reason: "NaN in right-hand side".into(),
                    });
                }
                self.stats.rejected += 1;
                self.h = h * 0.2;
                continue;
            }
            if err <= 1.0 {
                let mut rc = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    rc[0][i] = y[i];
                    rc[1][i] = ydiff;
                    rc[2][i] = bspl;
                    rc[3][i] = ydiff - hs * k7[i] - bspl;
                    rc[4][i] = hs
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                self.rcont = rc;
                self.t_old = t;
                self.h_old = hs;
                self.t = if h == remaining { t_limit } else { t + hs };
                self.y = y_new;
                self.k1 = k7;
                self.stats.accepted += 1;
                self.stats.max_error = self.stats.max_error.max(err);
                let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
                self.h = h * fac;
                return Ok(());
            }
            self.stats.rejected += 1;
            self.h = h * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    /// Continuous extension on the last accepted step.
    pub fn dense(&self, t: f64) -> [f64; N] {
        if self.h_old == 0.0 {
            return self.y;
        }
        let theta = (t - self.t_old) / self.h_old;
        let theta1 = 1.0 - theta;
        let rc = &self.rcont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = rc[0][i]
                + theta * (rc[1][i] + theta1 * (rc[2][i] + theta * (rc[3][i] + theta1 * rc[4][i])));
        }
        out
    }

    pub fn blown_up(&self) -> bool {
        self.y.iter().any(|v| v.abs() > self.opts.blowup)
    }
}

fn rms(it: impl Iterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for v in it {
        s += v * v;
        n += 1;
    }
    (s / n.max(1) as f64).sqrt()
}

fn check_finite<const N: usize>(t: f64, k: &[f64; N]) -> Result<()> {
    if k.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Integration {
            t,
            reason: "NaN in right-hand side".into(),
        })
    }
}

/// Samples of a solution at requested output times.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: StepStats,
    pub termination: Termination,
}

/// Integrate from `t0` to `t1`, sampling the dense output at `output_times`
/// (monotone in the direction of integration and inside the span).
pub fn solve<F, const N: usize>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    output_times: &[f64],
    opts: OdeOptions,
) -> Result<OdeSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let dir = (t1 - t0).signum();
    for w in output_times.windows(2) {
        if (w[1] - w[0]) * dir <= 0.0 {
            return Err(Error::InvalidInput(
                "output times must be strictly monotone in the integration direction".into(),
            ));
        }
    }
    let mut solver = Dopri5::new(f, t0, y0, t1, opts)?;
    let mut times = Vec::with_capacity(output_times.len());
    let mut states = Vec::with_capacity(output_times.len());
    let mut idx = 0;
    // outputs at t0 (and anything before the first step) come straight from y0
    while idx < output_times.len() && (output_times[idx] - t0) * dir <= 0.0 {
        times.push(output_times[idx]);
        states.push(y0);
        idx += 1;
    }
    let mut termination = Termination::Completed;
    while (t1 - solver.t()) * dir > 0.0 {
        solver.step(t1)?;
        while idx < output_times.len() && (output_times[idx] - solver.t()) * dir <= 0.0 {
            let tq = output_times[idx];
            let yq = if tq == solver.t() { *solver.y() } else { solver.dense(tq) };
            times.push(tq);
            states.push(yq);
            idx += 1;
        }
        if solver.blown_up() {
            termination = Termination::BlowUp { t: solver.t() };
            break;
        }
    }
    Ok(OdeSolution {
        times,
        states,
        stats: solver.stats.clone(),
        termination,
    })
}

//! Limit cycles by simulation and a Poincaré section through a focus.

use crate::dynsys::{PlanarField, State};
use crate::equilibria::eigenvalues2;
use crate::ode::{Dopri5, OdeOptions};

#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub period: f64,
    /// One period of the orbit, starting on the section.
    pub samples: Vec<(f64, State)>,
    /// Max − min of (e, w) over the orbit.
    pub amplitude: [f64; 2],
    /// Distance between the last two section returns.
    pub return_residual: f64,
}

/// Integrate past a transient, then watch upward crossings of the line through
/// `center` spanned by the imaginary part of its complex eigenvector. An orbit
/// is declared when two successive returns agree within 1e-6 (and within
/// 1e-4 of their distance from the focus).
///
/// Returns `None` on blow-up, when `center` is not a focus, or when no
/// recurrence shows up within `t_window`.
pub fn extract_periodic_orbit<F: PlanarField + ?Sized>(
    field: &F,
    center: [f64; 2],
    guess: State,
    t_transient: f64,
    t_window: f64,
) -> Option<PeriodicOrbit> {
    let j = field.jac(center);
    let eig = eigenvalues2(&j);
    let omega = eig[1].im;
    if omega <= 0.0 {
        return None;
    }
    // Im of the eigenvector for iω
    let d = if j[0][1].abs() >= j[1][0].abs() { [0.0, omega] } else { [omega, 0.0] };
    let n = [-d[1], d[0]];
    let g = |x: &[f64; 2]| n[0] * (x[0] - center[0]) + n[1] * (x[1] - center[1]);

    let opts = OdeOptions::default();
    let t_end = t_transient + t_window;
    let mut solver = Dopri5::new(|_, y: &[f64; 2]| field.eval(*y), 0.0, guess.as_array(), t_end, opts).ok()?;
    while solver.t() < t_transient {
        solver.step(t_transient).ok()?;
        if solver.blown_up() {
            return None;
        }
    }
    let mut prev: Option<(f64, [f64; 2])> = None;
    let mut g_old = g(solver.y());
    while solver.t() < t_end {
        solver.step(t_end).ok()?;
        if solver.blown_up() {
            return None;
        }
        let g_new = g(solver.y());
        if g_old < 0.0 && g_new >= 0.0 {
            let (tc, xc) = locate_crossing(&solver, &g, solver.t_prev(), solver.t());
            if let Some((tp, xp)) = prev {
                let res = (xc[0] - xp[0]).hypot(xc[1] - xp[1]);
                let r = (xc[0] - center[0]).hypot(xc[1] - center[1]);
                // the relative test rejects spirals collapsing onto the focus
                if res < 1e-6 && res < 1e-4 * r {
                    let period = tc - tp;
                    return Some(sample_orbit(field, xc, period, res));
                }
            }
            prev = Some((tc, xc));
        }
        g_old = g_new;
    }
    None
}

fn locate_crossing<F>(
    solver: &Dopri5<F, 2>,
    g: &impl Fn(&[f64; 2]) -> f64,
    mut a: f64,
    mut b: f64,
) -> (f64, [f64; 2])
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let mut ga = g(&solver.dense(a));
    for _ in 0..100 {
        if b - a < 1e-14 * b.abs().max(1.0) {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(&solver.dense(m));
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    (b, solver.dense(b))
}

fn sample_orbit<F: PlanarField + ?Sized>(field: &F, x0: [f64; 2], period: f64, res: f64) -> PeriodicOrbit {
    let n = 400;
    let ts = crate::dynsys::linspace(0.0, period, n + 1);
    let tr = crate::dynsys::integrate(field, State::from(x0), (0.0, period), &ts);
    let samples: Vec<(f64, State)> = match tr {
        Ok(t) => t.times.into_iter().zip(t.states).collect(),
        Err(_) => vec![(0.0, State::from(x0))],
    };
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (_, s) in &samples {
        for (k, v) in [s.e, s.w].iter().enumerate() {
            lo[k] = lo[k].min(*v);
            hi[k] = hi[k].max(*v);
        }
    }
    PeriodicOrbit {
        period,
        samples,
        amplitude: [hi[0] - lo[0], hi[1] - lo[1]],
        return_residual: res,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::CubicField;

    #[test]
    fn rotation_has_period_two_pi() {
        let mut c = [[0.0; 10]; 2];
        c[0][2] = -1.0;
        c[1][1] = 1.0;
        let f = CubicField::new(c);
        let o = extract_periodic_orbit(&f, [0.0, 0.0], State::new(1.0, 0.0), 0.0, 30.0).unwrap();
        assert!((o.period - 2.0 * std::f64::consts::PI).abs() < 1e-6, "{}", o.period);
        assert!((o.amplitude[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn attracting_focus_gives_none() {
        let mut c = [[0.0; 10]; 2];
        c[0][1] = -0.1;
        c[0][2] = -1.0;
        c[1][1] = 1.0;
        c[1][2] = -0.1;
        let f = CubicField::new(c);
        assert!(extract_periodic_orbit(&f, [0.0, 0.0], State::new(1.0, 0.0), 0.0, 200.0).is_none());
    }
}

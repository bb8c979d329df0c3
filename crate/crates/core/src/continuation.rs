//! Pseudo-arclength path following for an implicitly defined curve
//! G(y) = 0, G: R^n -> R^(n-1).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An implicitly defined one-dimensional solution curve.
pub trait ImplicitCurve {
    fn dim(&self) -> usize;
    fn residual(&self, y: &[f64]) -> DVector<f64>;
    /// (n-1) × n Jacobian of the residual.
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64>;
    /// Whether `y` lies in the region of interest; tracing stops on leaving it.
    fn inside(&self, y: &[f64]) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub struct PalSettings {
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_points: usize,
    pub max_halvings: usize,
    pub newton_max_iter: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
    /// Minimum cosine between consecutive tangents; smaller turns are retried with a shorter step.
    pub min_tangent_cos: f64,
}

impl Default for PalSettings {
    fn default() -> Self {
        Self {
            h0: 1e-3,
            h_min: 1e-5,
            h_max: 1e-2,
            max_points: 200_000,
            max_halvings: 8,
            newton_max_iter: 12,
            residual_tol: 1e-11,
            step_tol: 1e-10,
            min_tangent_cos: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndReason {
    /// Left the region of interest; the last stored point is the first one outside.
    Boundary,
    /// Came back to the starting point.
    Closed,
    /// Corrector failed after the permitted step halvings.
    StepFailure,
    MaxPoints,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub points: Vec<Vec<f64>>,
    pub tangents: Vec<Vec<f64>>,
    pub end: EndReason,
}

/// Unit tangent: null vector of the Jacobian, oriented along `hint`.
pub fn tangent(jac: &DMatrix<f64>, hint: &[f64]) -> Option<DVector<f64>> {
    let n = jac.ncols();
    let mut a = DMatrix::<f64>::zeros(n, n);
    a.view_mut((0, 0), (n - 1, n)).copy_from(jac);
    let h = DVector::from_column_slice(hint);
    let hn = h.norm();
    let mut t = if hn > 0.0 {
        for j in 0..n {
            a[(n - 1, j)] = h[j] / hn;
        }
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[n - 1] = 1.0;
        a.clone().lu().solve(&rhs)
    } else {
        None
    };
    if t.as_ref().map(|v| !v.iter().all(|x| x.is_finite())).unwrap_or(true) {
        // hint nearly orthogonal to the curve; fall back to the smallest right singular vector
        let svd = jac.clone().insert_rows(n - 1, 1, 0.0).svd(false, true);
        let vt = svd.v_t?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
        t = Some(vt.row(imin).transpose());
    }
    let mut t = t?;
    let nrm = t.norm();
    if nrm == 0.0 || !nrm.is_finite() {
        return None;
    }
    t /= nrm;
    if hn > 0.0 && t.dot(&h) < 0.0 {
        t = -t;
    }
    Some(t)
}

/// Newton on the bordered system [G(y); t·(y − y_pred)] = 0.
pub fn correct<C: ImplicitCurve + ?Sized>(
    curve: &C,
    y_pred: &DVector<f64>,
    t: &DVector<f64>,
    s: &PalSettings,
) -> Option<(DVector<f64>, usize)> {
    let n = curve.dim();
    let mut y = y_pred.clone();
    for it in 0..s.newton_max_iter {
        let g = curve.residual(y.as_slice());
        let jac = curve.jacobian(y.as_slice());
        let mut a = DMatrix::<f64>::zeros(n, n);
        a.view_mut((0, 0), (n - 1, n)).copy_from(&jac);
        for j in 0..n {
            a[(n - 1, j)] = t[j];
        }
        let mut rhs = DVector::<f64>::zeros(n);
        for i in 0..n - 1 {
            rhs[i] = -g[i];
        }
        rhs[n - 1] = -t.dot(&(&y - y_pred));
        let dy = a.lu().solve(&rhs)?;
        if !dy.iter().all(|v| v.is_finite()) {
            return None;
        }
        y += &dy;
        if dy.norm() < s.step_tol {
            let g = curve.residual(y.as_slice());
            if g.norm() < s.residual_tol {
                return Some((y, it + 1));
            }
        }
    }
    let g = curve.residual(y.as_slice());
    if g.norm() < s.residual_tol {
        Some((y, s.newton_max_iter))
    } else {
        None
    }
}

/// Polish a point onto the curve keeping the hyperplane through `y0` orthogonal to `dir`.
pub fn project<C: ImplicitCurve + ?Sized>(
    curve: &C,
    y0: &[f64],
    dir: &[f64],
    s: &PalSettings,
) -> Option<DVector<f64>> {
    let y = DVector::from_column_slice(y0);
    let mut t = DVector::from_column_slice(dir);
    let n = t.norm();
    if n == 0.0 {
        return None;
    }
    t /= n;
    correct(curve, &y, &t, s).map(|r| r.0)
}

/// Trace from `y0` in the direction whose tangent agrees with `dir_hint`.
pub fn trace<C: ImplicitCurve + ?Sized>(
    curve: &C,
    y0: &[f64],
    dir_hint: &[f64],
    s: &PalSettings,
) -> Result<Trace> {
    let y_start = DVector::from_column_slice(y0);
    let g0 = curve.residual(y0);
    if g0.norm() > 1e-8 {
        return Err(Error::Divergence(format!(
            "start point is not on the curve (residual {:e})",
            g0.norm()
        )));
    }
    let t0 = tangent(&curve.jacobian(y0), dir_hint)
        .ok_or_else(|| Error::Divergence("no tangent at start point".into()))?;
    let mut pts = vec![y_start.clone()];
    let mut tans = vec![t0.clone()];
    let mut y = y_start.clone();
    let mut t = t0.clone();
    let mut h = s.h0.clamp(s.h_min, s.h_max);
    let mut arclength = 0.0;
    let end = loop {
        if pts.len() >= s.max_points {
            break EndReason::MaxPoints;
        }
        let mut accepted = None;
        let mut hh = h;
        for _ in 0..=s.max_halvings {
            let y_pred = &y + &t * hh;
            if let Some((y_new, iters)) = correct(curve, &y_pred, &t, s) {
                if let Some(t_new) = tangent(&curve.jacobian(y_new.as_slice()), t.as_slice()) {
                    let cos = t_new.dot(&t);
                    let dist = (&y_new - &y).norm();
                    if (cos >= s.min_tangent_cos || hh <= s.h_min * 1.0001) && dist < 3.0 * hh {
                        accepted = Some((y_new, t_new, iters, hh));
                        break;
                    }
                }
            }
            if hh <= s.h_min * 1.0001 {
                break;
            }
            hh = (hh * 0.5).max(s.h_min);
        }
        let Some((y_new, t_new, iters, used)) = accepted else {
            break EndReason::StepFailure;
        };
        arclength += (&y_new - &y).norm();
        let outside = !curve.inside(y_new.as_slice());
        // loop closure: back at the start, heading the same way
        let closing = arclength > 10.0 * s.h_max
            && (&y_new - &y_start).norm() < used.max(s.h_min)
            && t_new.dot(&t0) > 0.5;
        y = y_new;
        t = t_new;
        pts.push(y.clone());
        tans.push(t.clone());
        if outside {
            break EndReason::Boundary;
        }
        if closing {
            break EndReason::Closed;
        }
        h = if iters <= 3 {
            (used * 1.5).min(s.h_max)
        } else if iters >= 7 {
            (used * 0.5).max(s.h_min)
        } else {
            used
        };
    };
    Ok(Trace {
        points: pts.into_iter().map(|v| v.as_slice().to_vec()).collect(),
        tangents: tans.into_iter().map(|v| v.as_slice().to_vec()).collect(),
        end,
    })
}

/// Central-difference Jacobian, for defining systems without a closed-form derivative.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> DVector<f64>, y: &[f64], m: usize) -> DMatrix<f64> {
    let n = y.len();
    let mut jac = DMatrix::<f64>::zeros(m, n);
    let mut yp = y.to_vec();
    for j in 0..n {
        let h = 1e-6 * y[j].abs().max(1.0);
        yp[j] = y[j] + h;
        let fp = f(&yp);
        yp[j] = y[j] - h;
        let fm = f(&yp);
        yp[j] = y[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Plain Newton for a square system, used to localize special points.
pub fn newton_square(
    f: impl Fn(&[f64]) -> DVector<f64>,
    jac: impl Fn(&[f64]) -> DMatrix<f64>,
    y0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Option<Vec<f64>> {
    let mut y = DVector::from_column_slice(y0);
    for _ in 0..max_iter {
        let r = f(y.as_slice());
        if !r.iter().all(|v| v.is_finite()) {
            return None;
        }
        let dy = jac(y.as_slice()).lu().solve(&(-&r))?;
        y += &dy;
        if dy.norm() < tol * (1.0 + y.norm()) {
            let r = f(y.as_slice());
            if r.norm() < 1e3 * tol {
                return Some(y.as_slice().to_vec());
            }
        }
    }
    None
}

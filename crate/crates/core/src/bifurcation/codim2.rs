//! Two-parameter continuation of fold and Hopf curves, with detection of
//! Bogdanov–Takens and cusp points along them.

use nalgebra::{DMatrix, DVector};

use super::{cusp_test, det2, det_grad, fold_coefficient, tr2, tr_grad, BifKind, BifPoint, ContinuationSettings};
use crate::continuation::{self, EndReason, ImplicitCurve};
use crate::dynsys::{AffineFamily, CubicField, ParamId, ParamSet, PlanarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codim1Kind {
    SaddleNode,
    Hopf,
}

/// A curve of codim-1 points in a parameter plane.
#[derive(Debug, Clone)]
pub struct TwoParamCurve {
    pub kind: Codim1Kind,
    pub param_names: [String; 2],
    /// (param_x, param_y, e, w) along the curve.
    pub points: Vec<[f64; 4]>,
    /// Per point: SaddleNode, Hopf, or NeutralSaddle (tr = 0 with det < 0).
    pub point_kinds: Vec<BifKind>,
    pub special_points: Vec<BifPoint>,
    pub ends: (EndReason, EndReason),
}

/// Two free parameters of an affine family, the rest held at `p0`.
pub struct TwoParam<'a> {
    pub fam: &'a AffineFamily,
    pub p0: Vec<f64>,
    pub kx: usize,
    pub ky: usize,
}

impl TwoParam<'_> {
    pub fn field(&self, lx: f64, ly: f64) -> CubicField {
        let mut p = self.p0.clone();
        p[self.kx] = lx;
        p[self.ky] = ly;
        self.fam.field_at(&p)
    }
    fn dirs(&self) -> [&CubicField; 2] {
        [&self.fam.dirs[self.kx], &self.fam.dirs[self.ky]]
    }
}

struct Codim1Curve<'a, 'b> {
    prob: &'b TwoParam<'a>,
    kind: Codim1Kind,
    ranges: [(f64, f64); 2],
    bound: f64,
}

impl ImplicitCurve for Codim1Curve<'_, '_> {
    fn dim(&self) -> usize {
        4
    }
    fn residual(&self, y: &[f64]) -> DVector<f64> {
        let f = self.prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let v = f.eval(x);
        let j = f.jac(x);
        let g = match self.kind {
            Codim1Kind::SaddleNode => det2(&j),
            Codim1Kind::Hopf => tr2(&j),
        };
        DVector::from_vec(vec![v[0], v[1], g])
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let f = self.prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let j = f.jac(x);
        let [dx, dy] = self.prob.dirs();
        let fx = dx.eval(x);
        let fy = dy.eval(x);
        let g = match self.kind {
            Codim1Kind::SaddleNode => det_grad(&f, &[dx, dy], x),
            Codim1Kind::Hopf => tr_grad(&f, &[dx, dy], x),
        };
        DMatrix::from_row_slice(
            3,
            4,
            &[
                j[0][0], j[0][1], fx[0], fy[0], //
                j[1][0], j[1][1], fx[1], fy[1], //
                g[0], g[1], g[2], g[3],
            ],
        )
    }
    fn inside(&self, y: &[f64]) -> bool {
        y[2] >= self.ranges[0].0
            && y[2] <= self.ranges[0].1
            && y[3] >= self.ranges[1].0
            && y[3] <= self.ranges[1].1
            && y[0].abs() <= self.bound
            && y[1].abs() <= self.bound
    }
}

fn bt_newton(prob: &TwoParam, y0: &[f64]) -> Option<Vec<f64>> {
    let res = |y: &[f64]| {
        let f = prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let v = f.eval(x);
        let j = f.jac(x);
        DVector::from_vec(vec![v[0], v[1], det2(&j), tr2(&j)])
    };
    let jac = |y: &[f64]| {
        let f = prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let j = f.jac(x);
        let [dx, dy] = prob.dirs();
        let fx = dx.eval(x);
        let fy = dy.eval(x);
        let gd = det_grad(&f, &[dx, dy], x);
        let gt = tr_grad(&f, &[dx, dy], x);
        DMatrix::from_row_slice(
            4,
            4,
            &[
                j[0][0], j[0][1], fx[0], fy[0], //
                j[1][0], j[1][1], fx[1], fy[1], //
                gd[0], gd[1], gd[2], gd[3], //
                gt[0], gt[1], gt[2], gt[3],
            ],
        )
    };
    continuation::newton_square(res, jac, y0, 1e-14, 40)
}

fn cusp_newton(prob: &TwoParam, y0: &[f64], refs: ([f64; 2], [f64; 2])) -> Option<Vec<f64>> {
    let res = move |y: &[f64]| {
        let f = prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let v = f.eval(x);
        let j = f.jac(x);
        let (a, _, _) = cusp_test(&f, x, Some(refs.0), Some(refs.1));
        DVector::from_vec(vec![v[0], v[1], det2(&j), a])
    };
    let jac = |y: &[f64]| continuation::fd_jacobian(res, y, 4);
    continuation::newton_square(res, jac, y0, 1e-13, 40)
}

fn bifpoint(prob: &TwoParam, names: &[String; 2], y: &[f64], kind: BifKind, q_ref: Option<[f64; 2]>) -> BifPoint {
    let f = prob.field(y[2], y[3]);
    let x = [y[0], y[1]];
    let j = f.jac(x);
    let r = f.eval(x);
    BifPoint {
        kind,
        param_names: names.to_vec(),
        param_values: vec![y[2], y[3]],
        state: x,
        det: det2(&j),
        trace: tr2(&j),
        residual: r[0].hypot(r[1]),
        lyapunov_l1: None,
        fold_coefficient: if kind == BifKind::Cusp { fold_coefficient(&f, x, q_ref) } else { None },
    }
}

/// Continue a fold or Hopf curve of an affine family from `seed` = (e, w, λx, λy).
pub fn continue_codim1_family(
    prob: &TwoParam,
    kind: Codim1Kind,
    ranges: [(f64, f64); 2],
    seed: [f64; 4],
    settings: &ContinuationSettings,
) -> Result<TwoParamCurve> {
    let curve = Codim1Curve {
        prob,
        kind,
        ranges,
        bound: settings.state_bound,
    };
    let names = [prob.fam.names[prob.kx].clone(), prob.fam.names[prob.ky].clone()];
    // polish the seed onto the curve at fixed λy
    let y0 = continuation::project(&curve, &seed, &[0.0, 0.0, 0.0, 1.0], &settings.pal)
        .map(|v| v.as_slice().to_vec())
        .ok_or_else(|| Error::Divergence("seed does not converge onto the curve".into()))?;
    let hint = [0.0, 0.0, 0.0, 1.0];
    let fwd = continuation::trace(&curve, &y0, &hint, &settings.pal)?;
    let mut ys: Vec<Vec<f64>> = Vec::new();
    let mut ends = (EndReason::Closed, fwd.end);
    if fwd.end != EndReason::Closed {
        let bwd = continuation::trace(&curve, &y0, &[0.0, 0.0, 0.0, -1.0], &settings.pal)?;
        ends.0 = bwd.end;
        let mut b = bwd.points;
        b.reverse();
        b.pop();
        ys.extend(b);
    }
    ys.extend(fwd.points);

    let mut point_kinds = Vec::with_capacity(ys.len());
    let mut dets = Vec::with_capacity(ys.len());
    let mut trs = Vec::with_capacity(ys.len());
    let mut folds: Vec<f64> = Vec::with_capacity(ys.len());
    let mut refs: Vec<([f64; 2], [f64; 2])> = Vec::with_capacity(ys.len());
    let mut prev: Option<([f64; 2], [f64; 2])> = None;
    for y in &ys {
        let f = prob.field(y[2], y[3]);
        let x = [y[0], y[1]];
        let j = f.jac(x);
        dets.push(det2(&j));
        trs.push(tr2(&j));
        point_kinds.push(match kind {
            Codim1Kind::SaddleNode => BifKind::SaddleNode,
            Codim1Kind::Hopf if det2(&j) > 0.0 => BifKind::Hopf,
            Codim1Kind::Hopf => BifKind::NeutralSaddle,
        });
        if kind == Codim1Kind::SaddleNode {
            let (a, q, p) = cusp_test(&f, x, prev.map(|r| r.0), prev.map(|r| r.1));
            prev = Some((q, p));
            refs.push((q, p));
            folds.push(a);
        }
    }

    let mut special = Vec::new();
    for i in 0..ys.len().saturating_sub(1) {
        let (ya, yb) = (&ys[i], &ys[i + 1]);
        let interp = |ga: f64, gb: f64| -> Vec<f64> {
            let s = if ga != gb { ga / (ga - gb) } else { 0.5 };
            (0..4).map(|k| ya[k] + s * (yb[k] - ya[k])).collect()
        };
        let bt_test = match kind {
            Codim1Kind::SaddleNode => (trs[i], trs[i + 1]),
            Codim1Kind::Hopf => (dets[i], dets[i + 1]),
        };
        if bt_test.0 * bt_test.1 < 0.0 {
            let g = interp(bt_test.0, bt_test.1);
            let y = bt_newton(prob, &g).filter(|y| close(y, &g, 1e-3)).unwrap_or(g);
            special.push(bifpoint(prob, &names, &y, BifKind::BogdanovTakens, None));
        }
        if kind == Codim1Kind::SaddleNode && folds[i] * folds[i + 1] < 0.0 {
            let g = interp(folds[i], folds[i + 1]);
            let y = cusp_newton(prob, &g, refs[i]).filter(|y| close(y, &g, 1e-3)).unwrap_or(g);
            special.push(bifpoint(prob, &names, &y, BifKind::Cusp, Some(refs[i].0)));
        }
    }

    Ok(TwoParamCurve {
        kind,
        param_names: names,
        points: ys.iter().map(|y| [y[2], y[3], y[0], y[1]]).collect(),
        point_kinds,
        special_points: special,
        ends,
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

/// Continue a fold or Hopf curve of the model in the plane of `ids` from a
/// one-parameter special point (whose single parameter must be `ids.0`).
pub fn continue_codim1_in_two_params(
    p: &ParamSet,
    kind: Codim1Kind,
    ids: (ParamId, ParamId),
    ranges: [(f64, f64); 2],
    seed: &BifPoint,
    settings: &ContinuationSettings,
) -> Result<TwoParamCurve> {
    let expected = match kind {
        Codim1Kind::SaddleNode => BifKind::SaddleNode,
        Codim1Kind::Hopf => BifKind::Hopf,
    };
    // tr = 0 continues through neutral saddles into Hopf points, so either seeds a Hopf curve
    let ok = seed.kind == expected || (kind == Codim1Kind::Hopf && seed.kind == BifKind::NeutralSaddle);
    if !ok {
        return Err(Error::NoSeed);
    }
    let mut base = *p;
    for (n, v) in seed.param_names.iter().zip(&seed.param_values) {
        base.set(n.parse()?, *v);
    }
    let fam = ParamSet::family();
    let prob = TwoParam {
        fam: &fam,
        p0: base.to_array().to_vec(),
        kx: ids.0.index(),
        ky: ids.1.index(),
    };
    let y0 = [seed.state[0], seed.state[1], base.get(ids.0), base.get(ids.1)];
    continue_codim1_family(&prob, kind, ranges, y0, settings)
}

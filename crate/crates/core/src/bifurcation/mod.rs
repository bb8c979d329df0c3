//! Equilibrium branches under parameter variation and their special points.

pub mod codim2;
pub mod lyapunov;
pub mod periodic;

use nalgebra::{Complex, DMatrix, DVector};

use crate::continuation::{self, EndReason, ImplicitCurve, PalSettings};
use crate::dynsys::{AffineFamily, CubicField, Mat2, ParamId, ParamSet, PlanarField};
use crate::equilibria::{self, eigenvalues2};
use crate::error::{Error, Result};

pub use codim2::{continue_codim1_in_two_params, Codim1Kind, TwoParamCurve};
pub use lyapunov::{first_lyapunov, first_lyapunov_at, Lyapunov};
pub use periodic::{extract_periodic_orbit, PeriodicOrbit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifKind {
    SaddleNode,
    Hopf,
    NeutralSaddle,
    BogdanovTakens,
    Cusp,
}

impl BifKind {
    pub fn name(self) -> &'static str {
        match self {
            BifKind::SaddleNode => "SN",
            BifKind::Hopf => "H",
            BifKind::NeutralSaddle => "NS",
            BifKind::BogdanovTakens => "BT",
            BifKind::Cusp => "CP",
        }
    }
}

/// A localized bifurcation (or neutral-saddle) point.
#[derive(Debug, Clone, PartialEq)]
pub struct BifPoint {
    pub kind: BifKind,
    pub param_names: Vec<String>,
    pub param_values: Vec<f64>,
    pub state: [f64; 2],
    pub det: f64,
    pub trace: f64,
    /// Equilibrium residual ‖f‖ at the point.
    pub residual: f64,
    /// First Lyapunov coefficient (Hopf only).
    pub lyapunov_l1: Option<f64>,
    /// Quadratic fold coefficient (saddle-node and cusp only).
    pub fold_coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub param: f64,
    pub e: f64,
    pub w: f64,
    pub eigenvalues: [Complex<f64>; 2],
    pub stable: bool,
    pub det: f64,
    pub trace: f64,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub param_index: usize,
    pub param_name: String,
    pub points: Vec<BranchPoint>,
    pub special_points: Vec<BifPoint>,
    /// How each end of the branch terminated (backward end, forward end).
    pub ends: (EndReason, EndReason),
}

impl Branch {
    pub fn param_extent(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.param), hi.max(p.param))
        })
    }

    /// Whether any end stopped because the corrector failed.
    pub fn truncated(&self) -> bool {
        self.ends.0 == EndReason::StepFailure || self.ends.1 == EndReason::StepFailure
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ContinuationSettings {
    pub pal: PalSettings,
    /// Tracing stops when |e| or |w| exceeds this.
    pub state_bound: f64,
    /// Parameter values (evenly spaced, plus the baseline) at which seed equilibria are computed.
    pub n_seed_samples: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            pal: PalSettings::default(),
            state_bound: 50.0,
            n_seed_samples: 9,
        }
    }
}

pub(crate) fn det2(j: &Mat2) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

pub(crate) fn tr2(j: &Mat2) -> f64 {
    j[0][0] + j[1][1]
}

/// Gradient of det J with respect to (e, w) and, through `dir`, a parameter.
pub(crate) fn det_grad(f: &CubicField, dirs: &[&CubicField], x: [f64; 2]) -> Vec<f64> {
    let j = f.jac(x);
    let h = f.hessian(x);
    let mut g = Vec::with_capacity(2 + dirs.len());
    for m in 0..2 {
        g.push(
            h[0][0][m] * j[1][1] + j[0][0] * h[1][1][m] - h[0][1][m] * j[1][0] - j[0][1] * h[1][0][m],
        );
    }
    for d in dirs {
        let dj = d.jac(x);
        g.push(dj[0][0] * j[1][1] + j[0][0] * dj[1][1] - dj[0][1] * j[1][0] - j[0][1] * dj[1][0]);
    }
    g
}

pub(crate) fn tr_grad(f: &CubicField, dirs: &[&CubicField], x: [f64; 2]) -> Vec<f64> {
    let h = f.hessian(x);
    let mut g = vec![h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
    for d in dirs {
        g.push(tr2(&d.jac(x)));
    }
    g
}

/// Quadratic coefficient ½ pᵀB(q,q) of the fold normal form, with Jq = 0,
/// pᵀJ = 0, |q| = 1, pᵀq = 1. `q_ref` fixes the sign of q.
pub fn fold_coefficient(f: &CubicField, x: [f64; 2], q_ref: Option<[f64; 2]>) -> Option<f64> {
    let j = f.jac(x);
    // right null vector from the row of larger norm
    let r0 = j[0][0].hypot(j[0][1]);
    let r1 = j[1][0].hypot(j[1][1]);
    let mut q = if r0 >= r1 { [-j[0][1], j[0][0]] } else { [-j[1][1], j[1][0]] };
    let c0 = j[0][0].hypot(j[1][0]);
    let c1 = j[0][1].hypot(j[1][1]);
    let p = if c0 >= c1 { [-j[1][0], j[0][0]] } else { [-j[1][1], j[0][1]] };
    let qn = q[0].hypot(q[1]);
    if qn == 0.0 {
        return None;
    }
    q = [q[0] / qn, q[1] / qn];
    if let Some(r) = q_ref {
        if q[0] * r[0] + q[1] * r[1] < 0.0 {
            q = [-q[0], -q[1]];
        }
    }
    let pq = p[0] * q[0] + p[1] * q[1];
    if pq.abs() < 1e-300 {
        return None;
    }
    let p = [p[0] / pq, p[1] / pq];
    let h = f.hessian(x);
    let mut s = 0.0;
    for (c, hc) in h.iter().enumerate() {
        let bqq = hc[0][0] * q[0] * q[0] + 2.0 * hc[0][1] * q[0] * q[1] + hc[1][1] * q[1] * q[1];
        s += p[c] * bqq;
    }
    Some(0.5 * s)
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]).max(1e-300);
    [v[0] / n, v[1] / n]
}

fn align(v: [f64; 2], r: Option<[f64; 2]>) -> [f64; 2] {
    match r {
        Some(r) if v[0] * r[0] + v[1] * r[1] < 0.0 => [-v[0], -v[1]],
        _ => v,
    }
}

/// Cusp test function p̂ᵀB(q̂,q̂) with unit right/left null vectors of J.
///
/// Unlike [`fold_coefficient`] it stays finite where pᵀq → 0 (at a
/// Bogdanov–Takens point), so its sign changes mark cusps only. Returns the
/// value and the oriented (q̂, p̂) for continuity along a curve.
pub(crate) fn cusp_test(
    f: &CubicField,
    x: [f64; 2],
    q_ref: Option<[f64; 2]>,
    p_ref: Option<[f64; 2]>,
) -> (f64, [f64; 2], [f64; 2]) {
    let j = f.jac(x);
    let r0 = j[0][0].hypot(j[0][1]);
    let r1 = j[1][0].hypot(j[1][1]);
    let q = if r0 >= r1 { [-j[0][1], j[0][0]] } else { [-j[1][1], j[1][0]] };
    let c0 = j[0][0].hypot(j[1][0]);
    let c1 = j[0][1].hypot(j[1][1]);
    let p = if c0 >= c1 { [-j[1][0], j[0][0]] } else { [-j[1][1], j[0][1]] };
    let q = align(unit(q), q_ref);
    let p = align(unit(p), p_ref);
    let h = f.hessian(x);
    let mut s = 0.0;
    for (c, hc) in h.iter().enumerate() {
        s += p[c] * (hc[0][0] * q[0] * q[0] + 2.0 * hc[0][1] * q[0] * q[1] + hc[1][1] * q[1] * q[1]);
    }
    (s, q, p)
}

/// One-parameter slice of an affine family: parameter `k` free, the others at `p0`.
#[derive(Debug, Clone)]
pub struct OneParam<'a> {
    pub fam: &'a AffineFamily,
    pub p0: Vec<f64>,
    pub k: usize,
}

impl<'a> OneParam<'a> {
    pub fn field(&self, lam: f64) -> CubicField {
        let mut p = self.p0.clone();
        p[self.k] = lam;
        self.fam.field_at(&p)
    }

    fn dir(&self) -> &CubicField {
        &self.fam.dirs[self.k]
    }

    fn name(&self) -> String {
        self.fam.names[self.k].clone()
    }

    fn point(&self, y: &[f64]) -> BranchPoint {
        let j = self.field(y[2]).jac([y[0], y[1]]);
        let eig = eigenvalues2(&j);
        BranchPoint {
            param: y[2],
            e: y[0],
            w: y[1],
            eigenvalues: eig,
            stable: eig[0].re < 0.0 && eig[1].re < 0.0,
            det: det2(&j),
            trace: tr2(&j),
        }
    }
}

struct EquilibriumCurve<'a, 'b> {
    prob: &'b OneParam<'a>,
    range: (f64, f64),
    bound: f64,
}

impl ImplicitCurve for EquilibriumCurve<'_, '_> {
    fn dim(&self) -> usize {
        3
    }
    fn residual(&self, y: &[f64]) -> DVector<f64> {
        let f = self.prob.field(y[2]).eval([y[0], y[1]]);
        DVector::from_vec(f.to_vec())
    }
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let x = [y[0], y[1]];
        let j = self.prob.field(y[2]).jac(x);
        let fl = self.prob.dir().eval(x);
        DMatrix::from_row_slice(2, 3, &[j[0][0], j[0][1], fl[0], j[1][0], j[1][1], fl[1]])
    }
    fn inside(&self, y: &[f64]) -> bool {
        y[2] >= self.range.0 && y[2] <= self.range.1 && y[0].abs() <= self.bound && y[1].abs() <= self.bound
    }
}

/// Distance from `x` to the polyline through `pts` (in (e, w, param) space).
fn polyline_distance(pts: &[BranchPoint], x: [f64; 3]) -> f64 {
    let v = |p: &BranchPoint| [p.e, p.w, p.param];
    let mut best = f64::INFINITY;
    if pts.len() == 1 {
        let a = v(&pts[0]);
        return ((a[0] - x[0]).powi(2) + (a[1] - x[1]).powi(2) + (a[2] - x[2]).powi(2)).sqrt();
    }
    for w in pts.windows(2) {
        let a = v(&w[0]);
        let b = v(&w[1]);
        let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let ax = [x[0] - a[0], x[1] - a[1], x[2] - a[2]];
        let l2 = ab.iter().map(|c| c * c).sum::<f64>();
        let s = if l2 > 0.0 {
            (ab.iter().zip(&ax).map(|(p, q)| p * q).sum::<f64>() / l2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let d = (0..3).map(|i| (ax[i] - s * ab[i]).powi(2)).sum::<f64>().sqrt();
        best = best.min(d);
    }
    best
}

/// Seeds closer than this to a traced branch are treated as lying on it.
const SEED_ON_BRANCH: f64 = 2e-3;

/// Re-solve a stored end point that left the range so it sits exactly on the boundary.
fn clip_to_range(prob: &OneParam, inside: &[f64], outside: &[f64], range: (f64, f64)) -> Option<Vec<f64>> {
    let lb = if outside[2] > range.1 {
        range.1
    } else if outside[2] < range.0 {
        range.0
    } else {
        return None;
    };
    let d = outside[2] - inside[2];
    if d == 0.0 {
        return None;
    }
    let s = (lb - inside[2]) / d;
    let x0 = [inside[0] + s * (outside[0] - inside[0]), inside[1] + s * (outside[1] - inside[1])];
    let f = prob.field(lb);
    equilibria::newton(&f, x0, 1e-12, 30).map(|x| vec![x[0], x[1], lb])
}

/// Pseudo-arclength continuation of equilibria in one parameter from explicit
/// seeds `(param, e, w)`; seeds lying on an already traced branch are skipped.
pub fn continue_branch_family(
    prob: &OneParam,
    range: (f64, f64),
    settings: &ContinuationSettings,
    seeds: &[[f64; 3]],
) -> Result<Vec<Branch>> {
    if seeds.is_empty() {
        return Err(Error::NoSeed);
    }
    if !(range.0 <= range.1) {
        return Err(Error::InvalidInput("empty parameter range".into()));
    }
    let mut branches: Vec<Branch> = Vec::new();
    if range.0 == range.1 {
        for s in seeds {
            branches.push(Branch {
                param_index: prob.k,
                param_name: prob.name(),
                points: vec![prob.point(&[s[1], s[2], s[0]])],
                special_points: vec![],
                ends: (EndReason::Boundary, EndReason::Boundary),
            });
        }
        return Ok(branches);
    }
    let curve = EquilibriumCurve {
        prob,
        range,
        bound: settings.state_bound,
    };
    for s in seeds {
        let y0 = [s[1], s[2], s[0]];
        if !curve.inside(&y0) {
            continue;
        }
        let on_existing = branches
            .iter()
            .any(|b| polyline_distance(&b.points, y0) < SEED_ON_BRANCH);
        if on_existing {
            continue;
        }
        let fwd = continuation::trace(&curve, &y0, &[0.0, 0.0, 1.0], &settings.pal)?;
        let mut ys: Vec<Vec<f64>> = Vec::new();
        let mut ends = (EndReason::Closed, fwd.end);
        if fwd.end != EndReason::Closed {
            let bwd = continuation::trace(&curve, &y0, &[0.0, 0.0, -1.0], &settings.pal)?;
            ends.0 = bwd.end;
            let mut b = bwd.points;
            if bwd.end == EndReason::Boundary && b.len() >= 2 {
                let n = b.len();
                match clip_to_range(prob, &b[n - 2], &b[n - 1], range) {
                    Some(c) => b[n - 1] = c,
                    None => {
                        b.pop();
                    }
                }
            }
            b.reverse();
            ys.extend(b);
            ys.pop(); // seed repeated at the start of the forward trace
        }
        let mut f = fwd.points;
        if fwd.end == EndReason::Boundary && f.len() >= 2 {
            let n = f.len();
            match clip_to_range(prob, &f[n - 2], &f[n - 1], range) {
                Some(c) => f[n - 1] = c,
                None => {
                    f.pop();
                }
            }
        }
        ys.extend(f);
        let points: Vec<BranchPoint> = ys
            .iter()
            .filter(|y| y[0].abs() <= settings.state_bound && y[1].abs() <= settings.state_bound)
            .map(|y| prob.point(y))
            .collect();
        let mut br = Branch {
            param_index: prob.k,
            param_name: prob.name(),
            points,
            special_points: vec![],
            ends,
        };
        br.special_points = detect_codim1(prob, &br, &settings.pal);
        branches.push(br);
    }
    Ok(branches)
}

/// Seed equilibria for a parameter slice: interior equilibria at the baseline
/// value and at evenly spaced values across the range.
pub fn paramset_seeds(p: &ParamSet, id: ParamId, range: (f64, f64), n: usize) -> Vec<[f64; 3]> {
    let base = p.get(id);
    let mut lams = vec![];
    if base >= range.0 && base <= range.1 {
        lams.push(base);
    }
    if n == 1 {
        lams.push(0.5 * (range.0 + range.1));
    } else {
        for i in 0..n {
            lams.push(range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64);
        }
    }
    let mut seeds = vec![];
    for lam in lams {
        for q in equilibria::find_equilibria(&p.with(id, lam)) {
            seeds.push([lam, q.e, q.w]);
        }
    }
    seeds
}

/// Continue interior equilibria of the model in parameter `id` across `range`.
pub fn continue_branch(
    p: &ParamSet,
    id: ParamId,
    range: (f64, f64),
    settings: &ContinuationSettings,
) -> Result<Vec<Branch>> {
    let fam = ParamSet::family();
    let prob = OneParam {
        fam: &fam,
        p0: p.to_array().to_vec(),
        k: id.index(),
    };
    let n = if range.0 == range.1 { 1 } else { settings.n_seed_samples };
    let seeds = if range.0 == range.1 {
        equilibria::find_equilibria(&p.with(id, range.0))
            .iter()
            .map(|q| [range.0, q.e, q.w])
            .collect()
    } else {
        paramset_seeds(p, id, range, n)
    };
    continue_branch_family(&prob, range, settings, &seeds)
}

fn extended_newton(prob: &OneParam, y0: &[f64], kind: BifKind) -> Option<Vec<f64>> {
    let res = |y: &[f64]| {
        let f = prob.field(y[2]);
        let x = [y[0], y[1]];
        let v = f.eval(x);
        let j = f.jac(x);
        let g = if kind == BifKind::SaddleNode { det2(&j) } else { tr2(&j) };
        DVector::from_vec(vec![v[0], v[1], g])
    };
    let jac = |y: &[f64]| {
        let f = prob.field(y[2]);
        let x = [y[0], y[1]];
        let j = f.jac(x);
        let fl = prob.dir().eval(x);
        let g = if kind == BifKind::SaddleNode {
            det_grad(&f, &[prob.dir()], x)
        } else {
            tr_grad(&f, &[prob.dir()], x)
        };
        DMatrix::from_row_slice(3, 3, &[j[0][0], j[0][1], fl[0], j[1][0], j[1][1], fl[1], g[0], g[1], g[2]])
    };
    continuation::newton_square(res, jac, y0, 1e-14, 30)
}

fn make_bifpoint(prob: &OneParam, y: &[f64], kind: BifKind) -> BifPoint {
    let f = prob.field(y[2]);
    let x = [y[0], y[1]];
    let j = f.jac(x);
    let r = f.eval(x);
    let det = det2(&j);
    let kind = match kind {
        BifKind::Hopf | BifKind::NeutralSaddle => {
            if det > 0.0 {
                BifKind::Hopf
            } else {
                BifKind::NeutralSaddle
            }
        }
        k => k,
    };
    let lyapunov_l1 = if kind == BifKind::Hopf {
        first_lyapunov_at(&f, x).ok().map(|l| l.l1)
    } else {
        None
    };
    let fold_coefficient = if kind == BifKind::SaddleNode {
        fold_coefficient(&f, x, None)
    } else {
        None
    };
    BifPoint {
        kind,
        param_names: vec![prob.name()],
        param_values: vec![y[2]],
        state: x,
        det,
        trace: tr2(&j),
        residual: r[0].hypot(r[1]),
        lyapunov_l1,
        fold_coefficient,
    }
}

/// Locate det J = 0 (saddle-node) and tr J = 0 (Hopf / neutral saddle) along a branch.
pub fn detect_codim1(prob: &OneParam, branch: &Branch, pal: &PalSettings) -> Vec<BifPoint> {
    let curve = EquilibriumCurve {
        prob,
        range: (f64::NEG_INFINITY, f64::INFINITY),
        bound: f64::INFINITY,
    };
    let mut out = Vec::new();
    for w in branch.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let ya = [a.e, a.w, a.param];
        let yb = [b.e, b.w, b.param];
        let tests: [(BifKind, fn(&BranchPoint) -> f64); 2] =
            [(BifKind::SaddleNode, |p| p.det), (BifKind::Hopf, |p| p.trace)];
        for (kind, tf) in tests {
            let (ga, gb) = (tf(a), tf(b));
            if ga == 0.0 && gb != 0.0 {
                // exact zero at a stored point is attributed to the segment that starts there
            } else if !(ga * gb < 0.0 || (gb == 0.0 && ga != 0.0)) {
                continue;
            }
            let y = localize(prob, &curve, &ya, &yb, kind, pal);
            let y = extended_newton(prob, &y, kind)
                .filter(|yn| (0..3).all(|i| (yn[i] - y[i]).abs() < 1e-5))
                .unwrap_or(y);
            out.push(make_bifpoint(prob, &y, kind));
        }
    }
    out
}

/// Bisection along the chord between two branch points, projecting each trial
/// point back onto the branch, until the bracket is below 1e-10 in the parameter.
fn localize(
    prob: &OneParam,
    curve: &EquilibriumCurve,
    ya: &[f64; 3],
    yb: &[f64; 3],
    kind: BifKind,
    pal: &PalSettings,
) -> Vec<f64> {
    let chord: Vec<f64> = (0..3).map(|i| yb[i] - ya[i]).collect();
    let test = |y: &[f64]| {
        let j = prob.field(y[2]).jac([y[0], y[1]]);
        if kind == BifKind::SaddleNode {
            det2(&j)
        } else {
            tr2(&j)
        }
    };
    let at = |s: f64| -> Vec<f64> {
        let y0: Vec<f64> = (0..3).map(|i| ya[i] + s * chord[i]).collect();
        continuation::project(curve, &y0, &chord, pal)
            .map(|v| v.as_slice().to_vec())
            .unwrap_or(y0)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut ylo = ya.to_vec();
    let mut yhi = yb.to_vec();
    let mut glo = test(&ylo);
    for _ in 0..200 {
        if (yhi[2] - ylo[2]).abs() < 1e-10 && (hi - lo) * chord.iter().map(|c| c * c).sum::<f64>().sqrt() < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let ym = at(mid);
        let gm = test(&ym);
        if gm == 0.0 {
            return ym;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            ylo = ym;
            glo = gm;
        } else {
            hi = mid;
            yhi = ym;
        }
    }
    let ghi = test(&yhi);
    // secant finish inside the final bracket
    if glo != ghi {
        let s = glo / (glo - ghi);
        return (0..3).map(|i| ylo[i] + s * (yhi[i] - ylo[i])).collect();
    }
    ylo
}

/// Result of a coexistence scan.
#[derive(Debug, Clone)]
pub struct Coexistence {
    /// Merged parameter intervals with at least one stable interior equilibrium.
    pub intervals: Vec<(f64, f64)>,
    /// The interval containing the baseline value, if any.
    pub baseline_interval: Option<(f64, f64)>,
    pub branches: Vec<Branch>,
}

/// Parameter values in `range` for which a stable positive interior equilibrium exists.
pub fn coexistence_scan(
    p: &ParamSet,
    id: ParamId,
    range: (f64, f64),
    settings: &ContinuationSettings,
) -> Result<Coexistence> {
    let branches = match continue_branch(p, id, range, settings) {
        Ok(b) => b,
        Err(Error::NoSeed) => vec![],
        Err(e) => return Err(e),
    };
    let mut ivs: Vec<(f64, f64)> = Vec::new();
    for br in &branches {
        ivs.extend(stable_runs(br));
    }
    ivs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for iv in ivs {
        match merged.last_mut() {
            Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
            _ => merged.push(iv),
        }
    }
    let base = p.get(id);
    let baseline_interval = merged.iter().copied().find(|iv| iv.0 <= base && base <= iv.1);
    Ok(Coexistence {
        intervals: merged,
        baseline_interval,
        branches,
    })
}

/// Parameter intervals of maximal runs of stable, strictly positive branch points,
/// with ends moved onto the localized special point of the bounding segment.
fn stable_runs(br: &Branch) -> Vec<(f64, f64)> {
    let ok = |p: &BranchPoint| p.stable && p.e > 1e-10 && p.w > 1e-10;
    let pts = &br.points;
    let mut out = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        if !ok(&pts[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < pts.len() && ok(&pts[i + 1]) {
            i += 1;
        }
        let end = i;
        let edge = |inner: &BranchPoint, outer: Option<&BranchPoint>| -> f64 {
            let Some(o) = outer else { return inner.param };
            let (lo, hi) = if inner.param <= o.param { (inner.param, o.param) } else { (o.param, inner.param) };
            br.special_points
                .iter()
                .filter(|s| matches!(s.kind, BifKind::SaddleNode | BifKind::Hopf))
                .map(|s| s.param_values[0])
                .filter(|v| *v >= lo - 1e-9 && *v <= hi + 1e-9)
                .min_by(|a, b| (a - inner.param).abs().partial_cmp(&(b - inner.param).abs()).unwrap())
                // e.g. the run ends where the equilibrium leaves the positive quadrant
                .unwrap_or(inner.param)
        };
        let a = edge(&pts[start], if start > 0 { Some(&pts[start - 1]) } else { None });
        let b = edge(&pts[end], pts.get(end + 1));
        out.push((a.min(b), a.max(b)));
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ẋ = μ − x², ẏ = −y with μ the only parameter.
    fn fold_family() -> AffineFamily {
        let mut base = [[0.0; 10]; 2];
        base[0][3] = -1.0;
        base[1][2] = -1.0;
        let mut dir = [[0.0; 10]; 2];
        dir[0][0] = 1.0;
        AffineFamily {
            base: CubicField::new(base),
            dirs: vec![CubicField::new(dir)],
            names: vec!["mu".into()],
        }
    }

    #[test]
    fn normal_form_fold_at_zero() {
        let fam = fold_family();
        let prob = OneParam { fam: &fam, p0: vec![1.0], k: 0 };
        let br = continue_branch_family(&prob, (-1.0, 1.0), &ContinuationSettings::default(), &[[1.0, 1.0, 0.0]])
            .unwrap();
        assert_eq!(br.len(), 1);
        let sn: Vec<_> = br[0].special_points.iter().filter(|s| s.kind == BifKind::SaddleNode).collect();
        assert_eq!(sn.len(), 1);
        assert!(sn[0].param_values[0].abs() < 1e-10, "{:?}", sn[0]);
        assert!(sn[0].state[0].abs() < 1e-5);
        // both halves reach the boundary μ = 1; stored points straddle the fold
        let (lo, hi) = br[0].param_extent();
        assert!(lo > -1e-12 && lo < 1e-4 && (hi - 1.0).abs() < 1e-12, "{lo} {hi}");
        assert!(br[0].points.first().unwrap().e < 0.0 && br[0].points.last().unwrap().e > 0.0);
    }

    #[test]
    fn fold_coefficient_of_normal_form() {
        let fam = fold_family();
        let f = fam.field_at(&[0.0]);
        // q = (1, 0) after alignment, p = (1, 0): ½·(−2) = −1
        assert!((fold_coefficient(&f, [0.0, 0.0], Some([1.0, 0.0])).unwrap() + 1.0).abs() < 1e-14);
    }
}

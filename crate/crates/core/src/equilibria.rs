//! Interior equilibria: elimination of e to a degree-7 polynomial in w,
//! back-substitution, 2D Newton polish and linear stability classification.

use nalgebra::Complex;

use crate::dynsys::{Mat2, ParamSet, PlanarField, State};
use crate::error::{Error, Result};
use crate::poly;

/// Coefficients P0..P7 of the wolf polynomial, ascending powers of w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfPolynomial {
    pub coeffs: [f64; 8],
}

impl WolfPolynomial {
    pub fn eval(&self, w: f64) -> f64 {
        poly::eval(&self.coeffs, w)
    }
}

/// Closed-form P0..P7 in terms of the 14 parameters.
#[rustfmt::skip]
pub fn wolf_polynomial(p: &ParamSet) -> WolfPolynomial {
    let ParamSet { a0, a1, a2, a3, a4, a5, b0, b1, b2, b3, b4, b5, b6, b7 } = *p;
    let p0 = b1 * b5 * a1 * a0 + b1 * a1 * a4 * b0 - a4 * b1 * b1 * a0 - b0 * b5 * a1 * a1;
    let p1 = -b1 * b5 * a1 * a2 - b1 * b5 * a3 * a0 + a4 * a4 * b0 * b0 - b3 * b5 * a1 * a0
            + b5 * b5 * a0 * a0 + b2 * b5 * a1 * a1 - b1 * a1 * a4 * b2
            + 2.0 * b1 * a4 * b3 * a0 - 2.0 * b5 * a0 * a4 * b0 - b1 * a3 * a4 * b0
            + a4 * b1 * b1 * a2 - b3 * a1 * a4 * b0 + 2.0 * b0 * b5 * a1 * a3;
    let p2 = -b0 * b5 * a3 * a3 + 2.0 * b5 * a2 * a4 * b0 + b3 * a3 * a4 * b0 + b1 * a5 * a4 * b0
            + b1 * b5 * a3 * a2 - b3 * b3 * a4 * a0 + b6 * b5 * a1 * a0
            - 2.0 * b1 * a4 * b3 * a2 - 2.0 * b5 * b5 * a0 * a2 + b3 * b5 * a3 * a0
            + b1 * b5 * a5 * a0 - 2.0 * b2 * b5 * a1 * a3 + b6 * a1 * a4 * b0
            - 2.0 * b1 * a4 * b6 * a0 + b1 * a3 * a4 * b2 - 2.0 * a4 * a4 * b0 * b2
            + b3 * a1 * a4 * b2 + b3 * b5 * a1 * a2 - b4 * b5 * a1 * a1
            - 2.0 * b0 * b5 * a1 * a5 + 2.0 * b5 * a0 * a4 * b2 + b1 * a1 * a4 * b4;
    let p3 = -b6 * b5 * a3 * a0 - b3 * b5 * a5 * a0 - 2.0 * b5 * a0 * a4 * b4
            + 2.0 * b1 * a4 * b6 * a2 + 2.0 * b0 * b5 * a3 * a5 + 2.0 * b3 * a4 * b6 * a0
            - 2.0 * b5 * a2 * a4 * b2 - b1 * a5 * a4 * b2 - b1 * b5 * a5 * a2
            - b3 * b5 * a3 * a2 + 2.0 * b2 * b5 * a1 * a5 + 2.0 * b4 * b5 * a1 * a3
            - b6 * a3 * a4 * b0 - b3 * a3 * a4 * b2 - b3 * a5 * a4 * b0 - b6 * b5 * a1 * a2
            - b3 * a1 * a4 * b4 - b6 * a1 * a4 * b2 - b1 * a1 * a4 * b7 - b1 * a3 * a4 * b4
            + b7 * b5 * a1 * a1 + b3 * b3 * a4 * a2 + b2 * b5 * a3 * a3
            + 2.0 * a4 * a4 * b0 * b4 + a4 * a4 * b2 * b2 + b5 * b5 * a2 * a2;
    let p4 = -2.0 * b4 * b5 * a1 * a5 + 2.0 * b5 * a2 * a4 * b4 + b3 * b5 * a5 * a2
            + b6 * b5 * a3 * a2 + b3 * a3 * a4 * b4 - b4 * b5 * a3 * a3 - b6 * b6 * a4 * a0
            + b6 * a3 * a4 * b2 + b1 * a3 * a4 * b7 + b1 * a5 * a4 * b4
            - 2.0 * b7 * b5 * a1 * a3 + b3 * a5 * a4 * b2 + b6 * a5 * a4 * b0
            - b0 * b5 * a5 * a5 - 2.0 * b3 * a4 * b6 * a2 - 2.0 * b2 * b5 * a3 * a5
            + b6 * b5 * a5 * a0 - 2.0 * a4 * a4 * b0 * b7 + b3 * a1 * a4 * b7
            + 2.0 * b5 * a0 * a4 * b7 - 2.0 * a4 * a4 * b2 * b4 + b6 * a1 * a4 * b4;
    let p5 = -b6 * b5 * a5 * a2 + b2 * b5 * a5 * a5 - b1 * a5 * a4 * b7 - b6 * a5 * a4 * b2
            + 2.0 * b4 * b5 * a3 * a5 + b7 * b5 * a3 * a3 + b6 * b6 * a4 * a2
            - b3 * a5 * a4 * b4 + a4 * a4 * b4 * b4 - b3 * a3 * a4 * b7
            - 2.0 * b5 * a2 * a4 * b7 - b6 * a1 * a4 * b7 - b6 * a3 * a4 * b4
            + 2.0 * a4 * a4 * b2 * b7 + 2.0 * b7 * b5 * a1 * a5;
    let p6 = -2.0 * a4 * a4 * b4 * b7 + b6 * a3 * a4 * b7 + b3 * a5 * a4 * b7 + b6 * a5 * a4 * b4
            - 2.0 * b7 * b5 * a3 * a5 - b4 * b5 * a5 * a5;
    let p7 = b7 * (b5 * a5 * a5 + a4 * a4 * b7 - b6 * a5 * a4);
    WolfPolynomial { coeffs: [p0, p1, p2, p3, p4, p5, p6, p7] }
}

/// Elk coordinate of the equilibrium with wolf coordinate `w`, or `None` if
/// the denominator vanishes (|den| < 1e-12).
pub fn elk_from_wolf(p: &ParamSet, w: f64) -> Option<f64> {
    let num = -p.a4 * w * w * (p.b7 * w - p.b4) + w * (p.b5 * p.a2 - p.a4 * p.b2) - p.b5 * p.a0
        + p.a4 * p.b0;
    let den = w * w * (-p.b5 * p.a5 + p.a4 * p.b6) + w * (p.b5 * p.a3 - p.a4 * p.b3) - p.b5 * p.a1
        + p.a4 * p.b1;
    if den.abs() < 1e-12 {
        None
    } else {
        Some(num / den)
    }
}

/// Independent elimination: both equations as quadratics in e, the Sylvester
/// resultant in w, divided by its trivial factor w.
pub fn elimination_oracle(p: &ParamSet, w: f64) -> f64 {
    let a = -p.a4 * w;
    let b = -p.a1 + p.a3 * w - p.a5 * w * w;
    let c = p.a0 - p.a2 * w;
    let d = -p.b5 * w;
    let e = -p.b1 + p.b3 * w - p.b6 * w * w;
    let f = p.b0 - p.b2 * w + p.b4 * w * w - p.b7 * w * w * w;
    let r = (a * f - c * d).powi(2) - (a * e - b * d) * (b * f - c * e);
    r / w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    StableNode,
    StableFocus,
    Saddle,
    UnstableNode,
    UnstableFocus,
    NonHyperbolic,
}

impl Kind {
    pub fn is_stable(self) -> bool {
        matches!(self, Kind::StableNode | Kind::StableFocus)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::StableNode => "stable_node",
            Kind::StableFocus => "stable_focus",
            Kind::Saddle => "saddle",
            Kind::UnstableNode => "unstable_node",
            Kind::UnstableFocus => "unstable_focus",
            Kind::NonHyperbolic => "non_hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub e: f64,
    pub w: f64,
    /// Ordered with the smaller real part (or negative imaginary part) first.
    pub eigenvalues: [Complex<f64>; 2],
    pub kind: Kind,
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.e, self.w)
    }
}

/// Eigenvalues of a 2×2 matrix from its trace and determinant.
pub fn eigenvalues2(j: &Mat2) -> [Complex<f64>; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation in the smaller-magnitude root
        let big = 0.5 * tr + if tr >= 0.0 { s } else { -s };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (l1, l2) = if big < small { (big, small) } else { (small, big) };
        [Complex::new(l1, 0.0), Complex::new(l2, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex::new(0.5 * tr, -s), Complex::new(0.5 * tr, s)]
    }
}

pub fn kind_of(eig: &[Complex<f64>; 2]) -> Kind {
    let min_re = eig[0].re.abs().min(eig[1].re.abs());
    if min_re < 1e-8 {
        return Kind::NonHyperbolic;
    }
    let complex = eig[0].im != 0.0;
    if !complex && eig[0].re * eig[1].re < 0.0 {
        return Kind::Saddle;
    }
    match (eig[0].re < 0.0, complex) {
        (true, false) => Kind::StableNode,
        (true, true) => Kind::StableFocus,
        (false, false) => Kind::UnstableNode,
        (false, true) => Kind::UnstableFocus,
    }
}

/// Linear stability of a point assumed to be an equilibrium (residual < 1e-6).
pub fn classify_field<F: PlanarField + ?Sized>(f: &F, point: [f64; 2]) -> Result<Equilibrium> {
    let r = f.eval(point);
    let res = r[0].hypot(r[1]);
    if !(res < 1e-6) {
        return Err(Error::NotAnEquilibrium { residual: res });
    }
    let eig = eigenvalues2(&f.jac(point));
    Ok(Equilibrium {
        e: point[0],
        w: point[1],
        eigenvalues: eig,
        kind: kind_of(&eig),
    })
}

pub fn classify(p: &ParamSet, point: State) -> Result<Equilibrium> {
    classify_field(p, point.as_array())
}

/// Damped Newton on f(x) = 0; returns the root if it converges to a residual below `tol`.
pub fn newton<F: PlanarField + ?Sized>(f: &F, x0: [f64; 2], tol: f64, max_iter: usize) -> Option<[f64; 2]> {
    let mut x = x0;
    let mut r = f.eval(x);
    let mut nr = r[0].hypot(r[1]);
    for _ in 0..max_iter {
        if nr < tol {
            return Some(x);
        }
        let j = f.jac(x);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = [
            (j[1][1] * r[0] - j[0][1] * r[1]) / det,
            (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
        ];
        let mut lam = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let xn = [x[0] - lam * dx[0], x[1] - lam * dx[1]];
            let rn = f.eval(xn);
            let nn = rn[0].hypot(rn[1]);
            if nn.is_finite() && nn < nr {
                x = xn;
                r = rn;
                nr = nn;
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if nr < tol {
        Some(x)
    } else {
        None
    }
}

/// Squeeze the residual as far as floating point allows (stops when steps stop helping).
fn polish<F: PlanarField + ?Sized>(f: &F, x0: [f64; 2]) -> Option<[f64; 2]> {
    let x = newton(f, x0, 1e-9, 60)?;
    Some(newton(f, x, 1e-13, 6).unwrap_or(x))
}

const POS_EPS: f64 = 1e-10;
const DEDUPE: f64 = 1e-8;

fn push_unique(out: &mut Vec<[f64; 2]>, x: [f64; 2]) {
    if x[0] > POS_EPS
        && x[1] > POS_EPS
        && !out.iter().any(|y| (y[0] - x[0]).abs() < DEDUPE && (y[1] - x[1]).abs() < DEDUPE)
    {
        out.push(x);
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Resultant when neither equation has an e² term (a4 = b5 = 0): both are
/// linear in e, so B F − C E in w, with e = −C/B.
fn linear_in_e_resultant(p: &ParamSet) -> Vec<f64> {
    let b = [-p.a1, p.a3, -p.a5];
    let c = [p.a0, -p.a2];
    let e = [-p.b1, p.b3, -p.b6];
    let f = [p.b0, -p.b2, p.b4, -p.b7];
    let bf = poly_mul(&b, &f);
    let ce = poly_mul(&c, &e);
    bf.iter()
        .enumerate()
        .map(|(i, v)| v - ce.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn elk_linear(p: &ParamSet, w: f64) -> Option<f64> {
    let b = -p.a1 + p.a3 * w - p.a5 * w * w;
    let c = p.a0 - p.a2 * w;
    let e = -p.b1 + p.b3 * w - p.b6 * w * w;
    let f = p.b0 - p.b2 * w + p.b4 * w * w - p.b7 * w * w * w;
    if b.abs() >= e.abs() && b.abs() > 1e-12 {
        Some(-c / b)
    } else if e.abs() > 1e-12 {
        Some(-f / e)
    } else {
        None
    }
}

/// All strictly positive interior equilibria, ascending in w.
pub fn find_equilibria(p: &ParamSet) -> Vec<Equilibrium> {
    let wp = wolf_polynomial(p);
    let degenerate = wp.coeffs.iter().all(|c| c.abs() < 1e-14);
    let coeffs = if degenerate { linear_in_e_resultant(p) } else { wp.coeffs.to_vec() };
    let back: fn(&ParamSet, f64) -> Option<f64> = if degenerate { elk_linear } else { elk_from_wolf };
    let roots = poly::roots(&coeffs);
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for z in roots {
        let w = z.re;
        if w <= POS_EPS {
            continue;
        }
        let near_real = z.im.abs() < 1e-8;
        // near-double roots split into a complex pair under rounding
        let borderline = !near_real && z.im.abs() < 1e-4 * w.abs().max(1.0);
        if !near_real && !borderline {
            continue;
        }
        match back(p, w) {
            Some(e) => {
                if let Some(x) = polish(p, [e, w]) {
                    push_unique(&mut pts, x);
                } else if near_real && e > POS_EPS {
                    // polynomial root is real but the 2D polish stalls (almost singular Jacobian)
                    let r = p.eval([e, w]);
                    if r[0].hypot(r[1]) < 1e-8 {
                        push_unique(&mut pts, [e, w]);
                    }
                }
            }
            None => {
                for k in 1..=40 {
                    let e0 = 0.25 * k as f64;
                    if let Some(x) = polish(p, [e0, w]) {
                        if (x[1] - w).abs() < 1e-6 * w.max(1.0) {
                            push_unique(&mut pts, x);
                        }
                    }
                }
            }
        }
    }
    pts.sort_by(|a, b| a[1].partial_cmp(&b[1]).unwrap().then(a[0].partial_cmp(&b[0]).unwrap()));
    pts.into_iter()
        .filter_map(|x| classify_field(p, x).ok())
        .collect()
}

/// Brute-force equilibria of any planar field: Newton from an n×n seed grid over a box.
pub fn grid_equilibria<F: PlanarField + ?Sized>(
    f: &F,
    e_range: (f64, f64),
    w_range: (f64, f64),
    n: usize,
) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let e = e_range.0 + (e_range.1 - e_range.0) * (i as f64 + 0.5) / n as f64;
            let w = w_range.0 + (w_range.1 - w_range.0) * (j as f64 + 0.5) / n as f64;
            if let Some(x) = newton(f, [e, w], 1e-11, 40) {
                let seen = |x: [f64; 2]| out.iter().any(|y| (y[0] - x[0]).abs() < 1e-6 && (y[1] - x[1]).abs() < 1e-6);
                if seen(x) {
                    continue;
                }
                let x = polish(f, x).unwrap_or(x);
                if !seen(x) {
                    out.push(x);
                }
            }
        }
    }
    out.sort_by(|a, b| a[1].partial_cmp(&b[1]).unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::ParamId;

    #[test]
    fn default_parameters_give_three_equilibria() {
        let eq = find_equilibria(&ParamSet::default());
        assert_eq!(eq.len(), 3);
        let want = [
            (4.359587, 1.184805, Kind::Saddle),
            (1.206091, 1.605300, Kind::Saddle),
            (2.107854, 3.243900, Kind::StableFocus),
        ];
        for (q, (e, w, k)) in eq.iter().zip(want) {
            assert!((q.e - e).abs() < 1e-4 && (q.w - w).abs() < 1e-4, "{q:?}");
            assert_eq!(q.kind, k);
            let r = ParamSet::default().eval([q.e, q.w]);
            assert!(r[0].hypot(r[1]) < 1e-8);
        }
    }

    #[test]
    fn high_order_coefficients_vanish_without_cubic_terms() {
        let mut p = ParamSet::default();
        for id in [ParamId::A4, ParamId::A5, ParamId::B5, ParamId::B6, ParamId::B7] {
            p.set(id, 0.0);
        }
        let c = wolf_polynomial(&p).coeffs;
        assert_eq!(&c[4..], &[0.0; 4]);
    }

    #[test]
    fn linear_system_single_crossing() {
        // de = 3 - e - w, dw = 1 - e + w  -> (2, 1)
        let p = ParamSet { a0: 3.0, a1: 1.0, a2: 1.0, b0: 1.0, b1: 1.0, b2: -1.0, ..ParamSet::zero() };
        let eq = find_equilibria(&p);
        assert_eq!(eq.len(), 1);
        assert!((eq[0].e - 2.0).abs() < 1e-12 && (eq[0].w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minus_identity_is_stable_node() {
        // de = 1 - e, dw = 1 - w
        let p = ParamSet { a0: 1.0, a1: 1.0, b0: 1.0, b2: 1.0, ..ParamSet::zero() };
        let q = classify(&p, State::new(1.0, 1.0)).unwrap();
        assert_eq!(q.kind, Kind::StableNode);
        assert_eq!(q.eigenvalues, [Complex::new(-1.0, 0.0); 2]);
    }

    #[test]
    fn classify_rejects_non_equilibria() {
        assert!(matches!(
            classify(&ParamSet::default(), State::new(1.0, 1.0)),
            Err(Error::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn eigenvalues_of_rotation_are_imaginary() {
        let e = eigenvalues2(&[[0.0, -2.0], [2.0, 0.0]]);
        assert_eq!(e[0], Complex::new(0.0, -2.0));
        assert_eq!(kind_of(&e), Kind::NonHyperbolic);
    }
}

//! First Lyapunov coefficient at a planar Hopf point.
//!
//! Primary route: move the equilibrium to the origin, change to the real
//! Jordan basis P = √2·[Re q, −Im q] (J q = iωq, ⟨q,q⟩ = 1) so that the
//! linear part is [[0, −ω], [ω, 0]], and apply the cubic normal-form
//! coefficient formula to the transformed derivatives. We report l1 = a/ω,
//! which is −1 for ṙ = μr − r³ at ω = 1.
//!
//! Second route (cross-check): the complex projection formula for c1,
//! reported as Re c1 with ⟨q,q⟩ = 1. The two are tied by l1 = Re c1 / (2ω).

use nalgebra::Complex;

use super::BifPoint;
use crate::dynsys::{CubicField, ParamId, ParamSet, PlanarField};
use crate::error::{Error, Result};

type C = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lyapunov {
    /// Adopted first Lyapunov coefficient (negative: supercritical).
    pub l1: f64,
    /// Real part of the cubic coefficient c1 of the complex normal form with ⟨q,q⟩ = 1.
    pub c1_re: f64,
    pub omega: f64,
}

/// Unit eigenvector of J for eigenvalue iω.
fn eigvec(j: &[[f64; 2]; 2], omega: f64) -> [C; 2] {
    let iw = C::new(0.0, omega);
    let q = if j[0][1].abs() >= j[1][0].abs() {
        [C::new(j[0][1], 0.0), iw - j[0][0]]
    } else {
        [iw - j[1][1], C::new(j[1][0], 0.0)]
    };
    let n = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
    [q[0] / n, q[1] / n]
}

fn check(f: &CubicField, x: [f64; 2]) -> Result<([[f64; 2]; 2], f64)> {
    let j = f.jac(x);
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det <= 0.0 {
        return Err(Error::Precondition(format!("det J = {det:e} is not positive")));
    }
    let omega = det.sqrt();
    if omega < 1e-8 {
        return Err(Error::Precondition("Hopf frequency below 1e-8".into()));
    }
    if tr.abs() > 1e-6 * omega.max(1.0) {
        return Err(Error::Precondition(format!("tr J = {tr:e} is not zero")));
    }
    Ok((j, omega))
}

/// Both Lyapunov quantities at an equilibrium `x` of `f` with tr J = 0, det J > 0.
pub fn first_lyapunov_at(f: &CubicField, x: [f64; 2]) -> Result<Lyapunov> {
    let (j, omega) = check(f, x)?;
    let l1 = real_route(f, x, &j, omega);
    let c1_re = complex_route(f, x, &j, omega);
    Ok(Lyapunov { l1, c1_re, omega })
}

/// l1 at a Hopf point found on a branch of the 14-parameter model.
pub fn first_lyapunov(p: &ParamSet, hopf: &BifPoint) -> Result<f64> {
    if hopf.kind != super::BifKind::Hopf {
        return Err(Error::Precondition("not a Hopf point".into()));
    }
    let mut q = *p;
    for (n, v) in hopf.param_names.iter().zip(&hopf.param_values) {
        let id: ParamId = n.parse()?;
        q.set(id, *v);
    }
    Ok(first_lyapunov_at(&q.to_field(), hopf.state)?.l1)
}

fn real_route(f: &CubicField, x: [f64; 2], j: &[[f64; 2]; 2], omega: f64) -> f64 {
    let q = eigvec(j, omega);
    let s = std::f64::consts::SQRT_2;
    // columns: √2 Re q, −√2 Im q
    let p = [[s * q[0].re, -s * q[0].im], [s * q[1].re, -s * q[1].im]];
    let dp = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let pinv = [[p[1][1] / dp, -p[0][1] / dp], [-p[1][0] / dp, p[0][0] / dp]];
    let h = f.hessian(x);
    let t = f.third(x);
    let d2 = |c: usize, i: usize, k: usize| -> f64 {
        let mut acc = 0.0;
        for r in 0..2 {
            let mut inner = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    inner += h[r][a][b] * p[a][i] * p[b][k];
                }
            }
            acc += pinv[c][r] * inner;
        }
        acc
    };
    let d3 = |c: usize, i: usize, k: usize, l: usize| -> f64 {
        let mut acc = 0.0;
        for r in 0..2 {
            let mut inner = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    for d in 0..2 {
                        inner += t[r][a][b][d] * p[a][i] * p[b][k] * p[d][l];
                    }
                }
            }
            acc += pinv[c][r] * inner;
        }
        acc
    };
    let (fxx, fxy, fyy) = (d2(0, 0, 0), d2(0, 0, 1), d2(0, 1, 1));
    let (gxx, gxy, gyy) = (d2(1, 0, 0), d2(1, 0, 1), d2(1, 1, 1));
    let cubic = d3(0, 0, 0, 0) + d3(0, 0, 1, 1) + d3(1, 0, 0, 1) + d3(1, 1, 1, 1);
    let quad = fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy;
    let a = cubic / 16.0 + quad / (16.0 * omega);
    a / omega
}

fn solve2(m: [[C; 2]; 2], b: [C; 2]) -> [C; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        (m[1][1] * b[0] - m[0][1] * b[1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ]
}

fn complex_route(f: &CubicField, x: [f64; 2], j: &[[f64; 2]; 2], omega: f64) -> f64 {
    let q = eigvec(j, omega);
    // adjoint: Jᵀ p = −iω p, then scale so that ⟨p, q⟩ = conj(p)·q = 1
    let jt = [[j[0][0], j[1][0]], [j[0][1], j[1][1]]];
    let pv = eigvec(&jt, -omega);
    let pq = pv[0].conj() * q[0] + pv[1].conj() * q[1];
    let p = [pv[0] / pq.conj(), pv[1] / pq.conj()];
    let h = f.hessian(x);
    let t = f.third(x);
    let bl = |u: [C; 2], v: [C; 2]| -> [C; 2] {
        let mut out = [C::new(0.0, 0.0); 2];
        for (c, o) in out.iter_mut().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    *o += u[a] * v[b] * h[c][a][b];
                }
            }
        }
        out
    };
    let tl = |u: [C; 2], v: [C; 2], w: [C; 2]| -> [C; 2] {
        let mut out = [C::new(0.0, 0.0); 2];
        for (c, o) in out.iter_mut().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    for d in 0..2 {
                        *o += u[a] * v[b] * w[d] * t[c][a][b][d];
                    }
                }
            }
        }
        out
    };
    let ip = |u: [C; 2]| p[0].conj() * u[0] + p[1].conj() * u[1];
    let qb = [q[0].conj(), q[1].conj()];
    let a = [[C::new(j[0][0], 0.0), C::new(j[0][1], 0.0)], [C::new(j[1][0], 0.0), C::new(j[1][1], 0.0)]];
    let h11 = solve2(a, bl(q, qb));
    let two_iw = C::new(0.0, 2.0 * omega);
    let m = [[two_iw - a[0][0], -a[0][1]], [-a[1][0], two_iw - a[1][1]]];
    let h20 = solve2(m, bl(q, q));
    let g21 = ip(tl(q, q, qb)) - 2.0 * ip(bl(q, h11)) + ip(bl(qb, h20));
    0.5 * g21.re
}

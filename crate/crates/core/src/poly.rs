//! Real-coefficient polynomial roots via eigenvalues of a balanced companion matrix.

use nalgebra::{Complex, DMatrix};

/// Horner evaluation; `c` is in ascending powers.
pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn eval_complex(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

/// Parlett–Reinsch balancing by powers of two (in place).
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0_f64;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / radix;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let gi = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= gi;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// All complex roots of the polynomial with ascending coefficients `c`.
///
/// Leading coefficients negligible relative to the largest one are dropped
/// (lower-degree solve); exact zero roots are factored out first.
pub fn roots(c: &[f64]) -> Vec<Complex<f64>> {
    let scale = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return vec![];
    }
    let mut hi = c.len();
    while hi > 0 && c[hi - 1].abs() <= 1e-14 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && c[lo] == 0.0 {
        lo += 1;
    }
    let mut out: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); lo];
    let tc = &c[lo..hi];
    let n = tc.len().saturating_sub(1);
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(Complex::new(-tc[0] / tc[1], 0.0));
        return out;
    }
    let lead = tc[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -tc[i] / lead;
    }
    balance(&mut m);
    let eig = m.complex_eigenvalues();
    for z0 in eig.iter() {
        out.push(polish(tc, *z0));
    }
    out
}

/// A few Newton steps on the polynomial, kept only while they reduce |p|.
fn polish(c: &[f64], z0: Complex<f64>) -> Complex<f64> {
    let mut z = z0;
    let (mut pz, _) = eval_complex(c, z);
    for _ in 0..8 {
        let (p, dp) = eval_complex(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let zn = z - p / dp;
        let (pn, _) = eval_complex(c, zn);
        if pn.norm() < pz.norm() {
            z = zn;
            pz = pn;
        } else {
            break;
        }
    }
    z
}

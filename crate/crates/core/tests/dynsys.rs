use elkwolf::dynsys::*;
use elkwolf::ode::OdeOptions;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const S0: (f64, f64) = (4.25493696, 1.17008188);
const STABLE: (f64, f64) = (2.107854, 3.243900);

fn random_params(rng: &mut impl Rng) -> ParamSet {
    let base = ParamSet::default().to_array();
    let mut v = [0.0; 14];
    for (x, b) in v.iter_mut().zip(base) {
        *x = b * rng.random_range(0.5..1.5);
    }
    ParamSet::from_array(v)
}

fn fd_jacobian(p: &ParamSet, s: State, h: f64) -> Mat2 {
    let mut j = [[0.0; 2]; 2];
    for c in 0..2 {
        let mut a = s;
        let mut b = s;
        if c == 0 {
            a.e += h;
            b.e -= h;
        } else {
            a.w += h;
            b.w -= h;
        }
        let (fa, ga) = rhs(p, a);
        let (fb, gb) = rhs(p, b);
        j[0][c] = (fa - fb) / (2.0 * h);
        j[1][c] = (ga - gb) / (2.0 * h);
    }
    j
}

#[test]
fn rhs_vanishes_at_published_equilibria() {
    let p = ParamSet::default();
    for (e, w) in [(1.206091, 1.605300), STABLE, (4.359587, 1.184805)] {
        let (f, g) = rhs(&p, State::new(e, w));
        assert!(f.hypot(g) < 5e-5, "({e}, {w}): {f:e} {g:e}");
    }
    let (f, g) = rhs(&p, State::new(0.0, 0.0));
    assert_eq!((f, g), (p.a0, p.b0));
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let s = State::new(rng.random_range(0.0..6.0), rng.random_range(0.0..6.0));
        let j = jacobian(&p, s);
        let n = fd_jacobian(&p, s, 1e-6);
        let scale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = (0..2).flat_map(|r| (0..2).map(move |c| (r, c))).map(|(r, c)| (j[r][c] - n[r][c]).abs()).fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn jacobian_at_origin_is_linear_part() {
    let p = ParamSet::default();
    let j = jacobian(&p, State::new(0.0, 0.0));
    assert_eq!(j, [[-p.a1, -p.a2], [-p.b1, -p.b2]]);
}

/// Quadratic form V(x) = xᵀPx with AᵀP + PA = −I for the linearization A at
/// `x0`; at a stable focus it decreases monotonically where Euclidean distance
/// oscillates.
fn lyapunov_distance(p: &ParamSet, x0: State) -> impl Fn(State) -> f64 {
    let a = jacobian(p, x0);
    // unknowns (p11, p12, p22)
    let m = nalgebra::Matrix3::new(
        2.0 * a[0][0], 2.0 * a[1][0], 0.0,
        a[0][1], a[0][0] + a[1][1], a[1][0],
        0.0, 2.0 * a[0][1], 2.0 * a[1][1],
    );
    let q = m.lu().solve(&nalgebra::Vector3::new(-1.0, 0.0, -1.0)).unwrap();
    move |s: State| {
        let (x, y) = (s.e - x0.e, s.w - x0.w);
        (q[0] * x * x + 2.0 * q[1] * x * y + q[2] * y * y).sqrt()
    }
}

#[test]
fn trajectory_settles_on_stable_equilibrium() {
    let p = ParamSet::default();
    let t = linspace(0.0, 28.0, 401);
    let tr = integrate(&p, State::new(S0.0, S0.1), (0.0, 28.0), &t).unwrap();
    let v = lyapunov_distance(&p, State::new(STABLE.0, STABLE.1));
    let dist: Vec<f64> = tr.states.iter().map(|s| v(*s)).collect();
    for w in dist[300..].windows(2) {
        assert!(w[1] < w[0], "distance grew late in the run");
    }
    assert!(dist[400] < dist[0]);
    let long = integrate(&p, State::new(S0.0, S0.1), (0.0, 400.0), &[400.0]).unwrap().last().unwrap();
    assert!((long.e - STABLE.0).abs() < 1e-3 && (long.w - STABLE.1).abs() < 1e-3, "{long:?}");
}

#[test]
fn tolerance_halving_changes_little() {
    let p = ParamSet::default();
    let run = |rtol: f64, atol: f64| {
        let o = OdeOptions { rtol, atol, ..OdeOptions::default() };
        integrate_with(&p, State::new(S0.0, S0.1), (0.0, 28.0), &[28.0], o).unwrap().last().unwrap()
    };
    let a = run(1e-9, 1e-11);
    let b = run(5e-10, 5e-12);
    assert!((a.e - b.e).abs() < 1e-6 && (a.w - b.w).abs() < 1e-6);
}

#[test]
fn forward_then_backward_returns() {
    let p = ParamSet::default();
    let s0 = State::new(S0.0, S0.1);
    let fwd = integrate(&p, s0, (0.0, 5.0), &[5.0]).unwrap().last().unwrap();
    let back = integrate(&p, fwd, (5.0, 0.0), &[0.0]).unwrap().last().unwrap();
    assert!((back.e - s0.e).abs() < 1e-6 && (back.w - s0.w).abs() < 1e-6, "{back:?}");
}

#[test]
fn herd_threshold_examples() {
    let p = ParamSet::default();
    assert!((herd_threshold(&p).unwrap() - 1.5018).abs() < 1e-4);
    let phys = herd_threshold_physical(&p, 3141.41).unwrap();
    assert!((phys - 4712.0).abs() / 4712.0 < 0.01, "{phys}");
    let eq = ParamSet { a3: p.a2, ..p };
    assert_eq!(herd_threshold(&eq).unwrap(), 1.0);
    assert!(herd_threshold(&ParamSet { a3: 0.0, ..p }).is_err());
}

#[test]
fn blow_up_is_reported_not_panicked() {
    let p = ParamSet::zero().with(ParamId::B4, 1.0);
    let t = linspace(0.0, 10.0, 11);
    let tr = integrate(&p, State::new(1.0, 1.0), (0.0, 10.0), &t).unwrap();
    assert!(tr.blow_up_at.is_some());
    assert!(tr.times.len() < t.len());
}

proptest! {
    #[test]
    fn two_codings_agree(seed in any::<u64>(), e in -1.0f64..7.0, w in -1.0f64..7.0) {
        let p = random_params(&mut ChaCha8Rng::seed_from_u64(seed));
        let (f, g) = rhs(&p, State::new(e, w));
        let v = p.to_field().eval([e, w]);
        prop_assert!((f - v[0]).abs() <= 1e-12 * f.abs().max(1.0));
        prop_assert!((g - v[1]).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn param_text_round_trips(seed in any::<u64>()) {
        let p = random_params(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(ParamSet::parse(&p.to_text()).unwrap(), p);
    }
}

use elkwolf::dynsys::*;
use elkwolf::equilibria::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn residual(p: &ParamSet, e: f64, w: f64) -> f64 {
    let (f, g) = rhs(p, State::new(e, w));
    f.hypot(g)
}

fn draw_in_ranges(rng: &mut impl Rng) -> ParamSet {
    let mut v = [0.0; 14];
    for (x, (a, b)) in v.iter_mut().zip(PUBLISHED_RANGES) {
        *x = rng.random_range(a.min(b)..=a.max(b));
    }
    ParamSet::from_array(v)
}

#[test]
fn published_equilibria() {
    let p = ParamSet::default();
    let eq = find_equilibria(&p);
    assert_eq!(eq.len(), 3);
    let expect = [
        ((1.206091, 1.605300), false),
        ((2.107854, 3.243900), true),
        ((4.359587, 1.184805), false),
    ];
    for ((e, w), stable) in expect {
        let q = eq.iter().find(|q| (q.e - e).abs() < 1e-4 && (q.w - w).abs() < 1e-4).expect("missing equilibrium");
        assert_eq!(q.kind.is_stable(), stable);
        let j = jacobian(&p, q.state());
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if stable {
            assert!(q.eigenvalues.iter().all(|l| l.re < 0.0));
        } else {
            assert_eq!(q.kind, Kind::Saddle);
            assert!(det < 0.0);
        }
    }
}

#[test]
fn polynomial_matches_elimination_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let base = ParamSet::default().to_array();
        let mut v = [0.0; 14];
        for (x, b) in v.iter_mut().zip(base) {
            *x = b * rng.random_range(0.5..1.5);
        }
        let p = ParamSet::from_array(v);
        let w = rng.random_range(0.05..6.0);
        let a = wolf_polynomial(&p).eval(w);
        let b = elimination_oracle(&p, w);
        worst = worst.max((a - b).abs() / b.abs());
    }
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn every_real_root_polishes_to_an_equilibrium() {
    let p = ParamSet::default();
    for q in find_equilibria(&p) {
        assert!(residual(&p, q.e, q.w) < 1e-8);
        assert!(q.e > 0.0 && q.w > 0.0);
    }
    assert_eq!(find_equilibria(&p), find_equilibria(&p));
}

#[test]
fn counts_match_brute_force_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 500;
    let (e_box, w_box) = ((0.0, 10.0), (0.0, 10.0));
    let inside = |e: f64, w: f64| e > 1e-10 && w > 1e-10 && e < e_box.1 && w < w_box.1;
    let params: Vec<ParamSet> = (0..draws).map(|_| draw_in_ranges(&mut rng)).collect();
    let counts: Vec<(usize, usize)> = params
        .par_iter()
        .map(|p| {
            let ours = find_equilibria(p).iter().filter(|q| inside(q.e, q.w)).count();
            let brute = grid_equilibria(p, e_box, w_box, 400).iter().filter(|x| inside(x[0], x[1])).count();
            (ours, brute)
        })
        .collect();
    let agree = counts.iter().filter(|(a, b)| a == b).count();
    let max_count = counts.iter().map(|c| c.0).max().unwrap();
    assert!(agree as f64 >= 0.99 * draws as f64, "{agree}/{draws}");
    assert!(max_count <= 3, "{max_count} equilibria in a range box");
}

#[test]
fn results_are_positive_and_bounded_in_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let p = draw_in_ranges(&mut rng);
        let eq = find_equilibria(&p);
        assert!(eq.len() <= 7);
        for q in &eq {
            assert!(q.e > 0.0 && q.w > 0.0);
            assert!(residual(&p, q.e, q.w) < 1e-8);
        }
        for w in eq.windows(2) {
            assert!(w[0].w <= w[1].w);
        }
    }
}

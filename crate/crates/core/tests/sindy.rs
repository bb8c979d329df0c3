use elkwolf::dynsys::{integrate, linspace, CubicField, ParamSet, PlanarField, State};
use elkwolf::sindy::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn discovered_trajectory() -> (Vec<f64>, Vec<State>, CubicField) {
    let p = ParamSet::default();
    let t = linspace(0.0, 28.0, 200);
    let s = integrate(&p, State::new(4.25493696, 1.17008188), (0.0, 28.0), &t).unwrap().states;
    (t, s, p.to_field())
}

fn exact_derivatives(f: &CubicField, s: &[State]) -> Vec<[f64; 2]> {
    s.iter().map(|x| f.eval(x.as_array())).collect()
}

fn target(d: &[[f64; 2]], r: usize) -> DVector<f64> {
    DVector::from_iterator(d.len(), d.iter().map(|v| v[r]))
}

fn max_error(coeffs: &[Vec<f64>; 2], f: &CubicField) -> f64 {
    (0..2)
        .flat_map(|r| (0..10).map(move |j| (r, j)))
        .map(|(r, j)| (coeffs[r][j] - f.coeffs[r][j]).abs())
        .fold(0.0, f64::max)
}

fn fit_rows(theta: &nalgebra::DMatrix<f64>, d: &[[f64; 2]], lambda: f64, alpha: f64) -> [Vec<f64>; 2] {
    let o = StlsqOptions::default();
    [
        stlsq(theta, &target(d, 0), lambda, alpha, &o).unwrap().coeffs,
        stlsq(theta, &target(d, 1), lambda, alpha, &o).unwrap().coeffs,
    ]
}

#[test]
fn stlsq_recovers_discovered_model_without_ridge() {
    let (_, s, f) = discovered_trajectory();
    let theta = CandidateLibrary::cubic().matrix(&s);
    let c = fit_rows(&theta, &exact_derivatives(&f, &s), 0.01, 0.0);
    let err = max_error(&c, &f);
    assert!(err < 1e-6, "max coefficient error {err:e}");
}

#[test]
fn thresholding_and_support_agree() {
    let (_, s, f) = discovered_trajectory();
    let theta = CandidateLibrary::cubic().matrix(&s);
    for alpha in [0.0, 0.01, 0.1] {
        for c in fit_rows(&theta, &exact_derivatives(&f, &s), 0.03, alpha) {
            assert!(c.iter().all(|v| *v == 0.0 || v.abs() >= 0.03));
        }
    }
}

#[test]
fn degenerate_ensemble_equals_plain_stlsq() {
    let (_, s, f) = discovered_trajectory();
    let lib = CandidateLibrary::cubic();
    let d = exact_derivatives(&f, &s);
    let mut cfg = EnsembleConfig::new(0.01, 0.01, 1, 1.0, 5);
    cfg.n_library_drops = 0;
    let m = ensemble_fit(&lib, &s, &d, &cfg).unwrap();
    let plain = fit_rows(&lib.matrix(&s), &d, 0.01, 0.01);
    for r in 0..2 {
        for j in 0..10 {
            assert!((m.coeffs[r][j] - plain[r][j]).abs() < 1e-12);
            assert_eq!(m.coeffs[r][j] == 0.0, plain[r][j] == 0.0);
        }
    }
}

#[test]
fn ensemble_is_deterministic() {
    let (_, s, f) = discovered_trajectory();
    let lib = CandidateLibrary::cubic();
    let d = exact_derivatives(&f, &s);
    let cfg = EnsembleConfig::new(0.01, 0.02, 20, 0.8, 99);
    assert_eq!(ensemble_fit(&lib, &s, &d, &cfg).unwrap(), ensemble_fit(&lib, &s, &d, &cfg).unwrap());
}

#[test]
fn grid_sizes_and_dedup() {
    let (_, s, f) = discovered_trajectory();
    let lib = CandidateLibrary::cubic();
    let d = exact_derivatives(&f, &s);
    let base = EnsembleConfig::new(0.0, 0.01, 1, 1.0, 1);
    let single = HyperGrid { alphas: vec![0.01], lambdas: vec![0.01], n_models: vec![20], fractions: vec![0.8] };
    let one = run_grid(&lib, &s, &d, &single, &base).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].runs.len(), 1);
    let doubled = HyperGrid { alphas: vec![0.01, 0.01], ..single };
    let dd = run_grid(&lib, &s, &d, &doubled, &base).unwrap();
    assert_eq!(dd.len(), 1);
    assert_eq!(dd[0].runs.len(), 2);
    let empty = HyperGrid { alphas: vec![], ..HyperGrid::published() };
    assert!(run_grid(&lib, &s, &d, &empty, &base).is_err());
}

#[test]
fn fd_derivatives_recover_to_one_percent() {
    let (t, s, f) = discovered_trajectory();
    let theta = CandidateLibrary::cubic().matrix(&s);
    let d = differentiate_states(&t, &s).unwrap();
    let err = max_error(&fit_rows(&theta, &d, 0.01, 0.0), &f);
    assert!(err < 1e-2, "{err:e}");
}

/// Random planar cubic field whose nonzero coefficients all exceed `floor`
/// in magnitude, and well-spread sample states.
fn random_system(seed: u64, floor: f64) -> (CubicField, Vec<State>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = [[0.0; 10]; 2];
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            if rng.random_bool(0.5) {
                let mag = rng.random_range(floor..2.0);
                *v = if rng.random_bool(0.5) { mag } else { -mag };
            }
        }
    }
    let s = (0..200)
        .map(|_| State::new(rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)))
        .collect();
    (CubicField::new(c), s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovers_any_cubic_above_twice_threshold(seed in any::<u64>()) {
        let lambda = 0.01;
        let (f, s) = random_system(seed, 2.0 * lambda + 1e-9);
        let theta = CandidateLibrary::cubic().matrix(&s);
        let c = fit_rows(&theta, &exact_derivatives(&f, &s), lambda, 0.0);
        prop_assert!(max_error(&c, &f) < 1e-6);
    }

    #[test]
    fn support_is_a_fixed_point(seed in any::<u64>(), lambda in 0.01f64..0.5) {
        let (f, s) = random_system(seed, 0.0);
        let theta = CandidateLibrary::cubic().matrix(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let y = DVector::from_iterator(s.len(), s.iter().map(|x| f.eval(x.as_array())[0] + 0.05 * rng.random_range(-1.0..1.0)));
        let o = StlsqOptions::default();
        let first = stlsq(&theta, &y, lambda, 0.0, &o).unwrap();
        let again = stlsq_masked(&theta, &y, lambda, 0.0, &first.support(), &o).unwrap();
        for (a, b) in first.coeffs.iter().zip(&again.coeffs) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn aggregation_ignores_member_order(rows in prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], 6), 1..30),
                                        perm_seed in any::<u64>()) {
        let (m1, i1) = aggregate(&rows);
        let mut shuffled = rows.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let (m2, i2) = aggregate(&shuffled);
        prop_assert_eq!(m1, m2);
        prop_assert_eq!(i1, i2);
    }
}

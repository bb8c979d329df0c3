use elkwolf::dynsys::{integrate, linspace, ParamSet, State};
use elkwolf::gpr::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn spec(kind: KernelKind, l: f64, sv: f64, nv: f64) -> KernelSpec {
    let mut s = KernelSpec::new(kind);
    s.length_scale = l;
    s.signal_variance = sv;
    s.noise_variance = nv;
    s.length_scale_bounds = (1e-3, 1e3);
    s
}

fn kind_strategy() -> impl Strategy<Value = KernelKind> {
    prop_oneof![
        Just(KernelKind::Rbf),
        Just(KernelKind::Matern(MaternNu::Half)),
        Just(KernelKind::Matern(MaternNu::ThreeHalves)),
        Just(KernelKind::Matern(MaternNu::FiveHalves)),
    ]
}

#[test]
fn matern_value_at_one_length_scale() {
    let s = spec(KernelKind::Matern(MaternNu::FiveHalves), 3.0, 1.0, 0.0);
    assert!((kernel_eval(&s, 1.0, 4.0) - 0.52400).abs() < 1e-4);
}

#[test]
fn recovers_length_scale_of_generating_process() {
    let truth = spec(KernelKind::Rbf, 10.0, 1.0, 0.01);
    let t = linspace(0.0, 199.0, 200);
    let y = draw_prior(&truth, &t, 5).unwrap();
    let mut start = KernelSpec::rbf();
    start.length_scale = 30.0;
    let gp = fit(&start, &t, &y, &FitOptions { n_restarts: 3, seed: 1, max_iters: 300 }).unwrap();
    let l = gp.kernel.length_scale;
    assert!((5.0..=20.0).contains(&l), "{l}");
}

#[test]
fn single_restart_is_deterministic() {
    let t = linspace(0.0, 28.0, 25);
    let y: Vec<f64> = t.iter().map(|x| (0.3 * x).sin() + 0.1 * (2.1 * x).cos()).collect();
    let o = FitOptions { n_restarts: 1, seed: 42, max_iters: 300 };
    let a = fit(&KernelSpec::matern52(), &t, &y, &o).unwrap();
    let b = fit(&KernelSpec::matern52(), &t, &y, &o).unwrap();
    assert_eq!(a.kernel, b.kernel);
    assert_eq!(a.log_marginal_likelihood.to_bits(), b.log_marginal_likelihood.to_bits());
}

#[test]
fn more_restarts_never_lower_the_likelihood() {
    let t = linspace(0.0, 28.0, 25);
    let y: Vec<f64> = t.iter().map(|x| (0.5 * x).sin() * (0.05 * x).exp()).collect();
    let mut last = f64::NEG_INFINITY;
    for n in [1, 2, 4, 8] {
        let gp = fit(&KernelSpec::rbf(), &t, &y, &FitOptions { n_restarts: n, seed: 3, max_iters: 300 }).unwrap();
        assert!(gp.log_marginal_likelihood >= last, "{n}: {} < {last}", gp.log_marginal_likelihood);
        last = gp.log_marginal_likelihood;
    }
}

#[test]
fn interpolates_training_values_without_noise() {
    let s = spec(KernelKind::Rbf, 2.0, 1.0, 1e-10);
    let t = linspace(0.0, 10.0, 11);
    let y: Vec<f64> = t.iter().map(|x| x.sin()).collect();
    let gp = condition(&s, &t, &y).unwrap();
    let (m, _) = gp.predict(&t);
    for (a, b) in m.iter().zip(&y) {
        assert!((a - b).abs() < 1e-4);
    }
}

#[test]
fn resample_spacing_and_purity() {
    let t = linspace(0.0, 28.0, 10);
    let y: Vec<f64> = t.iter().map(|x| 0.1 * x).collect();
    let gp = condition(&KernelSpec::rbf(), &t, &y).unwrap();
    let r = resample(&gp, 200, (0.0, 28.0)).unwrap();
    for w in r.times.windows(2) {
        assert!((w[1] - w[0] - 28.0 / 199.0).abs() < 1e-13);
    }
    assert_eq!(r, resample(&gp, 200, (0.0, 28.0)).unwrap());
    assert!(resample(&gp, 1, (0.0, 28.0)).is_err());
}

#[test]
fn band_covers_noiseless_truth() {
    let p = ParamSet::default();
    let t = linspace(0.0, 28.0, 60);
    let truth = integrate(&p, State::new(4.25493696, 1.17008188), (0.0, 28.0), &t).unwrap().states;
    let mut inside = 0;
    let mut total = 0;
    for rep in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(rep);
        let noise = Normal::new(0.0, 0.05).unwrap();
        for comp in 0..2 {
            let clean: Vec<f64> = truth.iter().map(|s| if comp == 0 { s.e } else { s.w }).collect();
            let y: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
            let mut k = if comp == 0 { KernelSpec::matern52() } else { KernelSpec::rbf() };
            k.length_scale_bounds = (0.5, 100.0);
            let gp = fit(&k, &t, &y, &FitOptions { n_restarts: 4, seed: rep, max_iters: 300 }).unwrap();
            let (m, v) = gp.predict(&t);
            for i in 0..t.len() {
                total += 1;
                if (clean[i] - m[i]).abs() <= 1.96 * v[i].sqrt() {
                    inside += 1;
                }
            }
        }
    }
    let frac = inside as f64 / total as f64;
    assert!(frac >= 0.9, "coverage {frac}");
}

#[test]
fn factorization_failure_is_reported() {
    let mut s = spec(KernelKind::Rbf, 1.0, 1.0, 0.0);
    s.signal_variance = -1.0;
    let err = condition(&s, &[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap_err();
    assert!(matches!(err, elkwolf::Error::NotPositiveDefinite { .. }));
}

proptest! {
    #[test]
    fn kernel_is_symmetric(kind in kind_strategy(), l in 0.1f64..50.0, sv in 0.0f64..5.0, a in -50.0f64..50.0, b in -50.0f64..50.0) {
        let s = spec(kind, l, sv, 0.0);
        prop_assert_eq!(kernel_eval(&s, a, b), kernel_eval(&s, b, a));
        prop_assert_eq!(kernel_eval(&s, a, a), sv);
    }

    #[test]
    fn gram_is_symmetric(kind in kind_strategy(), l in 0.5f64..20.0, ts in prop::collection::vec(0.0f64..30.0, 2..25)) {
        let s = spec(kind, l, 1.0, 0.0);
        let g = gram(&s, &ts, &ts);
        prop_assert!((&g - g.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn likelihood_two_ways(kind in kind_strategy(), l in 0.5f64..20.0, sv in 0.1f64..3.0, nv in 1e-3f64..0.5,
                          n in 2usize..=10, seed in 0u64..1000) {
        let s = spec(kind, l, sv, nv);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 1.7 + 0.3 * rand::Rng::random::<f64>(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -2.0..2.0)).collect();
        let a = condition(&s, &t, &y).unwrap().log_marginal_likelihood;
        let b = log_marginal_likelihood_direct(&s, &t, &y).unwrap();
        prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn training_variance_below_noise(kind in kind_strategy(), l in 0.5f64..20.0, nv in 1e-6f64..0.5,
                                    ts in prop::collection::btree_set(0u32..300, 2..30)) {
        let t: Vec<f64> = ts.into_iter().map(|x| x as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|x| x.cos()).collect();
        let s = spec(kind, l, 1.0, nv);
        let gp = condition(&s, &t, &y).unwrap();
        let (_, v) = gp.predict(&t);
        for vi in v {
            prop_assert!(vi >= 0.0);
            prop_assert!(vi <= nv + gp.jitter + 1e-8, "{} > {}", vi, nv);
        }
    }
}

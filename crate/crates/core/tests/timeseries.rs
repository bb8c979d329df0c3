use elkwolf::dynsys::{integrate, linspace, ParamSet, State};
use elkwolf::timeseries::*;
use proptest::prelude::*;

const E0: State = State { e: 4.25493696, w: 1.17008188 };

fn series(v: Vec<f64>) -> RawSeries {
    let t = (0..v.len()).map(|i| 1995.0 + i as f64).collect();
    RawSeries::complete("x", t, v).unwrap()
}

#[test]
fn noiseless_synthesis_matches_integration_exactly() {
    let p = ParamSet::default();
    let (e, w) = synthesize(&p, E0, (0.0, 28.0), 200, 0.0, 11).unwrap();
    let t = linspace(0.0, 28.0, 200);
    let tr = integrate(&p, E0, (0.0, 28.0), &t).unwrap();
    assert_eq!(e.times, t);
    for (i, s) in tr.states.iter().enumerate() {
        assert_eq!(e.values[i].unwrap().to_bits(), s.e.to_bits());
        assert_eq!(w.values[i].unwrap().to_bits(), s.w.to_bits());
    }
}

#[test]
fn synthesis_is_deterministic() {
    let p = ParamSet::default();
    let a = synthesize(&p, E0, (0.0, 28.0), 200, 0.05, 3).unwrap();
    let b = synthesize(&p, E0, (0.0, 28.0), 200, 0.05, 3).unwrap();
    assert_eq!(a, b);
    let c = synthesize(&p, E0, (0.0, 28.0), 200, 0.05, 4).unwrap();
    assert_ne!(a, c);
}

#[test]
fn synthetic_noise_level() {
    let p = ParamSet::default();
    let (ce, cw) = synthesize(&p, E0, (0.0, 28.0), 200, 0.0, 0).unwrap();
    let (ne, nw) = synthesize(&p, E0, (0.0, 28.0), 200, 0.05, 9).unwrap();
    for (clean, noisy) in [(ce, ne), (cw, nw)] {
        let d: Vec<f64> = clean.values.iter().zip(&noisy.values).map(|(a, b)| b.unwrap() - a.unwrap()).collect();
        let (_, sd) = mean_sd(&d, SdConvention::Population);
        assert!((sd - 0.05).abs() < 0.2 * 0.05, "{sd}");
    }
}

#[test]
fn published_zscore_example() {
    // elk mean and sd over the observation years
    let (mu, sigma) = (7926.71, 3141.41);
    assert!(((14539.0 - mu) / sigma - 2.1049f64).abs() < 1e-3);
}

#[test]
fn already_positive_series_is_only_divided() {
    let z = NormalizedSeries {
        label: "x".into(),
        times: vec![0.0, 1.0, 2.0],
        values: vec![1.0, 2.0, 4.0],
        mu: 0.0,
        sigma: 1.0,
        offset: 0.0,
        scale: 1.0,
        sd_convention: SdConvention::Population,
    };
    let r = positive_rescale(&z);
    assert_eq!(r.offset, 0.0);
    assert!((r.values[1] / r.values[0] - 2.0).abs() < 1e-15);
    assert!((r.values[2] / r.values[0] - 4.0).abs() < 1e-15);
}

#[test]
fn negative_minimum_is_lifted_to_floor() {
    let z = zscore(&series(vec![3.0, 1.0, 7.0, 2.0, 5.0])).unwrap();
    let shifted: Vec<f64> = z.values.iter().map(|v| v - 2.0).collect();
    let z2 = NormalizedSeries { values: shifted, ..z };
    let r = positive_rescale(&z2);
    assert!(r.values.iter().all(|v| *v > 0.0));
    let m = r.values.iter().copied().fold(f64::INFINITY, f64::min);
    let (_, sd) = mean_sd(&z2.values, SdConvention::Population);
    assert!((m * sd - POSITIVE_FLOOR).abs() < 1e-12);
}

proptest! {
    #[test]
    fn zscore_has_zero_mean_unit_sd(v in prop::collection::vec(0.0f64..1e5, 3..60)) {
        prop_assume!(mean_sd(&v, SdConvention::Population).1 > 1e-3);
        let z = zscore(&series(v)).unwrap();
        let (m, sd) = mean_sd(&z.values, SdConvention::Population);
        prop_assert!(m.abs() < 1e-12);
        prop_assert!((sd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zscore_is_idempotent(v in prop::collection::vec(0.0f64..1e4, 3..40)) {
        prop_assume!(mean_sd(&v, SdConvention::Population).1 > 1e-3);
        let z = zscore(&series(v)).unwrap();
        let zz = zscore(&z.as_raw()).unwrap();
        for (a, b) in z.values.iter().zip(&zz.values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_chain_inverts(v in prop::collection::vec(1.0f64..1e5, 3..40)) {
        prop_assume!(mean_sd(&v, SdConvention::Population).1 > 1e-3);
        let r = positive_rescale(&zscore(&series(v.clone())).unwrap());
        prop_assert!(r.values.iter().all(|x| *x > 0.0));
        for (b, o) in r.to_raw_scale(&r.values).iter().zip(&v) {
            prop_assert!((b - o).abs() <= 1e-9 * o.abs());
        }
    }

    #[test]
    fn rescale_inverts_to_normalized_values(v in prop::collection::vec(-3.0f64..3.0, 3..40)) {
        prop_assume!(mean_sd(&v, SdConvention::Population).1 > 1e-3);
        let z = NormalizedSeries {
            label: "x".into(),
            times: (0..v.len()).map(|i| i as f64).collect(),
            values: v.clone(),
            mu: 0.0,
            sigma: 1.0,
            offset: 0.0,
            scale: 1.0,
            sd_convention: SdConvention::Population,
        };
        let r = positive_rescale(&z);
        for (b, o) in r.to_zscores(&r.values).iter().zip(&v) {
            prop_assert!((b - o).abs() <= 1e-9 * o.abs().max(1.0));
        }
    }

    #[test]
    fn imputation_keeps_observed_values(
        v in prop::collection::vec(0.0f64..100.0, 4..30),
        gaps in prop::collection::vec(any::<bool>(), 4..30),
    ) {
        // isolated interior gaps only, plus optionally index 0
        let n = v.len().min(gaps.len());
        let mut vals: Vec<Option<f64>> = v[..n].iter().map(|x| Some(*x)).collect();
        let mut i = 0;
        while i + 1 < n {
            if gaps[i] && (i == 0 || vals[i - 1].is_some()) && i + 2 < n {
                vals[i] = None;
                // a leading gap needs the next two values present
                i += if i == 0 { 3 } else { 2 };
            } else {
                i += 1;
            }
        }
        let raw = RawSeries::new("x", (0..n).map(|k| k as f64).collect(), vals.clone()).unwrap();
        let out = impute_missing(&raw).unwrap();
        prop_assert!(!out.has_missing());
        for (a, b) in vals.iter().zip(&out.values) {
            if let Some(x) = a {
                prop_assert_eq!(Some(*x), *b);
            }
        }
    }
}

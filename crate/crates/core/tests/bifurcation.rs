use elkwolf::bifurcation::*;
use elkwolf::dynsys::*;
use elkwolf::equilibria::{find_equilibria, Kind};

const A1_RANGE: (f64, f64) = (0.2, 0.6);

fn base() -> ParamSet {
    ParamSet::bifurcation_baseline().with(ParamId::A2, 2.138)
}

fn special(branches: &[Branch], kind: BifKind) -> Vec<BifPoint> {
    let mut v: Vec<BifPoint> = branches
        .iter()
        .flat_map(|b| b.special_points.iter().filter(|s| s.kind == kind && s.state[0] > 0.0 && s.state[1] > 0.0).cloned())
        .collect();
    v.sort_by(|a, b| a.param_values[0].partial_cmp(&b.param_values[0]).unwrap());
    v.dedup_by(|a, b| (a.param_values[0] - b.param_values[0]).abs() < 1e-8);
    v
}

fn a1_branches(settings: &ContinuationSettings) -> Vec<Branch> {
    continue_branch(&base(), ParamId::A1, A1_RANGE, settings).unwrap()
}

/// Interior branch points must coincide with a `find_equilibria` result.
fn on_some_equilibrium(p: &ParamSet, id: ParamId, pt: &BranchPoint, tol: f64) -> bool {
    if pt.e <= 1e-6 || pt.w <= 1e-6 {
        return true;
    }
    find_equilibria(&p.with(id, pt.param))
        .iter()
        .any(|q| (q.e - pt.e).abs() < tol && (q.w - pt.w).abs() < tol)
}

#[test]
fn a1_thresholds() {
    let br = a1_branches(&ContinuationSettings::default());
    let sn = special(&br, BifKind::SaddleNode);
    let hopf = special(&br, BifKind::Hopf);
    let sn_at: Vec<f64> = sn.iter().map(|s| s.param_values[0]).collect();
    let h_at: Vec<f64> = hopf.iter().map(|s| s.param_values[0]).collect();
    for (want, got) in [(0.2534004, &sn_at), (0.39067856, &sn_at), (0.32514388, &h_at), (0.3739507, &h_at)] {
        assert!(got.iter().any(|v| (v - want).abs() < 1e-4), "{want} not in {got:?}");
    }
    for s in &sn {
        assert!(s.det.abs() < 1e-8 && s.residual < 1e-10);
    }
    for h in &hopf {
        assert!(h.trace.abs() < 1e-8 && h.det > 0.0);
        assert!(h.lyapunov_l1.unwrap() < 0.0);
    }
    for s in special(&br, BifKind::NeutralSaddle) {
        assert!(s.trace.abs() < 1e-8 && s.det < 0.0);
    }
}

#[test]
fn folds_change_equilibrium_count_by_two() {
    let br = a1_branches(&ContinuationSettings::default());
    let p = base();
    for s in special(&br, BifKind::SaddleNode) {
        let a = s.param_values[0];
        let lo = find_equilibria(&p.with(ParamId::A1, a - 1e-4)).len() as i64;
        let hi = find_equilibria(&p.with(ParamId::A1, a + 1e-4)).len() as i64;
        assert_eq!((lo - hi).abs(), 2, "fold at {a}: {lo} vs {hi}");
    }
}

#[test]
fn branch_points_are_equilibria() {
    for b in a1_branches(&ContinuationSettings::default()) {
        let p = base();
        for pt in &b.points {
            let r = p.with(ParamId::A1, pt.param).to_field().eval([pt.e, pt.w]);
            assert!(r[0].hypot(r[1]) < 1e-10, "residual at {}", pt.param);
        }
    }
}

#[test]
fn hopf_amplitude_grows_like_square_root() {
    let br = a1_branches(&ContinuationSettings::default());
    let hopf = special(&br, BifKind::Hopf);
    assert_eq!(hopf.len(), 2);
    // the bubble lies between the two Hopf values
    let inward = [1.0, -1.0];
    for (h, dir) in hopf.iter().zip(inward) {
        let amps: Vec<f64> = [4e-3, 1e-3, 2.5e-4]
            .iter()
            .map(|d| {
                let q = base().with(ParamId::A1, h.param_values[0] + dir * d);
                let c = find_equilibria(&q).into_iter().find(|e| e.kind == Kind::UnstableFocus).unwrap();
                let re = c.eigenvalues[0].re;
                let omega = c.eigenvalues[0].im.abs();
                let orbit = extract_periodic_orbit(&q.to_field(), [c.e, c.w], State::new(c.e + 1e-3, c.w), 30.0 / re, 1300.0 / omega)
                    .expect("no orbit inside the bubble");
                assert!(orbit.return_residual < 1e-6 && orbit.period > 0.0);
                orbit.amplitude[0]
            })
            .collect();
        for w in amps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.0..=4.0).contains(&ratio), "ratio {ratio} for amplitudes {amps:?}");
        }
    }
}

#[test]
fn orbit_inside_bubble_and_none_outside() {
    let inside = base().with(ParamId::A1, 0.35);
    let c = find_equilibria(&inside).into_iter().find(|e| e.kind == Kind::UnstableFocus).unwrap();
    let o = extract_periodic_orbit(&inside.to_field(), [c.e, c.w], State::new(c.e + 1e-3, c.w), 200.0, 2000.0).unwrap();
    assert!(o.amplitude.iter().all(|a| *a > 1e-3));
    for a1 in [0.2, 0.45, 0.5] {
        let q = base().with(ParamId::A1, a1);
        for e in find_equilibria(&q) {
            let o = extract_periodic_orbit(&q.to_field(), [e.e, e.w], State::new(e.e + 1e-3, e.w), 200.0, 2000.0);
            assert!(o.is_none(), "orbit at a1 = {a1}");
        }
    }
}

#[test]
fn collapsed_range_returns_the_equilibria() {
    let p = base();
    let br = continue_branch(&p, ParamId::A1, (0.35, 0.35), &ContinuationSettings::default()).unwrap();
    let eq = find_equilibria(&p.with(ParamId::A1, 0.35));
    assert_eq!(br.len(), eq.len());
    for (b, q) in br.iter().zip(&eq) {
        assert_eq!(b.points.len(), 1);
        assert_eq!((b.points[0].e, b.points[0].w), (q.e, q.w));
    }
}

#[test]
fn reversed_traversal_traces_the_same_set() {
    let p = base();
    let fam = ParamSet::family();
    let prob = OneParam { fam: &fam, p0: p.to_array().to_vec(), k: ParamId::A1.index() };
    let s = ContinuationSettings::default();
    let seeds: Vec<[f64; 3]> =
        find_equilibria(&p.with(ParamId::A1, A1_RANGE.0)).iter().map(|q| [A1_RANGE.0, q.e, q.w]).collect();
    let fwd = continue_branch_family(&prob, A1_RANGE, &s, &seeds).unwrap();
    // restart every branch from its far end
    let far: Vec<[f64; 3]> = fwd.iter().map(|b| b.points.last().unwrap()).map(|q| [q.param, q.e, q.w]).collect();
    let bwd = continue_branch_family(&prob, A1_RANGE, &s, &far).unwrap();
    let sp = |b: &[Branch]| {
        let mut v: Vec<(f64, f64, f64)> =
            b.iter().flat_map(|x| x.special_points.iter().map(|s| (s.param_values[0], s.state[0], s.state[1]))).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    let (a, b) = (sp(&fwd), sp(&bwd));
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    for (x, y) in a.iter().zip(&b) {
        assert!((x.0 - y.0).abs() < 1e-8 && (x.1 - y.1).abs() < 1e-8 && (x.2 - y.2).abs() < 1e-8);
    }
    for br in bwd.iter().chain(&fwd) {
        for pt in &br.points {
            assert!(on_some_equilibrium(&p, ParamId::A1, pt, 1e-8));
        }
    }
}

#[test]
fn halving_max_step_keeps_the_point_set() {
    let p = base();
    let mut fine = ContinuationSettings::default();
    fine.pal.h_max *= 0.5;
    let coarse_br = a1_branches(&ContinuationSettings::default());
    let fine_br = a1_branches(&fine);
    for kind in [BifKind::SaddleNode, BifKind::Hopf, BifKind::NeutralSaddle] {
        let a = special(&coarse_br, kind);
        let b = special(&fine_br, kind);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.param_values[0] - y.param_values[0]).abs() < 1e-8);
        }
    }
    for br in &fine_br {
        for pt in &br.points {
            assert!(on_some_equilibrium(&p, ParamId::A1, pt, 1e-8));
        }
    }
    // turning points bound the curve, not the nearest stored sample
    let ext = |v: &[Branch]| {
        v.iter()
            .flat_map(|b| b.points.iter().map(|p| p.param).chain(b.special_points.iter().map(|s| s.param_values[0])))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| (a.0.min(x), a.1.max(x)))
    };
    let (c, f) = (ext(&coarse_br), ext(&fine_br));
    assert!((c.0 - f.0).abs() < 1e-8 && (c.1 - f.1).abs() < 1e-8);
}

#[test]
fn coexistence_examples() {
    let s = ContinuationSettings::default();
    let p = ParamSet::bifurcation_baseline();
    let a1 = coexistence_scan(&p, ParamId::A1, (0.0, 1.008), &s).unwrap().baseline_interval.unwrap();
    assert!((a1.0 - 0.37553122).abs() < 1e-3 && (a1.1 - 0.5229818).abs() < 1e-3, "{a1:?}");
    let b7 = coexistence_scan(&p, ParamId::B7, (0.0, 0.112), &s).unwrap().baseline_interval.unwrap();
    assert!((b7.0 - 0.0036901601).abs() < 1e-3 && (b7.1 - 0.070005091).abs() < 1e-3, "{b7:?}");
    // at a1 = 0.2 only saddles exist
    let none = coexistence_scan(&base(), ParamId::A1, (0.2, 0.2 + 1e-9), &s).unwrap();
    assert!(none.intervals.is_empty(), "{:?}", none.intervals);
}

fn two_param_special(p: &ParamSet, kind: Codim1Kind, seed: &BifPoint, ids: (ParamId, ParamId), ranges: [(f64, f64); 2]) -> Vec<BifPoint> {
    continue_codim1_in_two_params(p, kind, ids, ranges, seed, &ContinuationSettings::default())
        .unwrap()
        .special_points
        .into_iter()
        .filter(|s| s.state[0] > 0.0 && s.state[1] > 0.0)
        .collect()
}

#[test]
fn bt_and_cusp_in_the_a1_a2_plane() {
    let br = a1_branches(&ContinuationSettings::default());
    let p = base();
    let ids = (ParamId::A1, ParamId::A2);
    let ranges = [(0.0, 1.0), (1.0, 3.0)];
    let ns = special(&br, BifKind::NeutralSaddle);
    let sn = special(&br, BifKind::SaddleNode);
    let from_tr: Vec<BifPoint> = ns.iter().flat_map(|s| two_param_special(&p, Codim1Kind::Hopf, s, ids, ranges)).collect();
    let from_sn: Vec<BifPoint> = sn.iter().flat_map(|s| two_param_special(&p, Codim1Kind::SaddleNode, s, ids, ranges)).collect();
    let near = |pts: &[BifPoint], kind: BifKind, x: f64, y: f64| {
        pts.iter().any(|s| s.kind == kind && (s.param_values[0] - x).abs() < 2e-3 && (s.param_values[1] - y).abs() < 2e-3)
    };
    assert!(near(&from_tr, BifKind::BogdanovTakens, 0.57383395, 1.7798861), "{from_tr:?}");
    assert!(near(&from_sn, BifKind::BogdanovTakens, 0.57383395, 1.7798861), "{from_sn:?}");
    assert!(near(&from_sn, BifKind::Cusp, 0.57888323, 1.7631351), "{from_sn:?}");
    for s in from_tr.iter().chain(&from_sn).filter(|s| s.kind == BifKind::BogdanovTakens) {
        assert!(s.det.abs() < 1e-6 && s.trace.abs() < 1e-6);
    }
}

#[test]
fn bt_and_cusp_exist_in_the_a2_a3_plane() {
    let p = ParamSet::bifurcation_baseline();
    let s = ContinuationSettings::default();
    let br = continue_branch(&p, ParamId::A2, (1.5, 2.6), &s).unwrap();
    let ids = (ParamId::A2, ParamId::A3);
    let ranges = [(1.0, 3.5), (0.8, 2.0)];
    let mut found: Vec<BifKind> = Vec::new();
    for b in &br {
        for sp in &b.special_points {
            let kind = match sp.kind {
                BifKind::SaddleNode => Codim1Kind::SaddleNode,
                BifKind::Hopf | BifKind::NeutralSaddle => Codim1Kind::Hopf,
                _ => continue,
            };
            found.extend(two_param_special(&p, kind, sp, ids, ranges).iter().map(|x| x.kind));
        }
    }
    assert!(found.contains(&BifKind::BogdanovTakens), "{found:?}");
    assert!(found.contains(&BifKind::Cusp), "{found:?}");
}

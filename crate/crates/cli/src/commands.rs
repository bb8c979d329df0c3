//! One function per subcommand. Each reads its inputs, writes its artifacts
//! under the output directory and returns the paths it wrote.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use elkwolf::bifurcation::{self, BifKind, BifPoint, Branch, Codim1Kind, ContinuationSettings, TwoParamCurve};
use elkwolf::dynsys::{integrate, linspace, CubicField, ParamId, State};
use elkwolf::equilibria::{self, find_equilibria};
use elkwolf::gpr::{self, FitOptions, Resampled};
use elkwolf::io::{self, num};
use elkwolf::select::{self, ScoreData, SseMode};
use elkwolf::sindy::{self, CandidateLibrary, EnsembleConfig, SparseModel};
use elkwolf::timeseries::{self, RawSeries};

use crate::config::{Normalize, RunConfig};
use crate::svg::{Plot, Series, Style};

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    Ok(cfg.out.clone())
}

fn save<F>(path: PathBuf, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> elkwolf::Result<()>,
{
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    Ok(path)
}

fn save_text(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

/// Times and states from a states CSV (`t,e,w`) or a smoothed CSV (means only).
fn read_trajectory(path: &Path) -> Result<(Vec<f64>, Vec<State>)> {
    let (header, cols) = io::read_numeric_csv(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    let (ie, iw) = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["t", "e", "w"] => (1, 2),
        ["t", "mean_e", "var_e", "mean_w", "var_w"] => (1, 3),
        other => bail!("{}: expected t,e,w or smoothed columns, got {}", path.display(), other.join(",")),
    };
    let states = cols[ie].iter().zip(&cols[iw]).map(|(e, w)| State::new(*e, *w)).collect();
    Ok((cols[0].clone(), states))
}

pub fn synth(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let seed = cfg.require_seed("synth")?;
    let p = cfg.base_params()?;
    let s = &cfg.synth;
    let out = out_dir(cfg)?;
    let span = (s.t_start, s.t_end);
    let (elk, wolf) = timeseries::synthesize_relative(&p, cfg.synth_start(), span, s.n_points, s.noise, seed)?;
    let (ce, cw) = timeseries::synthesize(&p, cfg.synth_start(), span, s.n_points, 0.0, seed)?;
    Ok(vec![
        save(out.join("synthetic.csv"), |w| io::write_population_csv(w, &elk, &wolf))?,
        save(out.join("truth.csv"), |w| io::write_states_csv(w, &ce.times, &ce.dense_values()?, &cw.dense_values()?))?,
    ])
}

struct Smoothed {
    label: String,
    times: Vec<f64>,
    values: Vec<f64>,
    resampled: Resampled,
}

fn normalized(raw: &RawSeries, how: Normalize, cfg: &RunConfig) -> Result<(Vec<f64>, String)> {
    let conv = cfg.smooth.sd()?;
    let norm = match how {
        Normalize::None => return Ok((raw.dense_values()?, "none".into())),
        Normalize::Zscore => timeseries::zscore_with(raw, conv)?,
        Normalize::Positive => timeseries::positive_rescale(&timeseries::zscore_with(raw, conv)?),
    };
    let info = format!(
        "mu = {}\nsigma = {}\noffset = {}\nscale = {}\nsd_convention = {}",
        num(norm.mu),
        num(norm.sigma),
        num(norm.offset),
        num(norm.scale),
        norm.sd_convention.name()
    );
    Ok((norm.values, info))
}

pub fn smooth(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let seed = cfg.require_seed("smooth")?;
    let input = cfg.smooth.input.clone().or_else(|| cfg.input.clone()).unwrap_or_else(|| cfg.out.join("synthetic.csv"));
    let (elk, wolf) = io::read_population_csv(open(&input)?).with_context(|| format!("reading {}", input.display()))?;
    let out = out_dir(cfg)?;
    let mut fitted = Vec::new();
    let mut report = String::new();
    for (i, (raw, kc)) in [(elk, &cfg.smooth.elk), (wolf, &cfg.smooth.wolf)].into_iter().enumerate() {
        let raw = timeseries::impute_missing(&raw).with_context(|| format!("{} series", raw.label))?;
        let (values, norm_info) = normalized(&raw, cfg.smooth.normalize, cfg).with_context(|| format!("{} series", raw.label))?;
        let spec = kc.spec()?;
        let opts = FitOptions { n_restarts: cfg.smooth.restarts, seed: seed.wrapping_add(i as u64), max_iters: cfg.smooth.max_iters };
        let gp = gpr::fit(&spec, &raw.times, &values, &opts).with_context(|| format!("fitting the {} series", raw.label))?;
        let span = (raw.times[0], *raw.times.last().unwrap());
        let resampled = gpr::resample(&gp, cfg.smooth.n_points, span)?;
        let k = &gp.kernel;
        report.push_str(&format!(
            "[{}]\nkernel = {}\nlength_scale = {}\nsignal_variance = {}\nnoise_variance = {}\nlog_marginal_likelihood = {}\njitter = {}\n{}\n\n",
            raw.label,
            k.kind.name(),
            num(k.length_scale),
            num(k.signal_variance),
            num(k.noise_variance),
            num(gp.log_marginal_likelihood),
            num(gp.jitter),
            if norm_info == "none" { "normalize = none".to_string() } else { norm_info },
        ));
        fitted.push(Smoothed { label: raw.label.clone(), times: raw.times.clone(), values, resampled });
    }
    let (e, w) = (&fitted[0], &fitted[1]);
    let mut band = String::from("t,lo_e,hi_e,lo_w,hi_w\n");
    let (le, he) = e.resampled.band();
    let (lw, hw) = w.resampled.band();
    for i in 0..e.resampled.times.len() {
        band.push_str(&format!("{},{},{},{},{}\n", num(e.resampled.times[i]), num(le[i]), num(he[i]), num(lw[i]), num(hw[i])));
    }
    let mut plot = Plot::new("Smoothed time series", "t", "value");
    for (s, color) in [(e, "#1f77b4"), (w, "#d62728")] {
        let r = &s.resampled;
        let (lo, hi) = r.band();
        let pts = |v: &[f64]| r.times.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
        plot = plot
            .with(Series::new(format!("{} data", s.label), s.times.iter().copied().zip(s.values.iter().copied()).collect(), Style::Dots).color(color))
            .with(Series::new(format!("{} mean", s.label), pts(&r.mean), Style::Line).color(color))
            .with(Series::new("", pts(&lo), Style::Dashed).color(color))
            .with(Series::new("", pts(&hi), Style::Dashed).color(color));
    }
    Ok(vec![
        save(out.join("smoothed.csv"), |wr| io::write_smoothed_csv(wr, &e.resampled, &w.resampled))?,
        save_text(out.join("band.csv"), &band)?,
        save_text(out.join("smoothing.txt"), report.trim_end())?,
        save_text(out.join("timeseries.svg"), &plot.render())?,
    ])
}

fn model_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let mut v = Vec::new();
    if !dir.exists() {
        return Ok(v);
    }
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let id = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_prefix("model_"))
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|n| n.parse::<usize>().ok());
        if let Some(id) = id {
            v.push((id, path));
        }
    }
    v.sort();
    Ok(v)
}

pub fn discover(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let seed = cfg.require_seed("discover")?;
    let input = cfg.discover.input.clone().unwrap_or_else(|| cfg.out.join("smoothed.csv"));
    let (t, states) = read_trajectory(&input)?;
    let xdot = sindy::differentiate_states(&t, &states)?;
    let lib = CandidateLibrary::cubic();
    let mut base = EnsembleConfig::new(0.0, 0.01, 1, 1.0, seed);
    base.n_library_drops = cfg.discover.library_drops;
    base.inclusion_threshold = cfg.discover.inclusion_threshold;
    base.stlsq = cfg.discover.stlsq()?;
    let models = sindy::run_grid(&lib, &states, &xdot, &cfg.discover.grid(), &base)?;
    let out = out_dir(cfg)?;
    let dir = out.join("models");
    // stale files from an earlier, larger grid would be picked up by `select`
    for (_, old) in model_files(&dir)? {
        fs::remove_file(&old).with_context(|| format!("removing {}", old.display()))?;
    }
    fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    for g in &models {
        written.push(save(dir.join(format!("model_{:03}.csv", g.id)), |w| io::write_model_csv(w, &g.model))?);
    }
    written.push(save(out.join("grid_report.csv"), |w| io::write_grid_report(w, &models))?);
    Ok(written)
}

pub fn select(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let data_path = cfg.select.data.clone().unwrap_or_else(|| cfg.out.join("smoothed.csv"));
    let dir = cfg.select.models.clone().unwrap_or_else(|| cfg.out.join("models"));
    let (t, states) = read_trajectory(&data_path)?;
    let mode = cfg.select.mode()?;
    let criterion = cfg.select.criterion()?;
    let files = model_files(&dir)?;
    if files.is_empty() {
        bail!("no model_*.csv files in {}", dir.display());
    }
    let mut fields: Vec<(usize, CubicField)> = Vec::new();
    for (id, path) in &files {
        let m: SparseModel = io::read_model_csv(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        fields.push((*id, m.to_field()?));
    }
    let derivs = match mode {
        SseMode::Derivative => Some(sindy::differentiate_states(&t, &states)?),
        SseMode::Trajectory => None,
    };
    let data = ScoreData { times: &t, states: &states, derivatives: derivs.as_deref() };
    let ranked = select::rank(&select::score_all(&fields, &data, mode)?, criterion);
    let best = &ranked[0];
    let best_path = &files.iter().find(|(id, _)| *id == best.model_id).unwrap().1;
    let out = out_dir(cfg)?;
    let best_copy = out.join("best_model.csv");
    fs::copy(best_path, &best_copy).with_context(|| format!("copying {}", best_path.display()))?;
    let summary = format!(
        "criterion = {}\nsse = {}\nbest_model = {}\nk = {}\nsse_value = {}\naic = {}\nbic = {}\nconverged = {}\n",
        cfg.select.criterion,
        cfg.select.sse,
        best.model_id,
        best.k,
        num(best.sse),
        num(best.aic),
        num(best.bic),
        best.converged
    );
    Ok(vec![
        save(out.join("scores.csv"), |w| io::write_scores_csv(w, &ranked))?,
        best_copy,
        save_text(out.join("selection.txt"), &summary)?,
    ])
}

fn start_state(cfg: &RunConfig) -> State {
    State::new(cfg.simulate.e0.unwrap_or(cfg.synth.e0), cfg.simulate.w0.unwrap_or(cfg.synth.w0))
}

pub fn simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let s = &cfg.simulate;
    let field = match &s.model {
        Some(p) => io::read_model_csv(open(p)?).with_context(|| format!("reading {}", p.display()))?.to_field()?,
        None => cfg.base_params()?.to_field(),
    };
    let span = (s.t_start, s.t_end);
    let t = linspace(s.t_start, s.t_end, s.n_points);
    let x0 = start_state(cfg);
    let tr = integrate(&field, x0, span, &t).with_context(|| format!("simulating from ({}, {})", x0.e, x0.w))?;
    if let Some(tb) = tr.blow_up_at {
        log::warn!("simulated trajectory blew up at t = {tb}; output is truncated");
    }
    let e: Vec<f64> = tr.states.iter().map(|x| x.e).collect();
    let w: Vec<f64> = tr.states.iter().map(|x| x.w).collect();
    let series = Plot::new("Simulated populations", "t", "state")
        .with(Series::new("elk", tr.times.iter().copied().zip(e.iter().copied()).collect(), Style::Line))
        .with(Series::new("wolf", tr.times.iter().copied().zip(w.iter().copied()).collect(), Style::Line));

    let mut phase = Plot::new("Phase portrait", "elk e", "wolf w");
    let sample_t = linspace(s.t_start, s.t_end, 300);
    for (i, j) in (0..4).flat_map(|i| (0..4).map(move |j| (i, j))) {
        let x0 = State::new(0.5 + 1.8 * i as f64, 0.5 + 1.8 * j as f64);
        if let Ok(r) = integrate(&field, x0, span, &sample_t) {
            let pts: Vec<(f64, f64)> = r.states.iter().filter(|x| x.e.abs() < 20.0 && x.w.abs() < 20.0).map(|x| (x.e, x.w)).collect();
            phase = phase.with(Series::new("", pts, Style::Line).color("#bbbbbb"));
        }
    }
    phase = phase.with(Series::new("trajectory", e.iter().copied().zip(w.iter().copied()).collect(), Style::Line).color("#1f77b4"));
    let mut eq = Series::new("equilibria", vec![], Style::Markers).color("#d62728");
    for x in equilibria::grid_equilibria(&field, (0.0, 8.0), (0.0, 8.0), 40) {
        if x[0] > 0.0 && x[1] > 0.0 {
            if let Ok(q) = equilibria::classify_field(&field, x) {
                eq.points.push((q.e, q.w));
                eq.point_labels.push(q.kind.name().to_string());
            }
        }
    }
    phase = phase.with(eq);
    let out = out_dir(cfg)?;
    Ok(vec![
        save(out.join("trajectory.csv"), |wr| io::write_states_csv(wr, &tr.times, &e, &w))?,
        save_text(out.join("simulation.svg"), &series.render())?,
        save_text(out.join("phase_portrait.svg"), &phase.render())?,
    ])
}

pub fn equilibria(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let eq = find_equilibria(&cfg.base_params()?);
    let out = out_dir(cfg)?;
    Ok(vec![save(out.join("equilibria.csv"), |w| io::write_equilibria_csv(w, &eq))?])
}

fn interior(points: impl IntoIterator<Item = BifPoint>) -> Vec<BifPoint> {
    let mut v: Vec<BifPoint> = points.into_iter().filter(|s| s.state[0] > 0.0 && s.state[1] > 0.0).collect();
    v.sort_by(|a, b| a.param_values.partial_cmp(&b.param_values).unwrap());
    v.dedup_by(|a, b| a.kind == b.kind && a.param_values.iter().zip(&b.param_values).all(|(x, y)| (x - y).abs() < 1e-7));
    v
}

fn branch_specials(branches: &[Branch]) -> Vec<BifPoint> {
    interior(branches.iter().flat_map(|b| b.special_points.iter().cloned()))
}

/// File stem per target: the parameter name(s), numbered on repeats.
fn stems(names: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    names
        .map(|n| {
            let c = seen.entry(n.clone()).or_insert(0);
            *c += 1;
            if *c == 1 {
                n
            } else {
                format!("{n}_{c}")
            }
        })
        .collect()
}

fn bifurcation_plot(name: &str, branches: &[Branch], special: &[BifPoint]) -> Plot {
    let mut plot = Plot::new(format!("Equilibria of e along {name}"), name, "elk e");
    for (k, b) in branches.iter().enumerate() {
        let mut stable = Vec::new();
        let mut unstable = Vec::new();
        for (i, p) in b.points.iter().enumerate() {
            let prev = if i > 0 { Some(b.points[i - 1].stable) } else { None };
            let gap = (f64::NAN, f64::NAN);
            stable.push(if p.stable || prev == Some(true) { (p.param, p.e) } else { gap });
            unstable.push(if !p.stable || prev == Some(false) { (p.param, p.e) } else { gap });
        }
        let (ls, lu) = if k == 0 { ("stable", "unstable") } else { ("", "") };
        plot = plot.with(Series::new(ls, stable, Style::Line).color("#1f77b4"));
        plot = plot.with(Series::new(lu, unstable, Style::Dashed).color("#d62728"));
    }
    let mut m = Series::new("", special.iter().map(|s| (s.param_values[0], s.state[0])).collect(), Style::Markers).color("#000000");
    m.point_labels = special.iter().map(|s| s.kind.name().to_string()).collect();
    plot.with(m)
}

pub fn continuation(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let targets = &cfg.analysis.continuation;
    if targets.is_empty() {
        return Ok(vec![]);
    }
    let settings = ContinuationSettings::default();
    let out = out_dir(cfg)?;
    let mut written = Vec::new();
    for (t, stem) in targets.iter().zip(stems(targets.iter().map(|t| t.param.clone()))) {
        let p = cfg.analysis_params(&t.set)?;
        let id: ParamId = t.param.parse()?;
        let branches = bifurcation::continue_branch(&p, id, (t.range[0], t.range[1]), &settings)
            .with_context(|| format!("continuing in {}", t.param))?;
        let special = branch_specials(&branches);
        written.push(save(out.join(format!("branch_{stem}.csv")), |w| io::write_branch_csv(w, &branches))?);
        written.push(save(out.join(format!("special_points_{stem}.csv")), |w| io::write_special_points_csv(w, &special))?);
        written.push(save_text(out.join(format!("bifurcation_{stem}.svg")), &bifurcation_plot(&t.param, &branches, &special).render())?);
    }
    Ok(written)
}

fn near_curve(c: &TwoParamCurve, x: [f64; 4]) -> bool {
    c.points.iter().any(|p| (0..4).all(|i| (p[i] - x[i]).abs() < 2e-2))
}

fn codim2_plot(names: &[String; 2], curves: &[TwoParamCurve], special: &[BifPoint]) -> Plot {
    let mut plot = Plot::new(format!("Codimension-one curves in ({}, {})", names[0], names[1]), &names[0], &names[1]);
    let mut labelled = [false; 3];
    for c in curves {
        for (slot, kind, style, color, label) in [
            (0, BifKind::SaddleNode, Style::Line, "#d62728", "saddle-node"),
            (1, BifKind::Hopf, Style::Line, "#1f77b4", "Hopf"),
            (2, BifKind::NeutralSaddle, Style::Dashed, "#999999", "neutral saddle"),
        ] {
            if !c.point_kinds.contains(&kind) {
                continue;
            }
            let pts = c
                .points
                .iter()
                .zip(&c.point_kinds)
                .map(|(p, k)| if *k == kind { (p[0], p[1]) } else { (f64::NAN, f64::NAN) })
                .collect();
            let l = if labelled[slot] { "" } else { label };
            labelled[slot] = true;
            plot = plot.with(Series::new(l, pts, style).color(color));
        }
    }
    let mut m = Series::new("", special.iter().map(|s| (s.param_values[0], s.param_values[1])).collect(), Style::Markers).color("#000000");
    m.point_labels = special.iter().map(|s| s.kind.name().to_string()).collect();
    plot.with(m)
}

pub fn codim2(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let targets = &cfg.analysis.codim2;
    if targets.is_empty() {
        return Ok(vec![]);
    }
    let settings = ContinuationSettings::default();
    let out = out_dir(cfg)?;
    let mut written = Vec::new();
    for (t, stem) in targets.iter().zip(stems(targets.iter().map(|t| format!("{}_{}", t.params[0], t.params[1])))) {
        let p = cfg.analysis_params(&t.set)?;
        let ix: ParamId = t.params[0].parse()?;
        let iy: ParamId = t.params[1].parse()?;
        let branches = bifurcation::continue_branch(&p, ix, (t.seed_range[0], t.seed_range[1]), &settings)
            .with_context(|| format!("seed continuation in {}", t.params[0]))?;
        let want = |c: &str| t.curves.iter().any(|x| x == c);
        let mut curves: Vec<TwoParamCurve> = Vec::new();
        for s in branch_specials(&branches) {
            let kind = match s.kind {
                BifKind::SaddleNode if want("sn") => Codim1Kind::SaddleNode,
                BifKind::Hopf | BifKind::NeutralSaddle if want("hopf") => Codim1Kind::Hopf,
                _ => continue,
            };
            let x = [s.param_values[0], p.get(iy), s.state[0], s.state[1]];
            if curves.iter().any(|c| c.kind == kind && near_curve(c, x)) {
                continue;
            }
            let ranges = [(t.ranges[0][0], t.ranges[0][1]), (t.ranges[1][0], t.ranges[1][1])];
            match bifurcation::continue_codim1_in_two_params(&p, kind, (ix, iy), ranges, &s, &settings) {
                Ok(c) => curves.push(c),
                Err(e) => log::warn!("{:?} curve from {} = {}: {e}", kind, t.params[0], s.param_values[0]),
            }
        }
        let special = interior(curves.iter().flat_map(|c| c.special_points.iter().cloned()));
        written.push(save(out.join(format!("codim2_{stem}.csv")), |w| io::write_two_param_csv(w, &curves))?);
        written.push(save(out.join(format!("codim2_special_{stem}.csv")), |w| io::write_special_points_csv(w, &special))?);
        written.push(save_text(out.join(format!("codim2_{stem}.svg")), &codim2_plot(&t.params, &curves, &special).render())?);
    }
    Ok(written)
}

/// Scan window for a parameter with baseline value `v`.
pub fn scan_range(v: f64) -> (f64, f64) {
    (0.0f64.min(2.0 * v), (2.0 * v).max(v + 0.1))
}

pub fn scan(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let names = &cfg.analysis.scan;
    if names.is_empty() {
        return Ok(vec![]);
    }
    let ids: Vec<ParamId> = if names.iter().any(|n| n == "all") {
        ParamId::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<elkwolf::Result<_>>()?
    };
    let p = cfg.analysis_params(&BTreeMap::new())?;
    let settings = ContinuationSettings::default();
    let mut table = String::from("param,baseline,lo,hi\n");
    let mut all = String::from("param,lo,hi\n");
    for id in ids {
        let v = p.get(id);
        let c = bifurcation::coexistence_scan(&p, id, scan_range(v), &settings).with_context(|| format!("scanning {}", id.name()))?;
        let (lo, hi) = c.baseline_interval.map(|(a, b)| (num(a), num(b))).unwrap_or_default();
        table.push_str(&format!("{},{},{lo},{hi}\n", id.name(), num(v)));
        for (a, b) in &c.intervals {
            all.push_str(&format!("{},{},{}\n", id.name(), num(*a), num(*b)));
        }
    }
    let out = out_dir(cfg)?;
    Ok(vec![save_text(out.join("coexistence.csv"), &table)?, save_text(out.join("coexistence_intervals.csv"), &all)?])
}

/// Every stage in order: (synth) → smooth → discover → select → simulate → analysis.
pub fn reproduce(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut cfg = cfg.clone();
    let mut written = Vec::new();
    if cfg.input.is_none() && cfg.smooth.input.is_none() {
        written.extend(synth(&cfg)?);
    }
    written.extend(smooth(&cfg)?);
    written.extend(discover(&cfg)?);
    written.extend(select(&cfg)?);
    if cfg.simulate.model.is_none() {
        // the discovered model lives in the smoothed (normalized) coordinates
        cfg.simulate.model = Some(cfg.out.join("best_model.csv"));
        let (_, states) = read_trajectory(&cfg.out.join("smoothed.csv"))?;
        cfg.simulate.e0 = cfg.simulate.e0.or(Some(states[0].e));
        cfg.simulate.w0 = cfg.simulate.w0.or(Some(states[0].w));
    }
    written.extend(simulate(&cfg)?);
    if cfg.analysis.equilibria {
        written.extend(equilibria(&cfg)?);
    }
    written.extend(continuation(&cfg)?);
    written.extend(codim2(&cfg)?);
    written.extend(scan(&cfg)?);
    let mut manifest = String::new();
    for p in &written {
        let rel = p.strip_prefix(&cfg.out).unwrap_or(p);
        manifest.push_str(&format!("{}\n", rel.display()));
    }
    written.push(save_text(cfg.out.join("manifest.txt"), &manifest)?);
    Ok(written)
}

//! Run configuration. A single TOML file drives every command; any key can be
//! overridden from the command line with `--set section.key=value`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use elkwolf::dynsys::{ParamId, ParamSet, State};
use elkwolf::gpr::{KernelKind, KernelSpec};
use elkwolf::select::{Criterion, SseMode};
use elkwolf::sindy::{HyperGrid, Refit, StlsqOptions};
use elkwolf::timeseries::SdConvention;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: PathBuf,
    /// Population CSV (`year,elk,wolf`). Without one, `reproduce-paper` synthesizes data.
    pub input: Option<PathBuf>,
    /// ParamSet key-value file; defaults to the discovered-model coefficients.
    pub params: Option<PathBuf>,
    pub synth: SynthConfig,
    pub smooth: SmoothConfig,
    pub discover: DiscoverConfig,
    pub select: SelectConfig,
    pub simulate: SimulateConfig,
    pub analysis: AnalysisConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            out: PathBuf::from("out"),
            input: None,
            params: None,
            synth: SynthConfig::default(),
            smooth: SmoothConfig::default(),
            discover: DiscoverConfig::default(),
            select: SelectConfig::default(),
            simulate: SimulateConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub e0: f64,
    pub w0: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    /// Noise SD as a fraction of each noiseless series' SD.
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { e0: 4.25493696, w0: 1.17008188, t_start: 0.0, t_end: 28.0, n_points: 29, noise: 0.01 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub kernel: String,
    pub length_scale: f64,
    pub length_scale_bounds: [f64; 2],
    pub signal_variance: f64,
    pub signal_variance_bounds: [f64; 2],
    pub optimize_signal_variance: bool,
    pub noise_variance: f64,
    pub noise_variance_bounds: [f64; 2],
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self::of(KernelSpec::rbf(), "rbf")
    }
}

impl KernelConfig {
    fn of(s: KernelSpec, name: &str) -> Self {
        Self {
            kernel: name.into(),
            length_scale: s.length_scale,
            length_scale_bounds: [s.length_scale_bounds.0, s.length_scale_bounds.1],
            signal_variance: s.signal_variance,
            signal_variance_bounds: [s.signal_variance_bounds.0, s.signal_variance_bounds.1],
            optimize_signal_variance: s.optimize_signal_variance,
            noise_variance: s.noise_variance,
            noise_variance_bounds: [s.noise_variance_bounds.0, s.noise_variance_bounds.1],
        }
    }

    fn matern() -> Self {
        Self::of(KernelSpec::matern52(), "matern")
    }

    pub fn spec(&self) -> Result<KernelSpec> {
        let kind: KernelKind = self.kernel.parse()?;
        let mut s = KernelSpec::new(kind);
        s.length_scale = self.length_scale;
        s.length_scale_bounds = (self.length_scale_bounds[0], self.length_scale_bounds[1]);
        s.signal_variance = self.signal_variance;
        s.signal_variance_bounds = (self.signal_variance_bounds[0], self.signal_variance_bounds[1]);
        s.optimize_signal_variance = self.optimize_signal_variance;
        s.noise_variance = self.noise_variance;
        s.noise_variance_bounds = (self.noise_variance_bounds[0], self.noise_variance_bounds[1]);
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    /// Use the values as given.
    None,
    Zscore,
    /// z-score, then shift/scale to positive values.
    Positive,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothConfig {
    pub input: Option<PathBuf>,
    pub n_points: usize,
    pub normalize: Normalize,
    pub sd_convention: String,
    pub restarts: usize,
    pub max_iters: u64,
    pub elk: KernelConfig,
    pub wolf: KernelConfig,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self {
            input: None,
            n_points: 200,
            normalize: Normalize::Positive,
            sd_convention: "population".into(),
            restarts: 8,
            max_iters: 400,
            elk: KernelConfig::matern(),
            wolf: KernelConfig::default(),
        }
    }
}

impl SmoothConfig {
    pub fn sd(&self) -> Result<SdConvention> {
        match self.sd_convention.as_str() {
            "population" => Ok(SdConvention::Population),
            "sample" => Ok(SdConvention::Sample),
            s => bail!("unknown sd_convention '{s}' (population or sample)"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscoverConfig {
    /// Smoothed CSV (`t,mean_e,...`) or states CSV (`t,e,w`).
    pub input: Option<PathBuf>,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub n_models: Vec<usize>,
    pub fractions: Vec<f64>,
    pub library_drops: usize,
    pub inclusion_threshold: f64,
    pub normalize_columns: bool,
    /// `least_squares` or `ridge`.
    pub refit: String,
}

impl Default for DiscoverConfig {
    fn default() -> Self {
        let g = HyperGrid::published();
        Self {
            input: None,
            alphas: g.alphas,
            lambdas: g.lambdas,
            n_models: g.n_models,
            fractions: g.fractions,
            library_drops: 2,
            inclusion_threshold: 0.5,
            normalize_columns: false,
            refit: "least_squares".into(),
        }
    }
}

impl DiscoverConfig {
    pub fn grid(&self) -> HyperGrid {
        HyperGrid {
            alphas: self.alphas.clone(),
            lambdas: self.lambdas.clone(),
            n_models: self.n_models.clone(),
            fractions: self.fractions.clone(),
        }
    }

    pub fn stlsq(&self) -> Result<StlsqOptions> {
        let refit = match self.refit.as_str() {
            "least_squares" => Refit::LeastSquares,
            "ridge" => Refit::Ridge,
            s => bail!("unknown refit '{s}' (least_squares or ridge)"),
        };
        Ok(StlsqOptions { normalize_columns: self.normalize_columns, refit, ..StlsqOptions::default() })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub criterion: String,
    /// `trajectory` or `derivative`.
    pub sse: String,
    pub data: Option<PathBuf>,
    pub models: Option<PathBuf>,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self { criterion: "aic".into(), sse: "trajectory".into(), data: None, models: None }
    }
}

impl SelectConfig {
    pub fn criterion(&self) -> Result<Criterion> {
        Ok(self.criterion.parse()?)
    }

    pub fn mode(&self) -> Result<SseMode> {
        match self.sse.as_str() {
            "trajectory" => Ok(SseMode::Trajectory),
            "derivative" => Ok(SseMode::Derivative),
            s => bail!("unknown sse mode '{s}' (trajectory or derivative)"),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Model CSV to simulate instead of the ParamSet.
    pub model: Option<PathBuf>,
    pub e0: Option<f64>,
    pub w0: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { model: None, e0: None, w0: None, t_start: 0.0, t_end: 28.0, n_points: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// The rounded published coefficients.
    Table1,
    /// Rounded coefficients with b3 refit to the published a1 thresholds.
    Thresholds,
    /// Whatever the top-level `params` resolves to.
    Params,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Parameter baseline for continuation, codim-2 curves and scans.
    pub baseline: Baseline,
    pub equilibria: bool,
    pub continuation: Vec<ContinueTarget>,
    pub codim2: Vec<Codim2Target>,
    /// Parameter names for coexistence scans; `"all"` expands to all 14.
    pub scan: Vec<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { baseline: Baseline::Thresholds, equilibria: true, continuation: vec![], codim2: vec![], scan: vec![] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinueTarget {
    pub param: String,
    pub range: [f64; 2],
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codim2Target {
    /// (x, y); seeds come from a one-parameter run in x.
    pub params: [String; 2],
    pub ranges: [[f64; 2]; 2],
    pub seed_range: [f64; 2],
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
    #[serde(default = "both_curves")]
    pub curves: Vec<String>,
}

fn both_curves() -> Vec<String> {
    vec!["sn".into(), "hopf".into()]
}

/// Parse `value` as a TOML value, falling back to a bare string.
fn toml_value(value: &str) -> toml::Value {
    match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| anyhow!("empty override key"))?;
    let mut t = table;
    for p in parts {
        let entry = t.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        t = entry.as_table_mut().ok_or_else(|| anyhow!("override '{key}': '{p}' is not a table"))?;
    }
    t.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Load a config file (or defaults), apply `key=value` overrides, validate.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                text.parse::<toml::Table>().with_context(|| format!("parsing config {}", p.display()))?
            }
            None => toml::Table::new(),
        };
        for (k, v) in overrides {
            set_path(&mut table, k, toml_value(v))?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().context("invalid configuration")?;
        // relative paths in a config file are taken from its directory
        let cfg = match path.and_then(|p| p.parent()) {
            Some(dir) => cfg.rebased(dir),
            None => cfg,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn rebased(mut self, dir: &Path) -> Self {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(x) = p.as_mut() {
                if x.is_relative() {
                    *x = dir.join(&*x);
                }
            }
        };
        fix(&mut self.input);
        fix(&mut self.params);
        fix(&mut self.smooth.input);
        fix(&mut self.discover.input);
        fix(&mut self.select.data);
        fix(&mut self.select.models);
        fix(&mut self.simulate.model);
        if self.out.is_relative() {
            self.out = dir.join(&self.out);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let paths = [
            ("input", &self.input),
            ("params", &self.params),
            ("smooth.input", &self.smooth.input),
            ("discover.input", &self.discover.input),
            ("select.data", &self.select.data),
            ("select.models", &self.select.models),
            ("simulate.model", &self.simulate.model),
        ];
        for (key, p) in paths {
            if let Some(p) = p {
                if !p.exists() {
                    bail!("{key}: {} does not exist", p.display());
                }
            }
        }
        let g = self.discover.grid();
        if g.alphas.is_empty() || g.lambdas.is_empty() || g.n_models.is_empty() || g.fractions.is_empty() {
            bail!("discover: every grid axis needs at least one value");
        }
        self.discover.stlsq()?;
        self.select.criterion()?;
        self.select.mode()?;
        self.smooth.sd()?;
        self.smooth.elk.spec().context("smooth.elk")?;
        self.smooth.wolf.spec().context("smooth.wolf")?;
        if self.smooth.restarts == 0 {
            bail!("smooth.restarts must be at least 1");
        }
        for t in &self.analysis.continuation {
            t.param.parse::<ParamId>()?;
            check_range(&t.param, t.range)?;
            check_set(&t.set)?;
        }
        for t in &self.analysis.codim2 {
            t.params[0].parse::<ParamId>()?;
            t.params[1].parse::<ParamId>()?;
            if t.params[0] == t.params[1] {
                bail!("codim2: the two parameters must differ");
            }
            check_range(&t.params[0], t.ranges[0])?;
            check_range(&t.params[1], t.ranges[1])?;
            check_range(&t.params[0], t.seed_range)?;
            check_set(&t.set)?;
            for c in &t.curves {
                if c != "sn" && c != "hopf" {
                    bail!("codim2: unknown curve '{c}' (sn or hopf)");
                }
            }
        }
        for s in &self.analysis.scan {
            if s != "all" {
                s.parse::<ParamId>()?;
            }
        }
        Ok(())
    }

    pub fn require_seed(&self, stage: &str) -> Result<u64> {
        self.seed.ok_or_else(|| anyhow!("{stage} is stochastic and needs a seed (--seed or `seed = ...`)"))
    }

    pub fn base_params(&self) -> Result<ParamSet> {
        match &self.params {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(ParamSet::parse(&text)?)
            }
            None => Ok(ParamSet::default()),
        }
    }

    pub fn analysis_params(&self, set: &BTreeMap<String, f64>) -> Result<ParamSet> {
        let mut p = match self.analysis.baseline {
            Baseline::Table1 => ParamSet::default(),
            Baseline::Thresholds => ParamSet::bifurcation_baseline(),
            Baseline::Params => self.base_params()?,
        };
        for (k, v) in set {
            p.set(k.parse()?, *v);
        }
        Ok(p)
    }

    pub fn synth_start(&self) -> State {
        State::new(self.synth.e0, self.synth.w0)
    }
}

fn check_range(name: &str, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
        bail!("range for {name} must be finite with low ≤ high, got {r:?}");
    }
    Ok(())
}

fn check_set(set: &BTreeMap<String, f64>) -> Result<()> {
    for k in set.keys() {
        k.parse::<ParamId>()?;
    }
    Ok(())
}

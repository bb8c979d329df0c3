//! Gaussian process regression with RBF and Matérn kernels, zero prior mean
//! and multi-restart maximization of the log marginal likelihood.

use argmin::core::{CostFunction, Executor, State as _};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynsys::linspace;
use crate::error::{Error, Result};

/// Matérn smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternNu {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl MaternNu {
    pub fn from_value(nu: f64) -> Result<Self> {
        match nu {
            x if x == 0.5 => Ok(Self::Half),
            x if x == 1.5 => Ok(Self::ThreeHalves),
            x if x == 2.5 => Ok(Self::FiveHalves),
            _ => Err(Error::InvalidInput(format!("Matérn nu = {nu} is not one of 0.5, 1.5, 2.5"))),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Half => 0.5,
            Self::ThreeHalves => 1.5,
            Self::FiveHalves => 2.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Rbf,
    Matern(MaternNu),
}

impl KernelKind {
    pub fn name(self) -> String {
        match self {
            KernelKind::Rbf => "rbf".into(),
            KernelKind::Matern(nu) => format!("matern{}", nu.value()),
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rbf" => Ok(KernelKind::Rbf),
            "matern" | "matern2.5" | "matern52" => Ok(KernelKind::Matern(MaternNu::FiveHalves)),
            "matern1.5" | "matern32" => Ok(KernelKind::Matern(MaternNu::ThreeHalves)),
            "matern0.5" | "matern12" => Ok(KernelKind::Matern(MaternNu::Half)),
            other => Err(Error::InvalidInput(format!("unknown kernel '{other}'"))),
        }
    }
}

/// Kernel family plus hyperparameters. The values are starting points for
/// [`fit`] and the bounds confine its search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub length_scale: f64,
    pub length_scale_bounds: (f64, f64),
    pub signal_variance: f64,
    pub signal_variance_bounds: (f64, f64),
    pub optimize_signal_variance: bool,
    pub noise_variance: f64,
    pub noise_variance_bounds: (f64, f64),
}

impl KernelSpec {
    pub fn new(kind: KernelKind) -> Self {
        Self {
            kind,
            length_scale: 10.0,
            length_scale_bounds: (5.0, 100.0),
            signal_variance: 1.0,
            signal_variance_bounds: (1e-2, 1e2),
            optimize_signal_variance: true,
            noise_variance: 1e-2,
            noise_variance_bounds: (1e-6, 1.0),
        }
    }

    pub fn rbf() -> Self {
        Self::new(KernelKind::Rbf)
    }

    pub fn matern52() -> Self {
        Self::new(KernelKind::Matern(MaternNu::FiveHalves))
    }

    pub fn validate(&self) -> Result<()> {
        let in_bounds = |v: f64, (lo, hi): (f64, f64)| lo > 0.0 && lo <= hi && v >= lo && v <= hi;
        if !in_bounds(self.length_scale, self.length_scale_bounds) {
            return Err(Error::InvalidInput("length scale outside its bounds".into()));
        }
        if !(self.signal_variance >= 0.0) || !(self.noise_variance >= 0.0) {
            return Err(Error::InvalidInput("variances must be non-negative".into()));
        }
        Ok(())
    }

    /// Covariance between inputs at distance `r`.
    pub fn correlation(&self, r: f64) -> f64 {
        let l = self.length_scale;
        let sv = self.signal_variance;
        match self.kind {
            KernelKind::Rbf => sv * (-r * r / (2.0 * l * l)).exp(),
            KernelKind::Matern(MaternNu::Half) => sv * (-r / l).exp(),
            KernelKind::Matern(MaternNu::ThreeHalves) => {
                let a = 3f64.sqrt() * r / l;
                sv * (1.0 + a) * (-a).exp()
            }
            KernelKind::Matern(MaternNu::FiveHalves) => {
                let a = 5f64.sqrt() * r / l;
                sv * (1.0 + a + a * a / 3.0) * (-a).exp()
            }
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, t1: f64, t2: f64) -> f64 {
    spec.correlation((t1 - t2).abs())
}

pub fn gram(spec: &KernelSpec, a: &[f64], b: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| kernel_eval(spec, a[i], b[j]))
}

/// Diagonal jitter levels tried, in order, when K + σ²I fails to factor.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Cholesky factor of K + (σ² + jitter)I together with the jitter that worked.
fn factor(spec: &KernelSpec, times: &[f64]) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let mut k = gram(spec, times, times);
    for i in 0..times.len() {
        k[(i, i)] += spec.noise_variance;
    }
    for &jit in &JITTER_LADDER {
        let mut kj = k.clone();
        for i in 0..times.len() {
            kj[(i, i)] += jit;
        }
        if let Some(c) = Cholesky::new(kj) {
            return Ok((c, jit));
        }
    }
    Err(Error::NotPositiveDefinite { jitter: *JITTER_LADDER.last().unwrap() })
}

/// A GP conditioned on training data.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    pub train_times: Vec<f64>,
    pub train_values: Vec<f64>,
    pub kernel: KernelSpec,
    pub jitter: f64,
    pub log_marginal_likelihood: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

fn check_training(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() < 2 || times.len() != values.len() {
        return Err(Error::InvalidInput("need ≥ 2 training points with matching values".into()));
    }
    let mut s = times.to_vec();
    s.sort_by(f64::total_cmp);
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("training times must be distinct".into()));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("training data must be finite".into()));
    }
    Ok(())
}

/// Condition on data at fixed hyperparameters.
pub fn condition(spec: &KernelSpec, times: &[f64], values: &[f64]) -> Result<GpPosterior> {
    check_training(times, values)?;
    let (chol, jitter) = factor(spec, times)?;
    let y = DVector::from_column_slice(values);
    let alpha = chol.solve(&y);
    let n = times.len() as f64;
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    let lml = -0.5 * y.dot(&alpha) - log_det_half - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
    Ok(GpPosterior {
        train_times: times.to_vec(),
        train_values: values.to_vec(),
        kernel: *spec,
        jitter,
        log_marginal_likelihood: lml,
        chol,
        alpha,
    })
}

/// Log marginal likelihood through an explicit determinant and inverse.
/// Meant as an independent check on small problems.
pub fn log_marginal_likelihood_direct(spec: &KernelSpec, times: &[f64], values: &[f64]) -> Result<f64> {
    check_training(times, values)?;
    let mut k = gram(spec, times, times);
    for i in 0..times.len() {
        k[(i, i)] += spec.noise_variance;
    }
    let det = k.determinant();
    let inv = k
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite { jitter: 0.0 })?;
    if !(det > 0.0) {
        return Err(Error::NotPositiveDefinite { jitter: 0.0 });
    }
    let y = DVector::from_column_slice(values);
    let n = times.len() as f64;
    Ok(-0.5 * (y.transpose() * inv * &y)[(0, 0)] - 0.5 * det.ln() - 0.5 * n * (2.0 * std::f64::consts::PI).ln())
}

impl GpPosterior {
    /// Predictive mean and latent-function variance at `query` times.
    pub fn predict(&self, query: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ks = gram(&self.kernel, query, &self.train_times);
        let mean = &ks * &self.alpha;
        let l = self.chol.l();
        let mut var = Vec::with_capacity(query.len());
        for (i, _) in query.iter().enumerate() {
            let kcol = ks.row(i).transpose();
            let v = l
                .solve_lower_triangular(&kcol)
                .expect("Cholesky factor has a positive diagonal");
            let s = self.kernel.signal_variance - v.norm_squared();
            if s < -1e-8 {
                log::warn!("negative predictive variance {s:e} clamped to 0");
            }
            var.push(s.max(0.0));
        }
        (mean.iter().copied().collect(), var)
    }
}

/// Predictive mean and variance on an even grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

impl Resampled {
    /// Pointwise 95% band: mean ± 1.96 sd.
    pub fn band(&self) -> (Vec<f64>, Vec<f64>) {
        self.mean
            .iter()
            .zip(&self.variance)
            .map(|(m, v)| (m - 1.96 * v.sqrt(), m + 1.96 * v.sqrt()))
            .unzip()
    }
}

pub fn resample(gp: &GpPosterior, n: usize, t_span: (f64, f64)) -> Result<Resampled> {
    if n < 2 {
        return Err(Error::InvalidInput("resampling needs n ≥ 2".into()));
    }
    let times = linspace(t_span.0, t_span.1, n);
    let (mean, variance) = gp.predict(&times);
    Ok(Resampled { times, mean, variance })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Number of optimizer starts. Start 0 uses the kernel's configured values, the
    /// rest are log-uniform draws within the bounds.
    pub n_restarts: usize,
    pub seed: u64,
    pub max_iters: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { n_restarts: 500, seed: 0, max_iters: 400 }
    }
}

/// Which hyperparameters are searched and how they map to log space.
struct Layout {
    base: KernelSpec,
}

impl Layout {
    fn bounds(&self) -> Vec<(f64, f64)> {
        let s = &self.base;
        let mut b = vec![s.length_scale_bounds, s.noise_variance_bounds];
        if s.optimize_signal_variance {
            b.push(s.signal_variance_bounds);
        }
        b.into_iter().map(|(lo, hi)| (lo.ln(), hi.ln())).collect()
    }

    fn start(&self) -> Vec<f64> {
        let s = &self.base;
        let mut x = vec![s.length_scale.ln(), s.noise_variance.max(s.noise_variance_bounds.0).ln()];
        if s.optimize_signal_variance {
            x.push(s.signal_variance.max(s.signal_variance_bounds.0).ln());
        }
        clamp(&x, &self.bounds())
    }

    fn spec(&self, x: &[f64]) -> KernelSpec {
        let mut s = self.base;
        s.length_scale = x[0].exp();
        s.noise_variance = x[1].exp();
        if s.optimize_signal_variance {
            s.signal_variance = x[2].exp();
        }
        s
    }
}

fn clamp(x: &[f64], b: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(b).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect()
}

struct NegLml<'a> {
    layout: &'a Layout,
    bounds: Vec<(f64, f64)>,
    times: &'a [f64],
    values: &'a [f64],
}

impl CostFunction for NegLml<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let xc = clamp(x, &self.bounds);
        let outside: f64 = x.iter().zip(&xc).map(|(a, b)| (a - b) * (a - b)).sum();
        let v = match condition(&self.layout.spec(&xc), self.times, self.values) {
            Ok(gp) => -gp.log_marginal_likelihood,
            Err(_) => 1e300,
        };
        Ok(v + 1e3 * outside)
    }
}

fn local_search(problem: NegLml<'_>, x0: Vec<f64>, max_iters: u64) -> (Vec<f64>, f64) {
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        // step inward so the simplex starts inside the box
        v[i] += if v[i] + 0.5 <= problem.bounds[i].1 { 0.5 } else { -0.5 };
        simplex.push(v);
    }
    let bounds = problem.bounds.clone();
    let fallback = problem.cost(&x0).unwrap_or(f64::INFINITY);
    let solver = match NelderMead::new(simplex).with_sd_tolerance(1e-10) {
        Ok(s) => s,
        Err(_) => return (x0, fallback),
    };
    match Executor::new(problem, solver).configure(|st| st.max_iters(max_iters)).run() {
        Ok(res) => {
            let st = res.state();
            match st.get_best_param() {
                Some(p) => (clamp(p, &bounds), st.get_best_cost()),
                None => (x0, fallback),
            }
        }
        Err(_) => (x0, fallback),
    }
}

/// Maximize the log marginal likelihood over the free hyperparameters and
/// condition on the data at the best one. Restarts run in parallel; the
/// winner is the highest likelihood with ties going to the lowest index.
pub fn fit(spec: &KernelSpec, times: &[f64], values: &[f64], opts: &FitOptions) -> Result<GpPosterior> {
    spec.validate()?;
    check_training(times, values)?;
    if opts.n_restarts == 0 {
        return condition(spec, times, values);
    }
    let layout = Layout { base: *spec };
    let bounds = layout.bounds();
    let results: Vec<(usize, Vec<f64>, f64)> = (0..opts.n_restarts)
        .into_par_iter()
        .map(|i| {
            let x0 = if i == 0 {
                layout.start()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(i as u64);
                bounds.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect()
            };
            let problem = NegLml { layout: &layout, bounds: bounds.clone(), times, values };
            let (x, _) = local_search(problem, x0, opts.max_iters);
            // re-evaluate at the clamped optimum so ranking uses the true likelihood
            let lml = condition(&layout.spec(&x), times, values)
                .map(|g| g.log_marginal_likelihood)
                .unwrap_or(f64::NEG_INFINITY);
            (i, x, lml)
        })
        .collect();
    let mut best: Option<&(usize, Vec<f64>, f64)> = None;
    for r in &results {
        match best {
            None => best = Some(r),
            Some(b) if r.2 > b.2 || (r.2 == b.2 && r.0 < b.0) => best = Some(r),
            _ => {}
        }
    }
    let (_, x, _) = best.expect("at least one restart");
    condition(&layout.spec(x), times, values)
}

/// One draw of the GP prior plus its noise at `times`.
pub fn draw_prior(spec: &KernelSpec, times: &[f64], seed: u64) -> Result<Vec<f64>> {
    let (chol, _) = factor(spec, times)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = DVector::from_fn(times.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok((chol.l() * z).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matern_at_one_length_scale() {
        let s = KernelSpec::matern52();
        let v = kernel_eval(&s, 0.0, s.length_scale);
        let exact = (1.0 + 5f64.sqrt() + 5.0 / 3.0) * (-(5f64.sqrt())).exp();
        assert!((v - 0.52400).abs() < 1e-4 && (v - exact).abs() < 1e-15);
    }

    #[test]
    fn rbf_at_zero_is_signal_variance() {
        let mut s = KernelSpec::rbf();
        s.signal_variance = 2.5;
        assert_eq!(kernel_eval(&s, 3.0, 3.0), 2.5);
    }

    #[test]
    fn lower_order_matern_values() {
        let mut s = KernelSpec::new(KernelKind::Matern(MaternNu::Half));
        assert!((kernel_eval(&s, 0.0, 10.0) - (-1f64).exp()).abs() < 1e-15);
        s.kind = KernelKind::Matern(MaternNu::ThreeHalves);
        let a = 3f64.sqrt();
        assert!((kernel_eval(&s, 0.0, 10.0) - (1.0 + a) * (-a).exp()).abs() < 1e-15);
    }

    #[test]
    fn two_point_posterior_mean_by_hand() {
        let mut s = KernelSpec::rbf();
        s.noise_variance = 0.1;
        let t = [0.0, 4.0];
        let y = [1.0, -0.5];
        let gp = condition(&s, &t, &y).unwrap();
        let k12 = kernel_eval(&s, 0.0, 4.0);
        let (a, b, c) = (1.0 + 0.1, k12, 1.0 + 0.1);
        let det = a * c - b * b;
        let alpha = [(c * y[0] - b * y[1]) / det, (a * y[1] - b * y[0]) / det];
        let q = 2.0;
        let m = kernel_eval(&s, q, 0.0) * alpha[0] + kernel_eval(&s, q, 4.0) * alpha[1];
        let (mean, _) = gp.predict(&[q]);
        assert!((mean[0] - m).abs() < 1e-10);
    }

    #[test]
    fn far_query_reverts_to_prior() {
        let s = KernelSpec::rbf();
        let gp = condition(&s, &[0.0, 1.0, 2.0], &[1.0, 2.0, 1.5]).unwrap();
        let (m, v) = gp.predict(&[1e4]);
        assert!(m[0].abs() < 1e-12);
        assert!((v[0] - s.signal_variance).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_training_data() {
        let s = KernelSpec::rbf();
        assert!(condition(&s, &[1.0], &[1.0]).is_err());
        assert!(condition(&s, &[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn jitter_rescues_duplicate_free_but_singular_gram() {
        let mut s = KernelSpec::rbf();
        s.length_scale = 100.0;
        s.length_scale_bounds = (5.0, 100.0);
        s.noise_variance = 0.0;
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 1e-3).collect();
        let y = vec![1.0; 20];
        let gp = condition(&s, &t, &y).unwrap();
        assert!(gp.jitter > 0.0 && gp.jitter <= 1e-6);
    }
}

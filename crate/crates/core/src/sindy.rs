//! Sparse regression of planar polynomial dynamics: finite-difference
//! derivatives, sequentially thresholded ridge regression, and an ensemble
//! that subsamples rows and drops library columns per member.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynsys::{CubicField, State, EXPONENTS};
use crate::error::{Error, Result};

/// Monomials in (e, w) up to a total degree, ordered by degree and then by
/// descending power of e.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLibrary {
    pub names: Vec<String>,
    pub exponents: Vec<(u32, u32)>,
    pub degree: u32,
}

fn monomial_name(p: u32, q: u32) -> String {
    let part = |s: &str, k: u32| match k {
        0 => None,
        1 => Some(s.to_string()),
        _ => Some(format!("{s}^{k}")),
    };
    match (part("e", p), part("w", q)) {
        (None, None) => "1".into(),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => format!("{a} {b}"),
    }
}

impl CandidateLibrary {
    pub fn polynomial(degree: u32) -> Self {
        let mut exponents = Vec::new();
        for d in 0..=degree {
            for p in (0..=d).rev() {
                exponents.push((p, d - p));
            }
        }
        let names = exponents.iter().map(|&(p, q)| monomial_name(p, q)).collect();
        Self { names, exponents, degree }
    }

    /// The ten-column cubic library.
    pub fn cubic() -> Self {
        Self::polynomial(3)
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn row(&self, s: State) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|&(p, q)| s.e.powi(p as i32) * s.w.powi(q as i32))
            .collect()
    }

    /// Feature matrix with one row per state.
    pub fn matrix(&self, states: &[State]) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(states.len(), m, |i, j| {
            let (p, q) = self.exponents[j];
            states[i].e.powi(p as i32) * states[i].w.powi(q as i32)
        })
    }
}

/// Second-order finite differences: central inside, one-sided three-point
/// stencils at the ends. `times` must be evenly spaced.
pub fn differentiate(times: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 || times.len() != n {
        return Err(Error::InvalidInput("differentiation needs ≥ 3 samples with matching times".into()));
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("times must increase".into()));
    }
    for (i, t) in times.iter().enumerate() {
        let expected = times[0] + i as f64 * dt;
        if (t - expected).abs() > 1e-9 * dt.max(expected.abs()) {
            return Err(Error::InvalidInput(format!("sample {i} is not on the uniform grid")));
        }
    }
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
    for i in 1..n - 1 {
        d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    }
    d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
    Ok(d)
}

/// Columnwise [`differentiate`] of a planar trajectory.
pub fn differentiate_states(times: &[f64], states: &[State]) -> Result<Vec<[f64; 2]>> {
    let e: Vec<f64> = states.iter().map(|s| s.e).collect();
    let w: Vec<f64> = states.iter().map(|s| s.w).collect();
    let de = differentiate(times, &e)?;
    let dw = differentiate(times, &w)?;
    Ok(de.into_iter().zip(dw).map(|(a, b)| [a, b]).collect())
}

/// Penalty used for the last solve on the surviving support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refit {
    /// Ordinary least squares.
    #[default]
    LeastSquares,
    /// Ridge with the same α as the thresholding iterations.
    Ridge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlsqOptions {
    pub max_iter: usize,
    /// Scale feature columns to unit norm inside each ridge solve.
    pub normalize_columns: bool,
    pub refit: Refit,
}

impl Default for StlsqOptions {
    fn default() -> Self {
        Self { max_iter: 25, normalize_columns: false, refit: Refit::LeastSquares }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StlsqFit {
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    /// The support stopped changing before `max_iter`.
    pub converged: bool,
    /// Every term was thresholded out.
    pub empty: bool,
}

impl StlsqFit {
    pub fn support(&self) -> Vec<bool> {
        self.coeffs.iter().map(|c| *c != 0.0).collect()
    }
}

/// argmin ‖y − Aξ‖² + α‖ξ‖² through the SVD of A.
fn ridge(a: &DMatrix<f64>, y: &DVector<f64>, alpha: f64, normalize: bool) -> DVector<f64> {
    let m = a.ncols();
    if m == 0 {
        return DVector::zeros(0);
    }
    let norms: Vec<f64> = if normalize {
        (0..m).map(|j| a.column(j).norm()).map(|n| if n > 0.0 { n } else { 1.0 }).collect()
    } else {
        vec![1.0; m]
    };
    let mut a = a.clone();
    for (j, n) in norms.iter().enumerate() {
        a.column_mut(j).unscale_mut(*n);
    }
    let rows = a.nrows();
    let svd = a.svd(true, true);
    let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let s = &svd.singular_values;
    let smax = s.max();
    let cut = smax * f64::EPSILON * rows.max(m) as f64;
    let uty = u.transpose() * y;
    let mut z = DVector::zeros(s.len());
    for i in 0..s.len() {
        let f = if alpha > 0.0 {
            s[i] / (s[i] * s[i] + alpha)
        } else if s[i] > cut {
            1.0 / s[i]
        } else {
            0.0
        };
        z[i] = f * uty[i];
    }
    let mut x = vt.transpose() * z;
    for (j, n) in norms.iter().enumerate() {
        x[j] /= n;
    }
    x
}

fn solve_on(theta: &DMatrix<f64>, y: &DVector<f64>, active: &[bool], alpha: f64, normalize: bool) -> Vec<f64> {
    let idx: Vec<usize> = (0..active.len()).filter(|j| active[*j]).collect();
    let sub = theta.select_columns(&idx);
    let x = ridge(&sub, y, alpha, normalize);
    let mut out = vec![0.0; active.len()];
    for (k, j) in idx.iter().enumerate() {
        out[*j] = x[k];
    }
    out
}

/// Sequentially thresholded ridge regression over all columns of `theta`.
pub fn stlsq(theta: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, alpha: f64, opts: &StlsqOptions) -> Result<StlsqFit> {
    stlsq_masked(theta, y, lambda, alpha, &vec![true; theta.ncols()], opts)
}

/// [`stlsq`] restricted to the columns flagged in `allowed`.
pub fn stlsq_masked(
    theta: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    alpha: f64,
    allowed: &[bool],
    opts: &StlsqOptions,
) -> Result<StlsqFit> {
    if theta.nrows() != y.len() || theta.ncols() == 0 || allowed.len() != theta.ncols() {
        return Err(Error::InvalidInput("feature matrix, targets and mask disagree in size".into()));
    }
    if !(alpha >= 0.0) || !(lambda > 0.0) {
        return Err(Error::InvalidInput("need α ≥ 0 and λ > 0".into()));
    }
    let mut active = allowed.to_vec();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter && active.iter().any(|a| *a) {
        iterations += 1;
        let c = solve_on(theta, y, &active, alpha, opts.normalize_columns);
        let next: Vec<bool> = active.iter().zip(&c).map(|(a, v)| *a && v.abs() >= lambda).collect();
        if next == active {
            converged = true;
            break;
        }
        active = next;
    }
    let refit_alpha = match opts.refit {
        Refit::LeastSquares => 0.0,
        Refit::Ridge => alpha,
    };
    // the refit can push a survivor below λ; prune until nothing changes
    let mut coeffs = vec![0.0; active.len()];
    while active.iter().any(|a| *a) {
        coeffs = solve_on(theta, y, &active, refit_alpha, opts.normalize_columns);
        let next: Vec<bool> = active.iter().zip(&coeffs).map(|(a, v)| *a && v.abs() >= lambda).collect();
        if next == active {
            break;
        }
        active = next;
        coeffs = vec![0.0; active.len()];
    }
    let empty = coeffs.iter().all(|c| *c == 0.0);
    if empty {
        converged = true;
    }
    Ok(StlsqFit { coeffs, iterations, converged, empty })
}

/// Ensemble and thresholding hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub alpha: f64,
    pub lambda: f64,
    pub n_models: usize,
    pub subsample_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub hyper: Hyper,
    pub n_library_drops: usize,
    pub inclusion_threshold: f64,
    pub seed: u64,
    pub stlsq: StlsqOptions,
}

impl EnsembleConfig {
    pub fn new(alpha: f64, lambda: f64, n_models: usize, subsample_fraction: f64, seed: u64) -> Self {
        Self {
            hyper: Hyper { alpha, lambda, n_models, subsample_fraction },
            n_library_drops: 2,
            inclusion_threshold: 0.5,
            seed,
            stlsq: StlsqOptions::default(),
        }
    }

    pub fn validate(&self, n_terms: usize) -> Result<()> {
        let h = &self.hyper;
        if !(h.alpha >= 0.0) || !(h.lambda > 0.0) || h.n_models == 0 {
            return Err(Error::InvalidInput("need α ≥ 0, λ > 0 and at least one member".into()));
        }
        if !(h.subsample_fraction > 0.0 && h.subsample_fraction <= 1.0) {
            return Err(Error::InvalidInput("subsample fraction must lie in (0, 1]".into()));
        }
        if self.n_library_drops >= n_terms {
            return Err(Error::InvalidInput("cannot drop every library column".into()));
        }
        Ok(())
    }
}

/// A discovered model: two coefficient rows (de/dt, dw/dt) over a library.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseModel {
    pub library: CandidateLibrary,
    pub coeffs: [Vec<f64>; 2],
    /// Per-term median of the ensemble members, absent terms counting as 0.
    pub median_coeffs: [Vec<f64>; 2],
    /// Fraction of members that kept each term.
    pub inclusion: [Vec<f64>; 2],
    pub hyper: Hyper,
    /// Squared error of the fitted derivatives on the training data.
    pub sse: f64,
}

impl SparseModel {
    pub fn support(&self) -> [Vec<bool>; 2] {
        [
            self.coeffs[0].iter().map(|c| *c != 0.0).collect(),
            self.coeffs[1].iter().map(|c| *c != 0.0).collect(),
        ]
    }

    /// Nonzero terms over both equations.
    pub fn k(&self) -> usize {
        self.coeffs.iter().flatten().filter(|c| **c != 0.0).count()
    }

    /// The model as a cubic vector field. Fails for libraries above degree 3.
    pub fn to_field(&self) -> Result<CubicField> {
        let mut c = [[0.0; 10]; 2];
        for (j, ex) in self.library.exponents.iter().enumerate() {
            let slot = EXPONENTS
                .iter()
                .position(|x| x == ex)
                .ok_or_else(|| Error::InvalidInput(format!("term {} is above cubic", self.library.names[j])))?;
            c[0][slot] = self.coeffs[0][j];
            c[1][slot] = self.coeffs[1][j];
        }
        Ok(CubicField::new(c))
    }

    /// A model with given coefficients and no ensemble diagnostics.
    pub fn from_coeffs(library: CandidateLibrary, coeffs: [Vec<f64>; 2], hyper: Hyper) -> Self {
        let inclusion = [
            coeffs[0].iter().map(|c| if *c != 0.0 { 1.0 } else { 0.0 }).collect(),
            coeffs[1].iter().map(|c| if *c != 0.0 { 1.0 } else { 0.0 }).collect(),
        ];
        Self { library, median_coeffs: coeffs.clone(), coeffs, inclusion, hyper, sse: 0.0 }
    }

    fn same_as(&self, other: &SparseModel, tol: f64) -> bool {
        self.support() == other.support()
            && self.coeffs.iter().flatten().zip(other.coeffs.iter().flatten()).all(|(a, b)| (a - b).abs() <= tol)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-term medians and inclusion frequencies of member coefficient rows.
/// Independent of member order.
pub fn aggregate(members: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = members.first().map_or(0, Vec::len);
    let n = members.len() as f64;
    let mut med = vec![0.0; m];
    let mut inc = vec![0.0; m];
    for j in 0..m {
        let mut col: Vec<f64> = members.iter().map(|r| r[j]).collect();
        inc[j] = col.iter().filter(|c| **c != 0.0).count() as f64 / n;
        med[j] = median(&mut col);
    }
    (med, inc)
}

fn targets(xdot: &[[f64; 2]]) -> [DVector<f64>; 2] {
    [
        DVector::from_iterator(xdot.len(), xdot.iter().map(|d| d[0])),
        DVector::from_iterator(xdot.len(), xdot.iter().map(|d| d[1])),
    ]
}

fn derivative_sse(theta: &DMatrix<f64>, y: &[DVector<f64>; 2], coeffs: &[Vec<f64>; 2]) -> f64 {
    (0..2)
        .map(|r| {
            let c = DVector::from_column_slice(&coeffs[r]);
            (theta * c - &y[r]).norm_squared()
        })
        .sum()
}

/// Ensemble STLSQ. Each member drops `n_library_drops` random columns and
/// keeps a random `subsample_fraction` of the rows; terms kept by at least
/// `inclusion_threshold` of the members are refit on the full data.
pub fn ensemble_fit(
    library: &CandidateLibrary,
    states: &[State],
    xdot: &[[f64; 2]],
    config: &EnsembleConfig,
) -> Result<SparseModel> {
    config.validate(library.len())?;
    if states.len() != xdot.len() || states.is_empty() {
        return Err(Error::InvalidInput("states and derivatives differ in length".into()));
    }
    let theta = library.matrix(states);
    let y = targets(xdot);
    let (n, m) = (theta.nrows(), theta.ncols());
    let h = config.hyper;
    let n_rows = ((h.subsample_fraction * n as f64).round() as usize).clamp(1, n);

    let members: Vec<Result<[Vec<f64>; 2]>> = (0..h.n_models)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            let mut allowed = vec![true; m];
            for j in sample(&mut rng, m, config.n_library_drops) {
                allowed[j] = false;
            }
            let rows: Vec<usize> = if n_rows == n {
                (0..n).collect()
            } else {
                let mut r = sample(&mut rng, n, n_rows).into_vec();
                r.sort_unstable();
                r
            };
            let sub = theta.select_rows(&rows);
            let mut out = [vec![0.0; m], vec![0.0; m]];
            for (t, o) in out.iter_mut().enumerate() {
                let yt = DVector::from_iterator(rows.len(), rows.iter().map(|i| y[t][*i]));
                *o = stlsq_masked(&sub, &yt, h.lambda, h.alpha, &allowed, &config.stlsq)?.coeffs;
            }
            Ok(out)
        })
        .collect();
    let members: Vec<[Vec<f64>; 2]> = members.into_iter().collect::<Result<_>>()?;

    let mut coeffs = [vec![0.0; m], vec![0.0; m]];
    let mut median_coeffs = [vec![], vec![]];
    let mut inclusion = [vec![], vec![]];
    for t in 0..2 {
        let rows: Vec<Vec<f64>> = members.iter().map(|mm| mm[t].clone()).collect();
        let (med, inc) = aggregate(&rows);
        let support: Vec<bool> = inc.iter().map(|p| *p >= config.inclusion_threshold).collect();
        if support.iter().any(|s| *s) {
            coeffs[t] = stlsq_masked(&theta, &y[t], h.lambda, h.alpha, &support, &config.stlsq)?.coeffs;
        }
        median_coeffs[t] = med;
        inclusion[t] = inc;
    }
    let sse = derivative_sse(&theta, &y, &coeffs);
    Ok(SparseModel { library: library.clone(), coeffs, median_coeffs, inclusion, hyper: h, sse })
}

/// Hyperparameter values whose Cartesian product forms the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperGrid {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub n_models: Vec<usize>,
    pub fractions: Vec<f64>,
}

impl HyperGrid {
    /// α ∈ {0.001, 0.01, 0.1, 1}, λ ∈ {0.01, …, 0.05}, members ∈ {20, 50, 100},
    /// fraction ∈ {0.7, 0.8, 0.9}.
    pub fn published() -> Self {
        Self {
            alphas: vec![0.001, 0.01, 0.1, 1.0],
            lambdas: vec![0.01, 0.02, 0.03, 0.04, 0.05],
            n_models: vec![20, 50, 100],
            fractions: vec![0.7, 0.8, 0.9],
        }
    }

    pub fn cells(&self) -> Vec<Hyper> {
        let mut out = Vec::new();
        for &alpha in &self.alphas {
            for &lambda in &self.lambdas {
                for &n_models in &self.n_models {
                    for &subsample_fraction in &self.fractions {
                        out.push(Hyper { alpha, lambda, n_models, subsample_fraction });
                    }
                }
            }
        }
        out
    }
}

/// One distinct model from a grid run with every cell that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridModel {
    /// 1-based, in order of first appearance.
    pub id: usize,
    pub model: SparseModel,
    pub runs: Vec<Hyper>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one grid cell, a function of the base seed and the cell's values only.
pub fn cell_seed(base: u64, h: &Hyper) -> u64 {
    [h.alpha.to_bits(), h.lambda.to_bits(), h.n_models as u64, h.subsample_fraction.to_bits()]
        .iter()
        .fold(splitmix(base), |acc, v| splitmix(acc ^ v))
}

/// Tolerance under which two grid models count as the same.
pub const DEDUP_TOL: f64 = 1e-9;

/// Run [`ensemble_fit`] on every grid cell and collapse identical models.
pub fn run_grid(
    library: &CandidateLibrary,
    states: &[State],
    xdot: &[[f64; 2]],
    grid: &HyperGrid,
    base: &EnsembleConfig,
) -> Result<Vec<GridModel>> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::InvalidInput("hyperparameter grid is empty".into()));
    }
    let fits: Vec<Result<SparseModel>> = cells
        .par_iter()
        .map(|h| {
            let cfg = EnsembleConfig { hyper: *h, seed: cell_seed(base.seed, h), ..*base };
            ensemble_fit(library, states, xdot, &cfg)
        })
        .collect();
    let mut out: Vec<GridModel> = Vec::new();
    for (h, fit) in cells.iter().zip(fits) {
        let model = fit?;
        match out.iter_mut().find(|g| g.model.same_as(&model, DEDUP_TOL)) {
            Some(g) => g.runs.push(*h),
            None => out.push(GridModel { id: out.len() + 1, model, runs: vec![*h] }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_library_names_and_origin_row() {
        let lib = CandidateLibrary::cubic();
        assert_eq!(lib.names, crate::dynsys::LIBRARY_NAMES.to_vec());
        assert_eq!(lib.exponents, EXPONENTS.to_vec());
        let r = lib.row(State::new(0.0, 0.0));
        assert_eq!(r[0], 1.0);
        assert!(r[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quadratic_derivative_is_exact() {
        let t: Vec<f64> = (0..11).map(|i| 0.3 + 0.1 * i as f64).collect();
        let x: Vec<f64> = t.iter().map(|t| t * t).collect();
        let d = differentiate(&t, &x).unwrap();
        for (ti, di) in t.iter().zip(&d) {
            assert!((di - 2.0 * ti).abs() < 1e-12, "{ti} {di}");
        }
    }

    #[test]
    fn constant_derivative_is_zero() {
        let t: Vec<f64> = (0..5).map(f64::from).collect();
        assert!(differentiate(&t, &[3.0; 5]).unwrap().iter().all(|d| *d == 0.0));
    }

    #[test]
    fn sine_derivative_error() {
        let t: Vec<f64> = (0..700).map(|i| 0.01 * i as f64).collect();
        let x: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        let d = differentiate(&t, &x).unwrap();
        let err = t.iter().zip(&d).map(|(t, d)| (d - t.cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn differentiate_rejects_bad_grids() {
        assert!(differentiate(&[0.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(differentiate(&[0.0, 1.0, 2.5, 3.0], &[0.0; 4]).is_err());
    }

    fn toy_theta() -> (DMatrix<f64>, Vec<State>) {
        let states: Vec<State> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.1;
                State::new(1.0 + 0.5 * t.sin(), 2.0 + 0.3 * (1.3 * t).cos())
            })
            .collect();
        (CandidateLibrary::cubic().matrix(&states), states)
    }

    #[test]
    fn exact_single_term_recovery() {
        let (theta, _) = toy_theta();
        let y = theta.column(1) * 2.0;
        let fit = stlsq(&theta, &y, 0.05, 0.0, &StlsqOptions::default()).unwrap();
        let mut want = vec![0.0; 10];
        want[1] = 2.0;
        for (a, b) in fit.coeffs.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{:?}", fit.coeffs);
        }
        assert!(fit.converged && !fit.empty);
    }

    #[test]
    fn zero_target_gives_empty_model() {
        let (theta, _) = toy_theta();
        let fit = stlsq(&theta, &DVector::zeros(theta.nrows()), 0.05, 0.0, &StlsqOptions::default()).unwrap();
        assert!(fit.empty && fit.coeffs.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn ridge_matches_normal_equations() {
        let (theta, _) = toy_theta();
        let sub = theta.columns(0, 4).into_owned();
        let y = DVector::from_fn(sub.nrows(), |i, _| (i as f64 * 0.37).sin());
        let x = ridge(&sub, &y, 0.1, false);
        let lhs = sub.transpose() * &sub + DMatrix::identity(4, 4) * 0.1;
        let want = lhs.lu().solve(&(sub.transpose() * &y)).unwrap();
        assert!((x - want).amax() < 1e-9);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn grid_cell_count() {
        assert_eq!(HyperGrid::published().cells().len(), 180);
    }

    #[test]
    fn monomial_names() {
        let lib = CandidateLibrary::polynomial(4);
        assert_eq!(lib.len(), 15);
        assert_eq!(lib.names[10], "e^4");
        assert_eq!(lib.names[12], "e^2 w^2");
    }
}

//! Annual population series: imputation, normalization, positivity rescaling
//! and synthetic data from a known vector field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dynsys::{integrate, linspace, PlanarField, State};
use crate::error::{Error, Result};

/// Which divisor a standard deviation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdConvention {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n − 1.
    Sample,
}

impl SdConvention {
    pub fn name(self) -> &'static str {
        match self {
            SdConvention::Population => "population",
            SdConvention::Sample => "sample",
        }
    }
}

/// Minimum value after the positivity shift, in normalized units.
pub const POSITIVE_FLOOR: f64 = 0.05;

/// Mean and standard deviation of `v` under `conv`.
pub fn mean_sd(v: &[f64], conv: SdConvention) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    let denom = match conv {
        SdConvention::Population => n,
        SdConvention::Sample => n - 1.0,
    };
    (mean, (ss / denom).sqrt())
}

/// Raw counts for one species, possibly with missing years.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl RawSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<Option<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("times must be finite and strictly increasing".into()));
        }
        if let Some(v) = values.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("value {v} is not finite")));
        }
        Ok(Self { label: label.into(), times, values })
    }

    /// Like [`RawSeries::new`] but also rejects negative values, as for head counts.
    pub fn counts(label: impl Into<String>, times: Vec<f64>, values: Vec<Option<f64>>) -> Result<Self> {
        let s = Self::new(label, times, values)?;
        if let Some(v) = s.values.iter().flatten().find(|v| **v < 0.0) {
            return Err(Error::InvalidInput(format!("count {v} in series '{}' is negative", s.label)));
        }
        Ok(s)
    }

    pub fn complete(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(label, times, values.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// Values as plain numbers; fails if anything is missing.
    pub fn dense_values(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|v| v.ok_or_else(|| Error::InvalidInput(format!("series '{}' has missing values", self.label))))
            .collect()
    }
}

/// Fill single-point gaps. Interior gaps take the mean of both neighbours;
/// a gap at index 0 takes the mean of the next two values.
pub fn impute_missing(series: &RawSeries) -> Result<RawSeries> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidInput("imputation needs at least 3 points".into()));
    }
    let v = &series.values;
    let mut i = 0;
    while i < n {
        if v[i].is_none() {
            let start = i;
            while i < n && v[i].is_none() {
                i += 1;
            }
            if i == n {
                return Err(Error::TrailingGap);
            }
            if i - start > 1 {
                return Err(Error::GapTooLong { start, len: i - start });
            }
        }
        i += 1;
    }
    let mut out = v.clone();
    for k in 0..n {
        if v[k].is_none() {
            out[k] = Some(if k == 0 {
                // v[1] is present; v[2] is present unless it starts another gap
                let b = v[2].ok_or(Error::GapTooLong { start: 0, len: 1 })?;
                0.5 * (v[1].unwrap() + b)
            } else {
                0.5 * (v[k - 1].unwrap() + v[k + 1].unwrap())
            });
        }
    }
    Ok(RawSeries { label: series.label.clone(), times: series.times.clone(), values: out })
}

/// A series after z-scoring and optional positivity rescaling.
///
/// Stored values relate to the raw data through
/// `stored = ((raw − mu) / sigma + offset) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
    pub offset: f64,
    pub scale: f64,
    pub sd_convention: SdConvention,
}

impl NormalizedSeries {
    /// Map stored values back to the raw scale.
    pub fn to_raw_scale(&self, stored: &[f64]) -> Vec<f64> {
        stored.iter().map(|v| self.raw_value(*v)).collect()
    }

    pub fn raw_value(&self, stored: f64) -> f64 {
        (stored * self.scale - self.offset) * self.sigma + self.mu
    }

    /// Map stored values back to z-scores (undo only the positivity step).
    pub fn to_zscores(&self, stored: &[f64]) -> Vec<f64> {
        stored.iter().map(|v| v * self.scale - self.offset).collect()
    }

    /// Stored values as an unlabelled raw series, e.g. for re-normalizing.
    pub fn as_raw(&self) -> RawSeries {
        RawSeries {
            label: self.label.clone(),
            times: self.times.clone(),
            values: self.values.iter().map(|v| Some(*v)).collect(),
        }
    }

    /// Same metadata, new samples (e.g. a smoothed resampling of this series).
    pub fn with_samples(&self, times: Vec<f64>, values: Vec<f64>) -> Self {
        Self { times, values, ..self.clone() }
    }
}

pub fn zscore(series: &RawSeries) -> Result<NormalizedSeries> {
    zscore_with(series, SdConvention::Population)
}

pub fn zscore_with(series: &RawSeries, conv: SdConvention) -> Result<NormalizedSeries> {
    let v = series.dense_values()?;
    if v.len() < 2 {
        return Err(Error::InvalidInput("z-score needs at least 2 points".into()));
    }
    let (mu, sigma) = mean_sd(&v, conv);
    if !(sigma > 0.0) {
        return Err(Error::ConstantSeries);
    }
    Ok(NormalizedSeries {
        label: series.label.clone(),
        times: series.times.clone(),
        values: v.iter().map(|x| (x - mu) / sigma).collect(),
        mu,
        sigma,
        offset: 0.0,
        scale: 1.0,
        sd_convention: conv,
    })
}

/// Shift so the minimum is `POSITIVE_FLOOR` (skipped when already positive),
/// then divide by the series' own standard deviation.
pub fn positive_rescale(series: &NormalizedSeries) -> NormalizedSeries {
    let v = &series.values;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min > 0.0 { 0.0 } else { POSITIVE_FLOOR - min };
    let (_, sd) = mean_sd(v, series.sd_convention);
    let sd = if sd > 0.0 { sd } else { 1.0 };
    NormalizedSeries {
        label: series.label.clone(),
        times: series.times.clone(),
        values: v.iter().map(|x| (x + shift) / sd).collect(),
        mu: series.mu,
        sigma: series.sigma,
        offset: series.offset + shift * series.scale,
        scale: series.scale * sd,
        sd_convention: series.sd_convention,
    }
}

/// Sample the trajectory of `field` from `state0` at `n_points` equally spaced
/// times and add independent Gaussian noise. Returns (elk, wolf).
pub fn synthesize<F: PlanarField + ?Sized>(
    field: &F,
    state0: State,
    t_span: (f64, f64),
    n_points: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<(RawSeries, RawSeries)> {
    if n_points < 2 {
        return Err(Error::InvalidInput("need at least 2 points".into()));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(Error::InvalidInput(format!("noise sd {noise_sd} must be finite and ≥ 0")));
    }
    let times = linspace(t_span.0, t_span.1, n_points);
    let tr = integrate(field, state0, t_span, &times)?;
    if let Some(t) = tr.blow_up_at {
        return Err(Error::Integration { t, reason: "trajectory blew up".into() });
    }
    let mut e: Vec<f64> = tr.states.iter().map(|s| s.e).collect();
    let mut w: Vec<f64> = tr.states.iter().map(|s| s.w).collect();
    if noise_sd > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sd).map_err(|err| Error::InvalidInput(err.to_string()))?;
        for i in 0..n_points {
            e[i] += normal.sample(&mut rng);
            w[i] += normal.sample(&mut rng);
        }
    }
    let wrap = |label: &str, v: Vec<f64>| RawSeries {
        label: label.to_string(),
        times: times.clone(),
        values: v.into_iter().map(Some).collect(),
    };
    Ok((wrap("elk", e), wrap("wolf", w)))
}

/// Like [`synthesize`], but each series gets noise with standard deviation
/// `fraction` times the (population) SD of its own noiseless values.
pub fn synthesize_relative<F: PlanarField + ?Sized>(
    field: &F,
    state0: State,
    t_span: (f64, f64),
    n_points: usize,
    fraction: f64,
    seed: u64,
) -> Result<(RawSeries, RawSeries)> {
    if !(fraction >= 0.0) || !fraction.is_finite() {
        return Err(Error::InvalidInput(format!("noise fraction {fraction} must be finite and ≥ 0")));
    }
    let (mut e, mut w) = synthesize(field, state0, t_span, n_points, 0.0, seed)?;
    if fraction > 0.0 {
        let sd = |s: &RawSeries| mean_sd(&s.dense_values().unwrap(), SdConvention::Population).1;
        let (se, sw) = (fraction * sd(&e), fraction * sd(&w));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        for i in 0..n_points {
            let (ne, nw): (f64, f64) = (normal.sample(&mut rng), normal.sample(&mut rng));
            e.values[i] = e.values[i].map(|v| v + se * ne);
            w.values[i] = w.values[i].map(|v| v + sw * nw);
        }
    }
    Ok((e, w))
}

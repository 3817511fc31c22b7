//! Ensemble moment estimators, RMSE error metrics against the fBM law,
//! the chi-square goodness-of-fit test for fractional Gaussian noise, and
//! Kolmogorov-Smirnov helpers used throughout the test batteries.
//!
//! Moment accumulation is deterministic at any thread count: paths are
//! folded in fixed chunks of 1024 in index order and the chunk partials
//! are merged sequentially, so a run with a fixed seed is bit-reproducible
//! whether it executes on one thread or many.

mod realized;

pub use realized::{load_price_csv, realized_variance_discrete, rolling_realized_vol, PriceSeries};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::{
    fbm_covariance, fgn_autocovariance, FbmPath, FbmSampler, HurstParam, TimeGrid,
};
use crate::rng::{NormalMethod, RandomSource};

const CHUNK: usize = 1024;

/// N sampled trajectories on a common grid.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    pub grid: TimeGrid,
    pub hurst: HurstParam,
    pub paths: Vec<Vec<f64>>,
    pub source_label: String,
}

impl PathEnsemble {
    pub fn new(
        grid: TimeGrid,
        hurst: HurstParam,
        paths: Vec<Vec<f64>>,
        source_label: impl Into<String>,
    ) -> Result<Self> {
        if paths.len() < 2 {
            return Err(Error::TooFewPaths(paths.len()));
        }
        for (i, p) in paths.iter().enumerate() {
            if p.len() != grid.steps() + 1 {
                return Err(Error::GridMismatch(format!(
                    "path {i} has {} values, grid wants {}",
                    p.len(),
                    grid.steps() + 1
                )));
            }
            if p[0] != 0.0 {
                return Err(Error::GridMismatch(format!(
                    "path {i} does not start at zero"
                )));
            }
        }
        Ok(Self {
            grid,
            hurst,
            paths,
            source_label: source_label.into(),
        })
    }

    /// Draws `n_paths` trajectories, one substream per path index.
    pub fn generate(
        sampler: &FbmSampler,
        source: &RandomSource,
        n_paths: usize,
        method: NormalMethod,
    ) -> Result<Self> {
        if n_paths < 2 {
            return Err(Error::TooFewPaths(n_paths));
        }
        let paths: Result<Vec<Vec<f64>>> = (0..n_paths)
            .into_par_iter()
            .map(|i| {
                let mut sub = source.substream(i, n_paths)?;
                Ok(sampler.sample_path(&mut sub, method)?.values)
            })
            .collect();
        Self::new(sampler.grid(), sampler.hurst(), paths?, source.label())
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }
}

/// Per-gridpoint mean and unbiased variance plus the full empirical
/// covariance matrix. The diagonal of the covariance equals `variance`
/// bitwise: both come from the same accumulation.
#[derive(Debug, Clone, Serialize)]
pub struct MomentEstimates {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Dense row-major (n+1) × (n+1), symmetric.
    pub covariance: Vec<f64>,
    pub n_paths: usize,
}

impl MomentEstimates {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn cov(&self, k: usize, j: usize) -> f64 {
        self.covariance[k * self.dim() + j]
    }
}

/// Streaming accumulator: path sums and lower-triangular cross-products.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    dim: usize,
    count: usize,
    sum: Vec<f64>,
    // Packed lower triangle of Σ x xᵀ, row k holding k+1 entries.
    cross: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            sum: vec![0.0; dim],
            cross: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn push_path(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.dim);
        self.count += 1;
        for (k, &v) in values.iter().enumerate() {
            self.sum[k] += v;
            let row = &mut self.cross[k * (k + 1) / 2..k * (k + 1) / 2 + k + 1];
            for (j, item) in row.iter_mut().enumerate() {
                *item += v * values[j];
            }
        }
    }

    pub fn merge(&mut self, other: MomentAccumulator) {
        debug_assert_eq!(self.dim, other.dim);
        self.count += other.count;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
    }

    pub fn finalize(&self) -> Result<MomentEstimates> {
        let n = self.count;
        if n < 2 {
            return Err(Error::TooFewPaths(n));
        }
        let nf = n as f64;
        let dim = self.dim;
        let mean: Vec<f64> = self.sum.iter().map(|s| s / nf).collect();
        let mut covariance = vec![0.0f64; dim * dim];
        for k in 0..dim {
            for j in 0..=k {
                let raw = self.cross[k * (k + 1) / 2 + j];
                let c = (raw - self.sum[k] * self.sum[j] / nf) / (nf - 1.0);
                covariance[k * dim + j] = c;
                covariance[j * dim + k] = c;
            }
        }
        let variance: Vec<f64> = (0..dim).map(|k| covariance[k * dim + k]).collect();
        Ok(MomentEstimates {
            mean,
            variance,
            covariance,
            n_paths: n,
        })
    }
}

/// Moments of an ensemble held in memory.
pub fn ensemble_moments(ensemble: &PathEnsemble) -> Result<MomentEstimates> {
    let dim = ensemble.grid.steps() + 1;
    let partials: Vec<MomentAccumulator> = ensemble
        .paths
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = MomentAccumulator::new(dim);
            for p in chunk {
                acc.push_path(p);
            }
            acc
        })
        .collect();
    merge_partials(partials)
}

/// Moments of `n_paths` trajectories produced on the fly (nothing is
/// stored); `path_values(i)` must yield path i deterministically.
pub fn moments_from_paths<F>(dim: usize, n_paths: usize, path_values: F) -> Result<MomentEstimates>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    if n_paths < 2 {
        return Err(Error::TooFewPaths(n_paths));
    }
    let n_chunks = n_paths.div_ceil(CHUNK);
    let partials: Result<Vec<MomentAccumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = MomentAccumulator::new(dim);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_paths) {
                acc.push_path(&path_values(i)?);
            }
            Ok(acc)
        })
        .collect();
    merge_partials(partials?)
}

/// Draws `n_paths` from the sampler (one substream per path) and folds
/// them straight into moment estimates.
pub fn simulate_moments(
    sampler: &FbmSampler,
    source: &RandomSource,
    n_paths: usize,
    method: NormalMethod,
) -> Result<MomentEstimates> {
    moments_from_paths(sampler.grid().steps() + 1, n_paths, |i| {
        let mut sub = source.substream(i, n_paths)?;
        Ok(sampler.sample_path(&mut sub, method)?.values)
    })
}

fn merge_partials(partials: Vec<MomentAccumulator>) -> Result<MomentEstimates> {
    let mut it = partials.into_iter();
    let mut total = it.next().ok_or(Error::TooFewPaths(0))?;
    for p in it {
        total.merge(p);
    }
    total.finalize()
}

/// Root-mean-squared errors of an estimated moment set against the fBM
/// law: ε1 over the mean, ε2 over the variance, ε3 over the covariance
/// surface.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub epsilon3: f64,
    pub n_paths: usize,
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
}

pub fn rmse_errors(
    moments: &MomentEstimates,
    hurst: HurstParam,
    grid: TimeGrid,
    n_paths: usize,
) -> ErrorReport {
    let n1 = grid.steps() + 1;
    assert_eq!(moments.dim(), n1, "moments were computed on a different grid");
    let h2 = 2.0 * hurst.value();

    let sum_mu: f64 = moments.mean.iter().map(|m| m * m).sum();
    let epsilon1 = (sum_mu / n1 as f64).sqrt();

    let sum_v: f64 = (0..n1)
        .map(|k| {
            let d = moments.variance[k] - grid.node(k).powf(h2);
            d * d
        })
        .sum();
    let epsilon2 = (sum_v / n1 as f64).sqrt();

    let mut sum_c = 0.0f64;
    for k in 0..n1 {
        for j in 0..n1 {
            let d = moments.cov(k, j) - fbm_covariance(grid.node(k), grid.node(j), hurst);
            sum_c += d * d;
        }
    }
    let epsilon3 = (sum_c / (n1 as f64 * n1 as f64)).sqrt();

    ErrorReport {
        epsilon1,
        epsilon2,
        epsilon3,
        n_paths,
        hurst: hurst.value(),
        horizon: grid.horizon(),
        steps: grid.steps(),
    }
}

/// Chi-square goodness-of-fit of a path's increments against the fGn law
/// with the hypothesized Hurst parameter: whitens by the inverse Cholesky
/// factor of the theoretical covariance and returns (statistic, p-value),
/// the statistic being chi-square with n degrees of freedom under the null.
pub fn chi_square_fgn(path: &FbmPath, hurst: HurstParam) -> Result<(f64, f64)> {
    let n = path.grid.steps();
    if n < 2 {
        return Err(Error::InvalidParam(
            "chi-square test needs at least 2 increments".into(),
        ));
    }
    let scale = path.grid.dt().powf(2.0 * hurst.value());
    let mut cov = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let c = scale * fgn_autocovariance(i - j, hurst);
            cov[i * n + j] = c;
            cov[j * n + i] = c;
        }
    }
    let lower = crate::fbm::cholesky_lower_dense(&cov, n)?;
    let x: Vec<f64> = path.values.windows(2).map(|w| w[1] - w[0]).collect();
    // Forward substitution L y = x.
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let mut acc = x[i];
        for j in 0..i {
            acc -= lower[i * (i + 1) / 2 + j] * y[j];
        }
        let d = lower[i * (i + 1) / 2 + i];
        y[i] = if d > 0.0 { acc / d } else { 0.0 };
    }
    let statistic: f64 = y.iter().map(|v| v * v).sum();
    let p_value = crate::special::chi_square_sf(n as f64, statistic);
    Ok((statistic, p_value))
}

/// One-sample KS statistic of `sample` against `cdf`; sorts in place.
pub fn ks_statistic_vs_cdf<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Two-sample KS statistic; sorts both samples in place.
pub fn ks_two_sample_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at level `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

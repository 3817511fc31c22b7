//! Hurst exponent estimation from sampled series: the m(q,Δ) scaling
//! method (two nested log-log regressions), the difference-variance
//! method, and the Peng method (bridge-detrended residual variance).
//!
//! Estimates outside (0, 1) are reported as-is, never clamped; the fit
//! diagnostics travel with every estimate so a bad regression is visible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::gamma;

/// Default lag grid Δ = 1..30 samples for the scaling method.
pub fn default_lags() -> Vec<usize> {
    (1..=30).collect()
}

/// Default moment orders q for the scaling method.
pub fn default_q_list() -> Vec<f64> {
    vec![0.5, 1.0, 1.5, 2.0, 3.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HurstMethod {
    Scaling,
    DiffVariance,
    Peng,
}

/// Ordinary least squares summary for one log-log fit.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// OLS of ys on xs with intercept.
pub fn ols(xs: &[f64], ys: &[f64]) -> RegressionFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = ybar - slope * xbar;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    RegressionFit {
        slope,
        intercept,
        r_squared,
        residuals,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HurstEstimate {
    pub h_hat: f64,
    pub method: HurstMethod,
    pub fit: RegressionFit,
}

/// The q-th absolute moment of a standard Gaussian:
/// K_q = 2^{q/2} Γ((q+1)/2) / sqrt(π).
pub fn gaussian_abs_moment(q: f64) -> f64 {
    2.0f64.powf(0.5 * q) * gamma(0.5 * (q + 1.0)) / std::f64::consts::PI.sqrt()
}

/// m(q, Δ): mean of |x_{kΔ} − x_{(k−1)Δ}|^q over the non-overlapping lag
/// multiples k = 1..⌊(len−1)/Δ⌋.
pub fn m_q_delta(samples: &[f64], q: f64, delta: usize) -> Result<f64> {
    m_q_delta_with(samples, q, delta, false)
}

/// Same moment with overlapping differences x_{k+Δ} − x_k over every k.
/// The non-overlapping variant is the default.
pub fn m_q_delta_with(samples: &[f64], q: f64, delta: usize, overlapping: bool) -> Result<f64> {
    if delta == 0 || samples.len() <= delta {
        return Err(Error::InvalidParam(format!(
            "lag {delta} needs a series longer than {delta}, got {}",
            samples.len()
        )));
    }
    if q <= 0.0 {
        return Err(Error::InvalidParam(format!("moment order q = {q} must be positive")));
    }
    let mut sum = 0.0f64;
    let mut count = 0usize;
    let mut any_nonzero = false;
    if overlapping {
        for i in 0..samples.len() - delta {
            let d = (samples[i + delta] - samples[i]).abs();
            any_nonzero |= d != 0.0;
            sum += d.powf(q);
            count += 1;
        }
    } else {
        let mut k = 1;
        while k * delta < samples.len() {
            let d = (samples[k * delta] - samples[(k - 1) * delta]).abs();
            any_nonzero |= d != 0.0;
            sum += d.powf(q);
            k += 1;
            count += 1;
        }
    }
    if !any_nonzero {
        return Err(Error::DegenerateSeries);
    }
    Ok(sum / count as f64)
}

/// The full m(q, Δ) surface over a q grid and a lag grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingSurface {
    pub q_list: Vec<f64>,
    pub delta_list: Vec<usize>,
    /// m_values[qi][di] = m(q_list[qi], delta_list[di])
    pub m_values: Vec<Vec<f64>>,
}

pub fn scaling_surface(
    samples: &[f64],
    q_list: &[f64],
    delta_list: &[usize],
    overlapping: bool,
) -> Result<ScalingSurface> {
    let mut m_values = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let row: Result<Vec<f64>> = delta_list
            .iter()
            .map(|&d| m_q_delta_with(samples, q, d, overlapping))
            .collect();
        m_values.push(row?);
    }
    Ok(ScalingSurface {
        q_list: q_list.to_vec(),
        delta_list: delta_list.to_vec(),
        m_values,
    })
}

/// Per-q slopes ζ_q of log m(q, Δ) on log Δ.
#[derive(Debug, Clone, Serialize)]
pub struct ZetaSlopes {
    pub q_list: Vec<f64>,
    pub zeta: Vec<f64>,
    pub fits: Vec<RegressionFit>,
}

pub fn zeta_slopes(surface: &ScalingSurface) -> Result<ZetaSlopes> {
    if surface.delta_list.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "zeta regression needs at least 3 lags, got {}",
            surface.delta_list.len()
        )));
    }
    let xs: Vec<f64> = surface.delta_list.iter().map(|&d| (d as f64).ln()).collect();
    let mut zeta = Vec::with_capacity(surface.q_list.len());
    let mut fits = Vec::with_capacity(surface.q_list.len());
    for row in &surface.m_values {
        if row.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::DegenerateSeries);
        }
        let ys: Vec<f64> = row.iter().map(|m| m.ln()).collect();
        let fit = ols(&xs, &ys);
        zeta.push(fit.slope);
        fits.push(fit);
    }
    Ok(ZetaSlopes {
        q_list: surface.q_list.clone(),
        zeta,
        fits,
    })
}

/// H from the linearity ζ_q ~ q H: least squares through the origin.
pub fn hurst_from_zeta(slopes: &ZetaSlopes) -> Result<HurstEstimate> {
    if slopes.q_list.len() < 2 {
        return Err(Error::InvalidParam(
            "hurst fit needs at least 2 values of q".into(),
        ));
    }
    let sqq: f64 = slopes.q_list.iter().map(|q| q * q).sum();
    let sqz: f64 = slopes
        .q_list
        .iter()
        .zip(&slopes.zeta)
        .map(|(q, z)| q * z)
        .sum();
    let h_hat = sqz / sqq;
    let residuals: Vec<f64> = slopes
        .q_list
        .iter()
        .zip(&slopes.zeta)
        .map(|(q, z)| z - h_hat * q)
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = slopes.zeta.iter().map(|z| z * z).sum();
    Ok(HurstEstimate {
        h_hat,
        method: HurstMethod::Scaling,
        fit: RegressionFit {
            slope: h_hat,
            intercept: 0.0,
            r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
            residuals,
        },
    })
}

/// Scaling-method pipeline: surface, per-q slopes, through-origin fit.
pub fn hurst_scaling(
    samples: &[f64],
    q_list: &[f64],
    delta_list: &[usize],
) -> Result<(HurstEstimate, ScalingSurface, ZetaSlopes)> {
    let surface = scaling_surface(samples, q_list, delta_list, false)?;
    let slopes = zeta_slopes(&surface)?;
    let estimate = hurst_from_zeta(&slopes)?;
    Ok((estimate, surface, slopes))
}

/// Difference-variance method: sample variance of lag-δ differences,
/// log-log regression on δ, H = slope/2.
pub fn hurst_difference_variance(samples: &[f64], lag_list: &[usize]) -> Result<HurstEstimate> {
    if lag_list.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "difference-variance needs at least 3 lags, got {}",
            lag_list.len()
        )));
    }
    let mut xs = Vec::with_capacity(lag_list.len());
    let mut ys = Vec::with_capacity(lag_list.len());
    for &lag in lag_list {
        if lag == 0 || samples.len() <= lag || samples.len() - lag < 30 {
            return Err(Error::InvalidParam(format!(
                "lag {lag} leaves fewer than 30 differences in a series of {}",
                samples.len()
            )));
        }
        let n = samples.len() - lag;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for i in 0..n {
            let d = samples[i + lag] - samples[i];
            sum += d;
            sum_sq += d * d;
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum * mean) / (n as f64 - 1.0);
        if !(var > 0.0) {
            return Err(Error::DegenerateSeries);
        }
        xs.push((lag as f64).ln());
        ys.push(var.ln());
    }
    let fit = ols(&xs, &ys);
    Ok(HurstEstimate {
        h_hat: fit.slope / 2.0,
        method: HurstMethod::DiffVariance,
        fit,
    })
}

/// Peng method: partition the increment series into blocks of size m,
/// within each block regress the cumulative sum on time and record the
/// residual variance, average over blocks, regress the log of the mean
/// residual variance on log m; H = slope/2.
pub fn hurst_peng(samples: &[f64], block_sizes: &[usize]) -> Result<HurstEstimate> {
    if block_sizes.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "peng method needs at least 3 block sizes, got {}",
            block_sizes.len()
        )));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidParam("series too short".into()));
    }
    let increments: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let mut xs = Vec::with_capacity(block_sizes.len());
    let mut ys = Vec::with_capacity(block_sizes.len());
    for &m in block_sizes {
        if m < 4 {
            return Err(Error::InvalidParam(format!(
                "block size {m} is too small for a within-block regression"
            )));
        }
        let blocks = increments.len() / m;
        if blocks < 4 {
            return Err(Error::BlocksTooSmall {
                block: m,
                blocks,
                min_blocks: 4,
            });
        }
        let mut resid_var_sum = 0.0f64;
        let mut cum = vec![0.0f64; m];
        let times: Vec<f64> = (0..m).map(|j| j as f64).collect();
        for b in 0..blocks {
            let seg = &increments[b * m..(b + 1) * m];
            let mut acc = 0.0f64;
            for (j, &d) in seg.iter().enumerate() {
                acc += d;
                cum[j] = acc;
            }
            let fit = ols(&times, &cum);
            let ssr: f64 = fit.residuals.iter().map(|r| r * r).sum();
            resid_var_sum += ssr / m as f64;
        }
        let mean_resid_var = resid_var_sum / blocks as f64;
        if !(mean_resid_var > 0.0) {
            return Err(Error::DegenerateSeries);
        }
        xs.push((m as f64).ln());
        ys.push(mean_resid_var.ln());
    }
    let fit = ols(&xs, &ys);
    Ok(HurstEstimate {
        h_hat: fit.slope / 2.0,
        method: HurstMethod::Peng,
        fit,
    })
}

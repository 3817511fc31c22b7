//! Realized variance from daily closing prices.
//!
//! The discrete estimator annualizes the mean of squared log returns:
//! with R return observations r_1..r_R the window's variance is
//! AF/(R−1) · Σ r_i², so a window needs at least two returns. Rows are
//! used in file order; no calendar or holiday adjustment.

use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Daily closes with an annualization factor (default 252).
#[derive(Debug, Clone)]
pub struct PriceSeries {
    pub dates: Vec<String>,
    pub closes: Vec<f64>,
    pub annualization: f64,
}

pub const DEFAULT_ANNUALIZATION: f64 = 252.0;

impl PriceSeries {
    pub fn new(dates: Vec<String>, closes: Vec<f64>, annualization: f64) -> Result<Self> {
        if closes.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "price series needs at least 2 rows, got {}",
                closes.len()
            )));
        }
        if dates.len() != closes.len() {
            return Err(Error::InvalidParam(
                "dates and closes have different lengths".into(),
            ));
        }
        for (row, &c) in closes.iter().enumerate() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::NonPositivePrice { row, value: c });
            }
        }
        Ok(Self {
            dates,
            closes,
            annualization,
        })
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    /// Log returns ln(S_{i+1}/S_i), length len − 1.
    pub fn log_returns(&self) -> Vec<f64> {
        self.closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
    }
}

/// Loads a CSV with header columns `date` and `close` (case-insensitive;
/// extra columns ignored). Malformed numeric rows are reported with their
/// 1-based line number.
pub fn load_price_csv(path: &Path) -> Result<PriceSeries> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::EmptyFile),
    };
    let cols: Vec<String> = header
        .split(',')
        .map(|c| c.trim().trim_matches('"').to_ascii_lowercase())
        .collect();
    let date_idx = cols
        .iter()
        .position(|c| c == "date")
        .ok_or_else(|| Error::MissingColumn("date".into()))?;
    let close_idx = cols
        .iter()
        .position(|c| c == "close")
        .ok_or_else(|| Error::MissingColumn("close".into()))?;

    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2; // header is line 1
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let date = fields.get(date_idx).map(|s| s.trim()).unwrap_or("");
        let close_raw = fields.get(close_idx).map(|s| s.trim()).unwrap_or("");
        let close: f64 = close_raw.parse().map_err(|_| Error::UnparsableNumber {
            line: lineno,
            value: close_raw.to_string(),
        })?;
        if !(close > 0.0) || !close.is_finite() {
            return Err(Error::NonPositivePrice {
                row: lineno,
                value: close,
            });
        }
        dates.push(date.to_string());
        closes.push(close);
    }
    if closes.is_empty() {
        return Err(Error::EmptyFile);
    }
    if closes.len() < 2 {
        return Err(Error::InvalidParam(
            "price series needs at least 2 data rows".into(),
        ));
    }
    PriceSeries::new(dates, closes, DEFAULT_ANNUALIZATION)
}

/// Discretely sampled realized variance over `prices[window]`, annualized.
pub fn realized_variance_discrete(
    series: &PriceSeries,
    window: std::ops::Range<usize>,
) -> Result<f64> {
    let closes = series
        .closes
        .get(window.clone())
        .ok_or_else(|| Error::WindowTooLong {
            window: window.end.saturating_sub(window.start),
            len: series.len(),
        })?;
    let returns = closes.len().saturating_sub(1);
    if returns < 2 {
        return Err(Error::InvalidParam(format!(
            "realized variance needs at least 2 returns in the window, got {returns}"
        )));
    }
    let sum_sq: f64 = closes
        .windows(2)
        .map(|w| {
            let r = (w[1] / w[0]).ln();
            r * r
        })
        .sum();
    Ok(series.annualization / (returns as f64 - 1.0) * sum_sq)
}

/// Trailing realized volatility: sqrt of the realized variance over each
/// window of `window_returns` log returns, aligned to the window end.
/// Output length is len − window_returns.
pub fn rolling_realized_vol(series: &PriceSeries, window_returns: usize) -> Result<Vec<f64>> {
    if window_returns < 2 {
        return Err(Error::InvalidParam(
            "rolling window needs at least 2 returns".into(),
        ));
    }
    let len = series.len();
    if window_returns > len - 1 {
        return Err(Error::WindowTooLong {
            window: window_returns,
            len,
        });
    }
    let mut out = Vec::with_capacity(len - window_returns);
    for start in 0..len - window_returns {
        let v = realized_variance_discrete(series, start..start + window_returns + 1)?;
        out.push(v.sqrt());
    }
    Ok(out)
}

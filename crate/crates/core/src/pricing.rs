//! Monte Carlo pricing of target-volatility calls and puts under the
//! lognormal fSABR model, with a zero-rate Black-Scholes oracle for the
//! constant-volatility limit, common-random-number strike sweeps, and
//! nested convergence studies.
//!
//! No discounting anywhere: prices are bare expectations of the payoffs.
//! A pricing run with a pseudo source and a fixed seed is bit-reproducible
//! at any thread count (one substream per path index, payoffs folded in
//! index order).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::TimeGrid;
use crate::models::{FsabrEngine, FsabrParams, ModelPath};
use crate::rng::RandomSource;
use crate::special::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionSide {
    Call,
    Put,
}

impl std::fmt::Display for OptionSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Call => "call",
            Self::Put => "put",
        })
    }
}

/// Target-volatility contract terms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TvoSpec {
    pub strike: f64,
    pub expiry: f64,
    pub target_vol: f64,
    pub side: OptionSide,
}

impl TvoSpec {
    pub fn new(strike: f64, expiry: f64, target_vol: f64, side: OptionSide) -> Result<Self> {
        for (name, v) in [("strike", strike), ("expiry", expiry), ("target_vol", target_vol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            strike,
            expiry,
            target_vol,
            side,
        })
    }
}

/// Monte Carlo price with its standard error and 95% interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PriceEstimate {
    pub price: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PriceEstimate {
    fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let price = sum / nf;
        let var = ((sum_sq - sum * price).max(0.0)) / (nf - 1.0);
        let std_error = (var / nf).sqrt();
        Self {
            price,
            std_error,
            n_paths: n,
            ci_low: price - 1.96 * std_error,
            ci_high: price + 1.96 * std_error,
        }
    }
}

fn check_payoff_grid(path: &ModelPath, spec: &TvoSpec) -> Result<()> {
    if path.grid.horizon() != spec.expiry {
        return Err(Error::GridMismatch(format!(
            "path horizon {} does not match contract expiry {}",
            path.grid.horizon(),
            spec.expiry
        )));
    }
    Ok(())
}

// Left-point Riemann sum of ∫_0^T Y² dt, consistent with the Euler
// filtration (Y_k is known at the start of step k).
fn realized_quadratic(path: &ModelPath) -> f64 {
    let n = path.grid.steps();
    let dt = path.grid.dt();
    path.y[..n].iter().map(|y| y * y * dt).sum()
}

/// TVO call payoff: K σ̄ √T / sqrt(∫ Y² dt) · (e^{X_T} − 1)^+.
pub fn tvo_call_payoff(path: &ModelPath, spec: &TvoSpec) -> Result<f64> {
    check_payoff_grid(path, spec)?;
    let moneyness = (path.x[path.grid.steps()].exp() - 1.0).max(0.0);
    if moneyness == 0.0 {
        return Ok(0.0);
    }
    let rv = realized_quadratic(path);
    if rv <= 0.0 {
        // Impossible for exponential volatility; flags corrupt input.
        return Err(Error::ZeroRealizedVariance);
    }
    Ok(spec.strike * spec.target_vol * spec.expiry.sqrt() / rv.sqrt() * moneyness)
}

/// TVO put payoff: K / (σ̄ √T) · sqrt(∫ Y² dt) · (1 − e^{X_T})^+; the
/// realized-volatility factor multiplies instead of divides.
pub fn tvo_put_payoff(path: &ModelPath, spec: &TvoSpec) -> Result<f64> {
    check_payoff_grid(path, spec)?;
    let moneyness = (1.0 - path.x[path.grid.steps()].exp()).max(0.0);
    let rv = realized_quadratic(path);
    Ok(spec.strike / (spec.target_vol * spec.expiry.sqrt()) * rv.sqrt() * moneyness)
}

pub fn tvo_payoff(path: &ModelPath, spec: &TvoSpec) -> Result<f64> {
    match spec.side {
        OptionSide::Call => tvo_call_payoff(path, spec),
        OptionSide::Put => tvo_put_payoff(path, spec),
    }
}

/// Zero-rate Black-Scholes call value S0 Φ(d1) − K Φ(d2).
pub fn black_scholes_call(s0: f64, strike: f64, sigma: f64, expiry: f64) -> f64 {
    let sig_sqrt_t = sigma * expiry.sqrt();
    let d1 = ((s0 / strike).ln() + 0.5 * sigma * sigma * expiry) / sig_sqrt_t;
    let d2 = d1 - sig_sqrt_t;
    s0 * normal_cdf(d1) - strike * normal_cdf(d2)
}

fn grid_matches_expiry(grid: TimeGrid, spec: &TvoSpec) -> Result<()> {
    if grid.horizon() != spec.expiry {
        return Err(Error::GridMismatch(format!(
            "grid horizon {} must equal the contract expiry {}",
            grid.horizon(),
            spec.expiry
        )));
    }
    Ok(())
}

const PRICE_CHUNK: usize = 1024;

// Per-path payoffs by index, deterministically chunked.
fn payoffs_by_path(
    engine: &FsabrEngine,
    spec: &TvoSpec,
    n_paths: usize,
    source: &RandomSource,
) -> Result<Vec<f64>> {
    let chunks = n_paths.div_ceil(PRICE_CHUNK);
    let nested: Result<Vec<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * PRICE_CHUNK;
            let hi = ((c + 1) * PRICE_CHUNK).min(n_paths);
            let mut out = Vec::with_capacity(hi - lo);
            for i in lo..hi {
                let mut sub = source.substream(i, n_paths)?;
                let path = engine.simulate(&mut sub, Some(spec.strike))?;
                out.push(tvo_payoff(&path, spec)?);
            }
            Ok(out)
        })
        .collect();
    Ok(nested?.into_iter().flatten().collect())
}

/// Prices one TVO contract by simulating `n_paths` independent fSABR
/// paths; zero discounting.
pub fn price_tvo_mc(
    params: &FsabrParams,
    spec: &TvoSpec,
    grid: TimeGrid,
    n_paths: usize,
    source: &RandomSource,
) -> Result<PriceEstimate> {
    if n_paths < 100 {
        return Err(Error::InvalidParam(format!(
            "Monte Carlo pricing needs at least 100 paths, got {n_paths}"
        )));
    }
    grid_matches_expiry(grid, spec)?;
    let engine = FsabrEngine::new(*params, grid)?;
    check_source_budget(&engine, source, n_paths)?;
    let payoffs = payoffs_by_path(&engine, spec, n_paths, source)?;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for p in &payoffs {
        sum += p;
        sum_sq += p * p;
    }
    Ok(PriceEstimate::from_sums(sum, sum_sq, n_paths))
}

// Entropy sources must hold the full word budget up front so a pricing
// run can never die mid-ensemble.
fn check_source_budget(
    engine: &FsabrEngine,
    source: &RandomSource,
    n_paths: usize,
) -> Result<()> {
    if let Some(remaining) = source.words_remaining() {
        let needed = engine.words_per_path() * n_paths as u64;
        if remaining < needed {
            return Err(Error::Exhausted {
                requested: needed,
                remaining,
            });
        }
    }
    Ok(())
}

/// Per-strike prices using common random numbers: the same simulated
/// paths are reused for every strike, which is valid because the strike
/// enters the payoff analytically through X_0 = log(S0/K) and the
/// prefactor. Call payoffs are then monotone nonincreasing in K path by
/// path (puts nondecreasing), so the sweep produces smooth curves.
pub fn strike_sweep(
    params: &FsabrParams,
    template: &TvoSpec,
    strikes: &[f64],
    grid: TimeGrid,
    n_paths: usize,
    source: &RandomSource,
) -> Result<Vec<(f64, PriceEstimate)>> {
    if strikes.is_empty() {
        return Err(Error::InvalidParam("strike list is empty".into()));
    }
    if strikes.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::InvalidParam("strikes must be positive".into()));
    }
    if n_paths < 100 {
        return Err(Error::InvalidParam(format!(
            "Monte Carlo pricing needs at least 100 paths, got {n_paths}"
        )));
    }
    grid_matches_expiry(grid, template)?;
    let engine = FsabrEngine::new(*params, grid)?;
    check_source_budget(&engine, source, n_paths)?;

    // One pass: per path, the strike-free log-increment sum G (X with
    // X_0 = 0) and the realized quadratic variation.
    let chunks = n_paths.div_ceil(PRICE_CHUNK);
    let nested: Result<Vec<Vec<(f64, f64)>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * PRICE_CHUNK;
            let hi = ((c + 1) * PRICE_CHUNK).min(n_paths);
            let mut out = Vec::with_capacity(hi - lo);
            for i in lo..hi {
                let mut sub = source.substream(i, n_paths)?;
                let path = engine.simulate(&mut sub, None)?;
                out.push((path.x[grid.steps()], realized_quadratic(&path)));
            }
            Ok(out)
        })
        .collect();
    let samples: Vec<(f64, f64)> = nested?.into_iter().flatten().collect();

    let s0 = params.s0;
    let sqrt_t = template.expiry.sqrt();
    let mut table = Vec::with_capacity(strikes.len());
    for &k in strikes {
        let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
        for &(g, rv) in &samples {
            let s_t = s0 * g.exp();
            let payoff = match template.side {
                OptionSide::Call => {
                    if rv <= 0.0 {
                        return Err(Error::ZeroRealizedVariance);
                    }
                    template.target_vol * sqrt_t / rv.sqrt() * (s_t - k).max(0.0)
                }
                OptionSide::Put => {
                    rv.sqrt() / (template.target_vol * sqrt_t) * (k - s_t).max(0.0)
                }
            };
            sum += payoff;
            sum_sq += payoff * payoff;
        }
        table.push((k, PriceEstimate::from_sums(sum, sum_sq, n_paths)));
    }
    Ok(table)
}

/// One row of a convergence trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceRow {
    pub n_paths: usize,
    pub price: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Prices at each N in `n_list` over nested path sets: the estimate at N
/// uses exactly the first N paths of the largest run, so the trace is a
/// martingale-like convergence path.
pub fn convergence_study(
    params: &FsabrParams,
    spec: &TvoSpec,
    grid: TimeGrid,
    n_list: &[usize],
    source: &RandomSource,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(
            "convergence study needs a strictly increasing path-count list".into(),
        ));
    }
    if n_list[0] < 100 {
        return Err(Error::InvalidParam(
            "convergence study needs at least 100 paths at the smallest N".into(),
        ));
    }
    grid_matches_expiry(grid, spec)?;
    let n_max = *n_list.last().unwrap();
    let engine = FsabrEngine::new(*params, grid)?;
    check_source_budget(&engine, source, n_max)?;
    let payoffs = payoffs_by_path(&engine, spec, n_max, source)?;

    let mut rows = Vec::with_capacity(n_list.len());
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    let mut consumed = 0usize;
    for &n in n_list {
        while consumed < n {
            let p = payoffs[consumed];
            sum += p;
            sum_sq += p * p;
            consumed += 1;
        }
        let est = PriceEstimate::from_sums(sum, sum_sq, n);
        rows.push(ConvergenceRow {
            n_paths: n,
            price: est.price,
            std_error: est.std_error,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{FbmPath, HurstParam};
    use proptest::prelude::*;

    fn hp(h: f64) -> HurstParam {
        HurstParam::new(h).unwrap()
    }

    // A synthetic path with constant volatility and a chosen terminal
    // log-moneyness.
    fn flat_vol_path(grid: TimeGrid, vol: f64, x_t: f64) -> ModelPath {
        let n = grid.steps();
        let x: Vec<f64> = (0..=n).map(|k| x_t * k as f64 / n as f64).collect();
        ModelPath {
            grid,
            x,
            y: vec![vol; n + 1],
            fbm: FbmPath {
                grid,
                hurst: hp(0.5),
                values: vec![0.0; n + 1],
                driving_increments: None,
            },
        }
    }

    #[test]
    fn call_payoff_identities() {
        let grid = TimeGrid::new(0.5, 8).unwrap();
        let spec = TvoSpec::new(2.0, 0.5, 0.3, OptionSide::Call).unwrap();

        // Out of the money.
        let otm = flat_vol_path(grid, 0.3, -0.2);
        assert_eq!(tvo_call_payoff(&otm, &spec).unwrap(), 0.0);

        // Realized vol equal to target: plain call payoff (S_T − K)^+.
        let atm = flat_vol_path(grid, 0.3, 0.25);
        let s_t = 2.0 * 0.25f64.exp();
        let expected = s_t - 2.0;
        assert!((tvo_call_payoff(&atm, &spec).unwrap() - expected).abs() < 1e-12);

        // Realized vol twice the target halves the payoff.
        let double = flat_vol_path(grid, 0.6, 0.25);
        assert!((tvo_call_payoff(&double, &spec).unwrap() - 0.5 * expected).abs() < 1e-12);
    }

    #[test]
    fn put_payoff_identities() {
        let grid = TimeGrid::new(0.5, 8).unwrap();
        let spec = TvoSpec::new(2.0, 0.5, 0.3, OptionSide::Put).unwrap();

        let itm_call = flat_vol_path(grid, 0.3, 0.2);
        assert_eq!(tvo_put_payoff(&itm_call, &spec).unwrap(), 0.0);

        // Realized vol equal to target: plain put payoff (K − S_T)^+.
        let otm = flat_vol_path(grid, 0.3, -0.25);
        let s_t = 2.0 * (-0.25f64).exp();
        let expected = 2.0 - s_t;
        assert!((tvo_put_payoff(&otm, &spec).unwrap() - expected).abs() < 1e-12);

        // Realized vol half the target halves the put payoff.
        let half = flat_vol_path(grid, 0.15, -0.25);
        assert!((tvo_put_payoff(&half, &spec).unwrap() - 0.5 * expected).abs() < 1e-12);
    }

    #[test]
    fn payoff_grid_mismatch_is_rejected() {
        let grid = TimeGrid::new(0.5, 8).unwrap();
        let spec = TvoSpec::new(1.0, 1.0, 0.3, OptionSide::Call).unwrap();
        let path = flat_vol_path(grid, 0.3, 0.1);
        assert!(matches!(
            tvo_call_payoff(&path, &spec),
            Err(Error::GridMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn payoffs_are_nonnegative_and_scale_in_target_vol(
            x_t in -1.0f64..1.0,
            vol in 0.05f64..1.0,
            c in prop::sample::select(vec![2.0f64, 4.0, 0.5, 0.25]),
        ) {
            let grid = TimeGrid::new(0.5, 4).unwrap();
            let path = flat_vol_path(grid, vol, x_t);
            let call = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
            let put = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Put).unwrap();
            let call_scaled = TvoSpec::new(1.0, 0.5, 0.3 * c, OptionSide::Call).unwrap();
            let put_scaled = TvoSpec::new(1.0, 0.5, 0.3 * c, OptionSide::Put).unwrap();

            let pc = tvo_call_payoff(&path, &call).unwrap();
            let pp = tvo_put_payoff(&path, &put).unwrap();
            prop_assert!(pc >= 0.0 && pp >= 0.0);
            // σ̄ scaling by a power of two is exact in floating point.
            prop_assert_eq!(tvo_call_payoff(&path, &call_scaled).unwrap(), c * pc);
            prop_assert_eq!(tvo_put_payoff(&path, &put_scaled).unwrap(), pp / c);
        }
    }

    #[test]
    fn black_scholes_values() {
        // S0 = K = 1, σ = 0.3, T = 0.5: 2Φ(0.3·sqrt(0.5)/2) − 1.
        let p = black_scholes_call(1.0, 1.0, 0.3, 0.5);
        let expected = 2.0 * normal_cdf(0.3 * 0.5f64.sqrt() / 2.0) - 1.0;
        assert!((p - expected).abs() < 1e-14);
        assert!((p - 0.08447).abs() < 1e-5, "ATM value {p}");
        // Deep in the money: price → S0.
        assert!((black_scholes_call(1.0, 1e-12, 0.3, 0.5) - 1.0).abs() < 1e-9);
        // Vanishing volatility out of the money: worthless.
        assert!(black_scholes_call(1.0, 1.5, 1e-9, 0.5) < 1e-12);
    }

    #[test]
    fn constant_vol_price_matches_black_scholes() {
        // ν = 0 and σ̄ = α0: the TVO call collapses to a plain call.
        let grid = TimeGrid::new(0.5, 32).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.0, -0.5, hp(0.5)).unwrap();
        let spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
        let src = RandomSource::pseudo(42);
        let est = price_tvo_mc(&params, &spec, grid, 50_000, &src).unwrap();
        let oracle = black_scholes_call(1.0, 1.0, 0.3, 0.5);
        assert!(
            (est.price - oracle).abs() < 3.0 * est.std_error,
            "MC {} ± {} vs BS {oracle}",
            est.price,
            est.std_error
        );
        // General σ̄ scales the price exactly.
        let spec2 = TvoSpec::new(1.0, 0.5, 0.6, OptionSide::Call).unwrap();
        let est2 = price_tvo_mc(&params, &spec2, grid, 50_000, &src).unwrap();
        assert!((est2.price - 2.0 * est.price).abs() < 1e-14);
    }

    #[test]
    fn constant_vol_oracle_across_moneyness() {
        let grid = TimeGrid::new(0.5, 32).unwrap();
        let alpha0 = 0.25f64;
        let sigma_bar = 0.4f64;
        let params = FsabrParams::new(1.0, alpha0, 0.0, 0.2, hp(0.5)).unwrap();
        let src = RandomSource::pseudo(43);
        for &k in &[0.8f64, 1.0, 1.2] {
            let spec = TvoSpec::new(k, 0.5, sigma_bar, OptionSide::Call).unwrap();
            let est = price_tvo_mc(&params, &spec, grid, 50_000, &src).unwrap();
            let oracle = sigma_bar / alpha0 * black_scholes_call(1.0, k, alpha0, 0.5);
            assert!(
                (est.price - oracle).abs() < 3.0 * est.std_error,
                "K = {k}: MC {} ± {} vs scaled BS {oracle}",
                est.price,
                est.std_error
            );
        }
    }

    #[test]
    fn sweep_is_monotone_under_common_random_numbers() {
        let grid = TimeGrid::new(0.5, 16).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.6, -0.5, hp(0.2)).unwrap();
        let strikes: Vec<f64> = (0..44).map(|i| 0.6 + 0.8 * i as f64 / 43.0).collect();
        let src = RandomSource::pseudo(44);
        let call_spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
        let calls = strike_sweep(&params, &call_spec, &strikes, grid, 2000, &src).unwrap();
        for w in calls.windows(2) {
            assert!(
                w[1].1.price <= w[0].1.price + 1e-12,
                "call prices rose with strike: {} -> {}",
                w[0].1.price,
                w[1].1.price
            );
        }
        let put_spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Put).unwrap();
        let puts = strike_sweep(&params, &put_spec, &strikes, grid, 2000, &src).unwrap();
        for w in puts.windows(2) {
            assert!(w[1].1.price >= w[0].1.price - 1e-12);
        }
    }

    #[test]
    fn convergence_rows_are_nested_and_tighten() {
        let grid = TimeGrid::new(0.5, 16).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.5, -0.3, hp(0.3)).unwrap();
        let spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
        let src = RandomSource::pseudo(45);
        let rows = convergence_study(&params, &spec, grid, &[1000, 4000, 16000], &src).unwrap();
        assert_eq!(rows.len(), 3);
        // Standard error roughly quarters... halves per 4x paths.
        assert!(rows[1].std_error < rows[0].std_error);
        assert!(rows[2].std_error < rows[1].std_error);
        let slope = ((rows[2].std_error / rows[0].std_error).ln())
            / ((16000f64 / 1000.0).ln());
        assert!(
            (slope + 0.5).abs() < 0.05,
            "std-error log-log slope {slope}"
        );
        // Nested trace: earlier prices stay within 4 of their own standard
        // errors of the final price.
        for row in &rows[..2] {
            assert!(
                (row.price - rows[2].price).abs() <= 4.0 * row.std_error,
                "nested trace escaped: {} vs final {}",
                row.price,
                rows[2].price
            );
        }
        // Same seed, same rows, bit for bit.
        let rows2 = convergence_study(&params, &spec, grid, &[1000, 4000, 16000], &src).unwrap();
        for (a, b) in rows.iter().zip(&rows2) {
            assert_eq!(a.price, b.price);
            assert_eq!(a.std_error, b.std_error);
        }
    }

    #[test]
    fn entropy_budget_is_checked_up_front() {
        use std::io::Write;
        let grid = TimeGrid::new(0.5, 16).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.5, -0.3, hp(0.3)).unwrap();
        let spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
        let path = std::env::temp_dir().join(format!(
            "fracmc-pricing-entropy-{}.bin",
            std::process::id()
        ));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(&vec![0xA5u8; 4 * 1000]).unwrap();
        drop(f);
        let src = RandomSource::open_entropy_file(&path, 0).unwrap();
        match price_tvo_mc(&params, &spec, grid, 1000, &src) {
            Err(Error::Exhausted { requested, remaining }) => {
                assert_eq!(requested, 32_000); // 2 n N words
                assert_eq!(remaining, 1000);
            }
            other => panic!("expected Exhausted, got {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn doubling_steps_is_stable_in_the_exact_case() {
        // H = 1/2, ν = 0: the discretization is exact in distribution, so
        // refining the grid moves the price only by Monte Carlo noise
        // (3 combined standard errors).
        let params = FsabrParams::new(1.0, 0.3, 0.0, 0.0, hp(0.5)).unwrap();
        let spec = TvoSpec::new(1.0, 0.5, 0.3, OptionSide::Call).unwrap();
        let src = RandomSource::pseudo(46);
        let coarse = price_tvo_mc(&params, &spec, TimeGrid::new(0.5, 32).unwrap(), 100_000, &src)
            .unwrap();
        let fine = price_tvo_mc(&params, &spec, TimeGrid::new(0.5, 64).unwrap(), 100_000, &src)
            .unwrap();
        let combined = (coarse.std_error.powi(2) + fine.std_error.powi(2)).sqrt();
        assert!(
            (coarse.price - fine.price).abs() < 3.0 * combined,
            "step doubling moved the price: {} vs {}",
            coarse.price,
            fine.price
        );
    }
}

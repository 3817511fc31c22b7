//! Fractional stochastic-volatility dynamics: the RFSV model (volatility
//! as the exponential of a fractional Ornstein-Uhlenbeck process) and the
//! lognormal fSABR model, whose volatility is driven by the fBM built
//! from the same Brownian motion that moves the asset.
//!
//! The fSABR simulation requires the kernel scheme: it is the only
//! sampler that returns the driving Brownian increments, and the joint
//! law of (X, Y) needs B and B^H together.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::{DaviesHarte, FbmPath, HurstParam, HybridKernelFbm, TimeGrid};
use crate::hurst::{
    default_lags, default_q_list, hurst_difference_variance, hurst_peng, hurst_scaling,
    HurstEstimate, ScalingSurface,
};
use crate::rng::{NormalMethod, RandomSource};
use crate::special::gamma;

/// RFSV parameters: σ_t = σ0 exp(X_t), dX = ν dW^H − α (X − m) dt.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RfsvParams {
    pub sigma0: f64,
    pub nu: f64,
    pub alpha: f64,
    pub mean_level: f64,
    pub x0: f64,
    #[serde(skip)]
    pub hurst: HurstParam,
}

impl RfsvParams {
    pub fn new(
        sigma0: f64,
        nu: f64,
        alpha: f64,
        mean_level: f64,
        x0: f64,
        hurst: HurstParam,
    ) -> Result<Self> {
        if !(sigma0 > 0.0) {
            return Err(Error::InvalidParam(format!("sigma0 must be positive, got {sigma0}")));
        }
        if nu < 0.0 {
            return Err(Error::InvalidParam(format!("nu must be nonnegative, got {nu}")));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidParam(format!("alpha must be nonnegative, got {alpha}")));
        }
        Ok(Self {
            sigma0,
            nu,
            alpha,
            mean_level,
            x0,
            hurst,
        })
    }
}

/// Lognormal fSABR parameters: dS/S = α_t (ρ dB + ρ̄ dW), α_t = α0 e^{ν B^H_t}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FsabrParams {
    pub s0: f64,
    pub alpha0: f64,
    pub nu: f64,
    pub rho: f64,
    #[serde(skip)]
    pub hurst: HurstParam,
}

impl FsabrParams {
    pub fn new(s0: f64, alpha0: f64, nu: f64, rho: f64, hurst: HurstParam) -> Result<Self> {
        if !(s0 > 0.0) {
            return Err(Error::InvalidParam(format!("s0 must be positive, got {s0}")));
        }
        if !(alpha0 > 0.0) {
            return Err(Error::InvalidParam(format!("alpha0 must be positive, got {alpha0}")));
        }
        if nu < 0.0 {
            return Err(Error::InvalidParam(format!("nu must be nonnegative, got {nu}")));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParam(format!("rho must lie in [-1, 1], got {rho}")));
        }
        Ok(Self {
            s0,
            alpha0,
            nu,
            rho,
            hurst,
        })
    }

    /// ρ̄ = sqrt(1 − ρ²), always derived, never stored.
    pub fn rho_bar(&self) -> f64 {
        (1.0 - self.rho * self.rho).max(0.0).sqrt()
    }
}

/// One simulated model trajectory. `x` is the log-moneyness path for
/// fSABR (or the log-vol exponent for RFSV), `y` the positive volatility
/// path, and `fbm` the driving fractional path.
#[derive(Debug, Clone)]
pub struct ModelPath {
    pub grid: TimeGrid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub fbm: FbmPath,
}

fn check_grid(expected: TimeGrid, path: &FbmPath, hurst: HurstParam) -> Result<()> {
    if path.grid != expected {
        return Err(Error::GridMismatch(format!(
            "fBM path grid (T = {}, n = {}) does not match the model grid (T = {}, n = {})",
            path.grid.horizon(),
            path.grid.steps(),
            expected.horizon(),
            expected.steps()
        )));
    }
    if path.hurst != hurst {
        return Err(Error::GridMismatch(format!(
            "fBM path H = {} does not match the model H = {}",
            path.hurst.value(),
            hurst.value()
        )));
    }
    Ok(())
}

/// Euler simulation of the RFSV log-vol recursion on top of a sampled
/// fBM path: X_{k+1} = X_k + ν ΔW^H_k − α (X_k − m) Δt, σ_k = σ0 e^{X_k}.
pub fn simulate_rfsv(params: &RfsvParams, grid: TimeGrid, fbm_path: &FbmPath) -> Result<ModelPath> {
    check_grid(grid, fbm_path, params.hurst)?;
    let n = grid.steps();
    let dt = grid.dt();
    let mut x = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n + 1);
    x.push(params.x0);
    y.push(params.sigma0 * params.x0.exp());
    for k in 0..n {
        let dw = fbm_path.values[k + 1] - fbm_path.values[k];
        let prev = x[k];
        let next = prev + params.nu * dw - params.alpha * (prev - params.mean_level) * dt;
        x.push(next);
        y.push(params.sigma0 * next.exp());
    }
    Ok(ModelPath {
        grid,
        x,
        y,
        fbm: fbm_path.clone(),
    })
}

/// Draws X_0 from the stationary law of the fractional OU exponent,
/// N(m, ν² Γ(2H+1) / (2 α^{2H})); an opt-in alternative to the fixed x0.
pub fn rfsv_stationary_initial(params: &RfsvParams, source: &mut RandomSource) -> Result<f64> {
    if !(params.alpha > 0.0) {
        return Err(Error::InvalidParam(
            "stationary start needs a positive mean-reversion speed".into(),
        ));
    }
    let h2 = 2.0 * params.hurst.value();
    let var = params.nu * params.nu * gamma(h2 + 1.0) / (2.0 * params.alpha.powf(h2));
    let (z, _) = source.normal_pair()?;
    Ok(params.mean_level + var.sqrt() * z)
}

/// Prepared fSABR simulator: the kernel-scheme weight table is built once
/// and shared; each path consumes n normals for the fBM driver and n for
/// the orthogonal Brownian component, in that order.
#[derive(Debug)]
pub struct FsabrEngine {
    params: FsabrParams,
    grid: TimeGrid,
    fbm_gen: HybridKernelFbm,
}

impl FsabrEngine {
    pub fn new(params: FsabrParams, grid: TimeGrid) -> Result<Self> {
        Ok(Self {
            params,
            grid,
            fbm_gen: HybridKernelFbm::new(grid, params.hurst)?,
        })
    }

    pub fn params(&self) -> &FsabrParams {
        &self.params
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Words drawn per path under Box-Muller.
    pub fn words_per_path(&self) -> u64 {
        2 * RandomSource::box_muller_words(self.grid.steps())
    }

    /// Simulates one joint path with X_0 = log(S0 / reference_strike).
    ///
    /// Y_k = α0 exp(ν B^H_{t_k}) exactly; X advances by Euler with the
    /// same ΔB_k that drive B^H:
    /// X_{k+1} = X_k + Y_k (ρ ΔB_k + ρ̄ ΔW_k) − ½ Y_k² Δt.
    pub fn simulate(
        &self,
        source: &mut RandomSource,
        reference_strike: Option<f64>,
    ) -> Result<ModelPath> {
        let n = self.grid.steps();
        let dt = self.grid.dt();
        let fbm = self.fbm_gen.sample_path(source, NormalMethod::BoxMuller)?;
        let mut dw = vec![0.0f64; n];
        source.fill_normals(&mut dw, NormalMethod::BoxMuller)?;
        let sqrt_dt = dt.sqrt();

        let p = &self.params;
        let x0 = match reference_strike {
            Some(k) if k > 0.0 => (p.s0 / k).ln(),
            Some(k) => {
                return Err(Error::InvalidParam(format!(
                    "reference strike must be positive, got {k}"
                )))
            }
            None => 0.0,
        };
        let rho = p.rho;
        let rho_bar = p.rho_bar();
        let db = fbm
            .driving_increments
            .as_ref()
            .expect("kernel scheme always returns driving increments");

        let mut x = Vec::with_capacity(n + 1);
        let mut y = Vec::with_capacity(n + 1);
        x.push(x0);
        y.push(p.alpha0);
        for k in 0..n {
            let yk = y[k];
            let next_x = x[k] + yk * (rho * db[k] + rho_bar * sqrt_dt * dw[k]) - 0.5 * yk * yk * dt;
            x.push(next_x);
            y.push(p.alpha0 * (p.nu * fbm.values[k + 1]).exp());
        }
        Ok(ModelPath { grid: self.grid, x, y, fbm })
    }
}

/// One-shot fSABR simulation with X_0 = 0 (reference strike = S0); build
/// an [`FsabrEngine`] when drawing many paths.
pub fn simulate_fsabr(
    params: &FsabrParams,
    grid: TimeGrid,
    source: &mut RandomSource,
) -> Result<ModelPath> {
    FsabrEngine::new(*params, grid)?.simulate(source, None)
}

/// Everything the full-circle analysis produces: one simulated
/// volatility path analyzed by all three Hurst estimators.
#[derive(Debug, Clone, Serialize)]
pub struct FullCircleResult {
    pub scaling: HurstEstimate,
    pub diff_variance: HurstEstimate,
    pub peng: HurstEstimate,
    pub surface: ScalingSurface,
}

/// Simulates one fBM path and the RFSV volatility on it, then estimates
/// H from log σ by the scaling, difference-variance, and Peng methods.
pub fn rfsv_full_circle(
    params: &RfsvParams,
    grid: TimeGrid,
    source: &mut RandomSource,
) -> Result<FullCircleResult> {
    if grid.steps() < 2000 {
        return Err(Error::InvalidParam(format!(
            "full-circle estimation needs at least 2000 samples for stability, got {}",
            grid.steps()
        )));
    }
    let fbm_gen = DaviesHarte::new(grid, params.hurst)?;
    let fbm_path = fbm_gen.sample_path(source, NormalMethod::BoxMuller)?;
    let model = simulate_rfsv(params, grid, &fbm_path)?;
    let log_vol: Vec<f64> = model.y.iter().map(|s| s.ln()).collect();

    let (scaling, surface, _) = hurst_scaling(&log_vol, &default_q_list(), &default_lags())?;
    let diff_variance = hurst_difference_variance(&log_vol, &[1, 2, 4, 8, 16])?;
    let peng = hurst_peng(&log_vol, &[8, 16, 32, 64, 128])?;
    Ok(FullCircleResult {
        scaling,
        diff_variance,
        peng,
        surface,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::davies_harte;

    fn hp(h: f64) -> HurstParam {
        HurstParam::new(h).unwrap()
    }

    #[test]
    fn rfsv_without_reversion_telescopes() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let h = hp(0.3);
        let mut src = RandomSource::pseudo(1);
        let fbm = davies_harte(grid, h, &mut src).unwrap();
        let params = RfsvParams::new(0.2, 0.4, 0.0, 0.0, -1.5, h).unwrap();
        let model = simulate_rfsv(&params, grid, &fbm).unwrap();
        for (k, &xk) in model.x.iter().enumerate() {
            let expected = -1.5 + 0.4 * fbm.values[k];
            assert!((xk - expected).abs() < 1e-12, "X[{k}] = {xk} vs {expected}");
        }
    }

    #[test]
    fn rfsv_fixed_point_when_vol_of_vol_vanishes() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        let h = hp(0.3);
        let mut src = RandomSource::pseudo(2);
        let fbm = davies_harte(grid, h, &mut src).unwrap();
        let params = RfsvParams::new(0.2, 0.0, 2.0, -0.7, -0.7, h).unwrap();
        let model = simulate_rfsv(&params, grid, &fbm).unwrap();
        for &xk in &model.x {
            assert_eq!(xk, -0.7);
        }
        for &yk in &model.y {
            assert!((yk - 0.2 * (-0.7f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn rfsv_grid_mismatch_is_rejected() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        let other = TimeGrid::new(1.0, 64).unwrap();
        let h = hp(0.3);
        let mut src = RandomSource::pseudo(3);
        let fbm = davies_harte(other, h, &mut src).unwrap();
        let params = RfsvParams::new(0.2, 0.3, 0.0, 0.0, 0.0, h).unwrap();
        assert!(matches!(
            simulate_rfsv(&params, grid, &fbm),
            Err(Error::GridMismatch(_))
        ));
        let fbm_wrong_h = davies_harte(grid, hp(0.4), &mut src).unwrap();
        assert!(matches!(
            simulate_rfsv(&params, grid, &fbm_wrong_h),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn rfsv_lognormal_moment_identity() {
        // α = 0, x0 = 0: E[σ_k/σ0] = exp(ν² t_k^{2H} / 2), checked at the
        // terminal gridpoint within 3 MC standard errors over 10^5 paths.
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let h = hp(0.3);
        let nu = 0.5f64;
        let params = RfsvParams::new(1.0, nu, 0.0, 0.0, 0.0, h).unwrap();
        let gen = DaviesHarte::new(grid, h).unwrap();
        let src = RandomSource::pseudo(404);
        let n_paths = 100_000usize;
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for i in 0..n_paths {
            let mut sub = src.substream(i, n_paths).unwrap();
            let fbm = gen.sample_path(&mut sub, NormalMethod::BoxMuller).unwrap();
            let model = simulate_rfsv(&params, grid, &fbm).unwrap();
            let r = model.y[8];
            s += r;
            q += r * r;
        }
        let nf = n_paths as f64;
        let mean = s / nf;
        let se = ((q / nf - mean * mean) / nf).sqrt();
        let theory = (nu * nu / 2.0).exp();
        assert!(
            (mean - theory).abs() < 3.0 * se,
            "E[σ_T/σ0] = {mean}, theory {theory}, se {se}"
        );
    }

    #[test]
    fn rfsv_strong_reversion_pulls_mean_to_level() {
        let grid = TimeGrid::new(1.0, 200).unwrap();
        let h = hp(0.3);
        let m = -1.2f64;
        let params = RfsvParams::new(0.2, 0.3, 25.0, m, 0.0, h).unwrap();
        let gen = DaviesHarte::new(grid, h).unwrap();
        let src = RandomSource::pseudo(405);
        let n_paths = 20_000usize;
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for i in 0..n_paths {
            let mut sub = src.substream(i, n_paths).unwrap();
            let fbm = gen.sample_path(&mut sub, NormalMethod::BoxMuller).unwrap();
            let model = simulate_rfsv(&params, grid, &fbm).unwrap();
            let x_t = model.x[200];
            s += x_t;
            q += x_t * x_t;
        }
        let nf = n_paths as f64;
        let mean = s / nf;
        let se = ((q / nf - mean * mean) / nf).sqrt();
        assert!(
            (mean - m).abs() < 3.0 * se.max(1e-4),
            "E[X_T] = {mean}, level {m}, se {se}"
        );
    }

    #[test]
    fn stationary_initial_matches_ou_variance_at_brownian_case() {
        // H = 1/2: stationary variance ν²/(2α).
        let h = hp(0.5);
        let params = RfsvParams::new(0.2, 0.4, 2.0, -1.0, 0.0, h).unwrap();
        let mut src = RandomSource::pseudo(406);
        let n = 200_000usize;
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let x0 = rfsv_stationary_initial(&params, &mut src).unwrap();
            s += x0;
            q += x0 * x0;
        }
        let nf = n as f64;
        let mean = s / nf;
        let var = q / nf - mean * mean;
        let theory = 0.4 * 0.4 / (2.0 * 2.0);
        assert!((mean + 1.0).abs() < 0.01);
        assert!((var / theory - 1.0).abs() < 0.02, "var {var} vs {theory}");
    }

    #[test]
    fn fsabr_driver_increments_are_shared_bitwise() {
        let grid = TimeGrid::new(0.5, 64).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.8, -0.5, hp(0.2)).unwrap();
        let engine = FsabrEngine::new(params, grid).unwrap();
        let mut src = RandomSource::pseudo(7);
        // Replay the same substream to recover the ΔW block the engine drew.
        let mut replay = RandomSource::pseudo(7);
        let path = engine.simulate(&mut src, None).unwrap();
        assert!(path.y.iter().all(|&y| y > 0.0), "volatility must stay positive");
        let db = path.fbm.driving_increments.as_ref().unwrap();
        let mut skip = vec![0.0f64; 64];
        replay.fill_normals(&mut skip, NormalMethod::BoxMuller).unwrap();
        let mut dw = vec![0.0f64; 64];
        replay.fill_normals(&mut dw, NormalMethod::BoxMuller).unwrap();
        let dt = grid.dt();
        let sqrt_dt = dt.sqrt();
        let mut x = 0.0f64;
        for k in 0..64 {
            let yk = path.y[k];
            x = x + yk * (params.rho * db[k] + params.rho_bar() * sqrt_dt * dw[k])
                - 0.5 * yk * yk * dt;
            assert_eq!(x, path.x[k + 1], "X recursion diverges at step {k}");
        }
    }

    #[test]
    fn fsabr_constant_vol_reduction() {
        // ν = 0: Y ≡ α0, X_T is Gaussian with known moments, and e^{X_T}
        // is a martingale started at 1.
        let grid = TimeGrid::new(0.5, 32).unwrap();
        let alpha0 = 0.3f64;
        let params = FsabrParams::new(1.0, alpha0, 0.0, -0.5, hp(0.5)).unwrap();
        let engine = FsabrEngine::new(params, grid).unwrap();
        let src = RandomSource::pseudo(8);
        let n_paths = 100_000usize;
        let mut xs = Vec::with_capacity(n_paths);
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for i in 0..n_paths {
            let mut sub = src.substream(i, n_paths).unwrap();
            let path = engine.simulate(&mut sub, None).unwrap();
            assert!(path.y.iter().all(|&y| y == alpha0));
            let x_t = path.x[32];
            xs.push(x_t);
            let m = x_t.exp();
            s += m;
            q += m * m;
        }
        let nf = n_paths as f64;
        let mean = s / nf;
        let se = ((q / nf - mean * mean) / nf).sqrt();
        assert!(
            (mean - 1.0).abs() < 3.0 * se,
            "martingale mean {mean}, se {se}"
        );
        // KS of X_T against N(−α0²T/2, α0²T) at 1%.
        let sd = alpha0 * 0.5f64.sqrt();
        let mu = -0.5 * alpha0 * alpha0 * 0.5;
        let d = crate::stats::ks_statistic_vs_cdf(&mut xs, |x| {
            crate::special::normal_cdf((x - mu) / sd)
        });
        let crit = crate::stats::ks_critical_value(n_paths, 0.01);
        assert!(d < crit, "X_T KS {d} vs {crit}");
    }

    #[test]
    fn fsabr_zero_correlation_decouples_drivers() {
        let grid = TimeGrid::new(0.5, 16).unwrap();
        let params = FsabrParams::new(1.0, 0.3, 0.5, 0.0, hp(0.3)).unwrap();
        let engine = FsabrEngine::new(params, grid).unwrap();
        let src = RandomSource::pseudo(9);
        let n_paths = 100_000usize;
        let (mut sxy, mut sxx, mut syy) = (0.0f64, 0.0f64, 0.0f64);
        let dt = grid.dt();
        for i in 0..n_paths {
            let mut sub = src.substream(i, n_paths).unwrap();
            let path = engine.simulate(&mut sub, None).unwrap();
            let db = path.fbm.driving_increments.as_ref().unwrap();
            for k in 0..16 {
                let innovation = path.x[k + 1] - path.x[k] + 0.5 * path.y[k] * path.y[k] * dt;
                sxy += db[k] * innovation;
                sxx += db[k] * db[k];
                syy += innovation * innovation;
            }
        }
        let corr = sxy / (sxx * syy).sqrt();
        let n_obs = (n_paths * 16) as f64;
        assert!(
            corr.abs() < 3.0 / n_obs.sqrt(),
            "ΔB vs X-innovation correlation {corr}"
        );
    }

    #[test]
    fn fsabr_brownian_case_has_perfectly_coupled_vol() {
        // H = 1/2: B^H ≡ B, so log(Y_T/α0)/ν equals the accumulated ΔB.
        let grid = TimeGrid::new(1.0, 128).unwrap();
        let params = FsabrParams::new(1.0, 0.25, 0.7, 0.3, hp(0.5)).unwrap();
        let engine = FsabrEngine::new(params, grid).unwrap();
        let mut src = RandomSource::pseudo(10);
        let path = engine.simulate(&mut src, None).unwrap();
        let db = path.fbm.driving_increments.as_ref().unwrap();
        let b_t: f64 = db.iter().sum();
        let log_ratio = (path.y[128] / 0.25).ln() / 0.7;
        assert!(
            (log_ratio - b_t).abs() < 1e-10,
            "log-vol endpoint {log_ratio} vs B_T {b_t}"
        );
    }

    #[test]
    fn full_circle_recovers_rough_hurst() {
        let grid = TimeGrid::new(5000.0, 5000).unwrap();
        let h = hp(0.14);
        let params = RfsvParams::new(1.0, 0.3, 5e-4, 0.0, 0.0, h).unwrap();
        let mut src = RandomSource::pseudo(140);
        let result = rfsv_full_circle(&params, grid, &mut src).unwrap();
        assert!(
            (result.scaling.h_hat - 0.14).abs() < 0.03,
            "scaling H = {}",
            result.scaling.h_hat
        );
        assert!(
            (result.diff_variance.h_hat - 0.14).abs() < 0.05,
            "difference-variance H = {}",
            result.diff_variance.h_hat
        );
        assert!(
            (result.peng.h_hat - 0.14).abs() < 0.05,
            "peng H = {}",
            result.peng.h_hat
        );
    }

    #[test]
    fn full_circle_brownian_control() {
        let grid = TimeGrid::new(5000.0, 5000).unwrap();
        let h = hp(0.5);
        let params = RfsvParams::new(1.0, 0.3, 5e-4, 0.0, 0.0, h).unwrap();
        let mut src = RandomSource::pseudo(141);
        let result = rfsv_full_circle(&params, grid, &mut src).unwrap();
        for (name, est) in [
            ("scaling", &result.scaling),
            ("diff-variance", &result.diff_variance),
            ("peng", &result.peng),
        ] {
            assert!(
                (est.h_hat - 0.5).abs() < 0.05,
                "{name} H = {} for true 0.5",
                est.h_hat
            );
        }
    }

    #[test]
    fn full_circle_pure_fbm_reduction() {
        // α = 0, ν = 1, σ0 = 1: log σ is exactly the fBM path.
        let grid = TimeGrid::new(2048.0, 2048).unwrap();
        let h = hp(0.3);
        let params = RfsvParams::new(1.0, 1.0, 0.0, 0.0, 0.0, h).unwrap();
        let mut src = RandomSource::pseudo(142);
        let fbm_gen = DaviesHarte::new(grid, h).unwrap();
        let fbm = fbm_gen.sample_path(&mut src, NormalMethod::BoxMuller).unwrap();
        let model = simulate_rfsv(&params, grid, &fbm).unwrap();
        for (k, &yk) in model.y.iter().enumerate() {
            assert!((yk.ln() - fbm.values[k]).abs() < 1e-12);
        }
        assert!(rfsv_full_circle(&params, TimeGrid::new(100.0, 100).unwrap(), &mut src).is_err());
    }
}

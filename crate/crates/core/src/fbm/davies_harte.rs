//! Exact fBM sampling by circulant embedding of the fGn autocovariance.
//!
//! The lag-0..n autocovariances are embedded in a circulant of order 2n
//! whose eigenvalues come from one FFT; each path then costs one FFT of
//! complex Gaussians weighted by the eigenvalue square roots. The sampled
//! increments carry unit-spacing law and are scaled by (T/n)^H before the
//! cumulative sum.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::{NormalMethod, RandomSource};

use super::{fgn_autocovariance, FbmPath, HurstParam, TimeGrid};

// Eigenvalues of the fGn circulant must be nonnegative; anything below
// -tol_eig, with tol_eig = 1e-10 × the largest eigenvalue, signals a bug
// or a pathological H. Values in (-tol_eig, 0) are FFT round-off and
// clamp to zero.
const EIG_TOL_REL: f64 = 1e-10;

#[derive(Clone)]
pub struct DaviesHarte {
    grid: TimeGrid,
    hurst: HurstParam,
    // multiplier[j]: sqrt(λ_j / (2n)) at j = 0, n; sqrt(λ_j / (4n)) otherwise.
    multiplier: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for DaviesHarte {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DaviesHarte")
            .field("grid", &self.grid)
            .field("hurst", &self.hurst)
            .finish()
    }
}

impl DaviesHarte {
    pub fn new(grid: TimeGrid, hurst: HurstParam) -> Result<Self> {
        let n = grid.steps();
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);

        let eigen = circulant_eigenvalues(n, hurst, fft.as_ref())?;
        let max_eig = eigen.iter().cloned().fold(0.0f64, f64::max);
        let tol = EIG_TOL_REL * max_eig;
        let mut multiplier = Vec::with_capacity(m);
        for (j, &lam) in eigen.iter().enumerate() {
            if lam < -tol {
                return Err(Error::NegativeEigenvalue {
                    index: j,
                    value: lam,
                });
            }
            let lam = lam.max(0.0);
            let denom = if j == 0 || j == n { 2.0 } else { 4.0 } * n as f64;
            multiplier.push((lam / denom).sqrt());
        }

        Ok(Self {
            grid,
            hurst,
            multiplier,
            fft,
            scale: grid.dt().powf(hurst.value()),
        })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn hurst(&self) -> HurstParam {
        self.hurst
    }

    /// Draws one path. Consumes exactly 2n normals, in the fixed order
    /// z[0] -> frequency 0, z[1] -> frequency n, then (z[2j], z[2j+1]) for
    /// the conjugate pair at frequencies j and 2n-j, j = 1..n-1.
    pub fn sample_path(&self, source: &mut RandomSource, method: NormalMethod) -> Result<FbmPath> {
        let n = self.grid.steps();
        let m = 2 * n;
        let mut z = vec![0.0f64; m];
        source.fill_normals(&mut z, method)?;

        let mut buf = vec![Complex::new(0.0f64, 0.0f64); m];
        buf[0] = Complex::new(self.multiplier[0] * z[0], 0.0);
        if n >= 1 {
            buf[n] = Complex::new(self.multiplier[n] * z[1], 0.0);
        }
        for j in 1..n {
            let w = self.multiplier[j];
            let re = w * z[2 * j];
            let im = w * z[2 * j + 1];
            buf[j] = Complex::new(re, im);
            buf[m - j] = Complex::new(re, -im);
        }
        self.fft.process(&mut buf);

        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0f64;
        for item in buf.iter().take(n) {
            acc += item.re * self.scale;
            values.push(acc);
        }
        Ok(FbmPath {
            grid: self.grid,
            hurst: self.hurst,
            values,
            driving_increments: None,
        })
    }
}

/// Eigenvalues of the order-2n circulant embedding of the fGn
/// autocovariance at lags 0..n (real parts of the first-row FFT).
pub fn circulant_eigenvalues_for(n: usize, hurst: HurstParam) -> Result<Vec<f64>> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(2 * n);
    circulant_eigenvalues(n, hurst, fft.as_ref())
}

fn circulant_eigenvalues(n: usize, hurst: HurstParam, fft: &dyn Fft<f64>) -> Result<Vec<f64>> {
    let m = 2 * n;
    let mut row = vec![Complex::new(0.0f64, 0.0f64); m];
    for (j, item) in row.iter_mut().enumerate() {
        let lag = if j <= n { j } else { m - j };
        item.re = fgn_autocovariance(lag, hurst);
    }
    fft.process(&mut row);
    Ok(row.into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn hp(h: f64) -> HurstParam {
        HurstParam::new(h).unwrap()
    }

    #[test]
    fn circulant_eigenvalues_nonnegative_over_h_range() {
        for &n in &[16usize, 256, 1024, 4096] {
            for i in 1..20 {
                let h = i as f64 * 0.05;
                let eig = circulant_eigenvalues_for(n, hp(h)).unwrap();
                let max = eig.iter().cloned().fold(0.0f64, f64::max);
                let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(
                    min >= -EIG_TOL_REL * max,
                    "negative eigenvalue {min} at n = {n}, H = {h}"
                );
            }
        }
    }

    #[test]
    fn brownian_case_increments_are_uncorrelated() {
        // H = 1/2: increments i.i.d. N(0, Δt); lag-1 autocorrelation ~ 0.
        let grid = TimeGrid::new(1.0, 16).unwrap();
        let gen = DaviesHarte::new(grid, hp(0.5)).unwrap();
        let mut src = RandomSource::pseudo(101);
        let n_paths = 100_000usize;
        let (mut s0, mut s1, mut cross, mut count) = (0.0f64, 0.0f64, 0.0f64, 0u64);
        for _ in 0..n_paths {
            let path = gen.sample_path(&mut src, NormalMethod::BoxMuller).unwrap();
            let inc: Vec<f64> = path.values.windows(2).map(|w| w[1] - w[0]).collect();
            for k in 0..inc.len() - 1 {
                s0 += inc[k];
                s1 += inc[k] * inc[k];
                cross += inc[k] * inc[k + 1];
                count += 1;
            }
        }
        let mean = s0 / count as f64;
        let var = s1 / count as f64 - mean * mean;
        let rho1 = (cross / count as f64 - mean * mean) / var;
        assert!(rho1.abs() < 0.01, "lag-1 autocorrelation {rho1}");
        let dt = grid.dt();
        assert!((var / dt - 1.0).abs() < 0.02, "increment variance {var} vs dt {dt}");
    }

    #[test]
    fn terminal_variance_matches_power_law_at_daily_scale() {
        // H = 0.2, T = 1, n = 252, N = 10^6: Var(W_T) within 3 MC standard
        // errors of T^{2H} = 1.
        let grid = TimeGrid::new(1.0, 252).unwrap();
        let gen = DaviesHarte::new(grid, hp(0.2)).unwrap();
        let mut src = RandomSource::pseudo(42);
        let n_paths = 1_000_000usize;
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for _ in 0..n_paths {
            let path = gen.sample_path(&mut src, NormalMethod::BoxMuller).unwrap();
            let w_t = *path.values.last().unwrap();
            s += w_t;
            q += w_t * w_t;
        }
        let nf = n_paths as f64;
        let mean = s / nf;
        let var = (q - nf * mean * mean) / (nf - 1.0);
        let se = (2.0 / (nf - 1.0)).sqrt(); // SE of sample variance of N(0,1)
        assert!(
            (var - 1.0).abs() < 3.0 * se,
            "Var(W_T) = {var}, want 1 ± {:.2e}",
            3.0 * se
        );
    }

    #[test]
    fn single_step_marginal_matches_closed_form() {
        // n = 1: the only increment is N(0, T^{2H}); KS at 1% on 10^5 draws.
        let t_hor = 0.7f64;
        let h = 0.3f64;
        let grid = TimeGrid::new(t_hor, 1).unwrap();
        let gen = DaviesHarte::new(grid, hp(h)).unwrap();
        let mut src = RandomSource::pseudo(7);
        let n = 100_000usize;
        let sd = t_hor.powf(h);
        let mut xs: Vec<f64> = (0..n)
            .map(|_| gen.sample_path(&mut src, NormalMethod::BoxMuller).unwrap().values[1] / sd)
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = n as f64;
        let mut d = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = crate::special::normal_cdf(x);
            d = d.max((cdf - i as f64 / nf).abs()).max(((i + 1) as f64 / nf - cdf).abs());
        }
        let crit = (-(0.005f64).ln() / 2.0).sqrt() / nf.sqrt();
        assert!(d < crit, "KS {d} vs critical {crit}");
    }
}

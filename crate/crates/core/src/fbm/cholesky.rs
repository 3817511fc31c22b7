//! Exact fBM sampling from the joint law: lower Cholesky factor of the
//! covariance matrix on t_1..t_n applied to i.i.d. standard normals.
//!
//! O(n³) setup and O(n²) per path make this the reference oracle for the
//! FFT and kernel schemes rather than a production sampler; n is capped.

use crate::error::{Error, Result};
use crate::rng::{NormalMethod, RandomSource};

use super::{fbm_covariance, FbmPath, HurstParam, TimeGrid};

const MAX_STEPS: usize = 2048;

#[derive(Debug, Clone)]
pub struct CholeskyFbm {
    grid: TimeGrid,
    hurst: HurstParam,
    // Packed row-major lower triangle: row i holds i+1 entries.
    lower: Vec<f64>,
}

impl CholeskyFbm {
    pub fn new(grid: TimeGrid, hurst: HurstParam) -> Result<Self> {
        let n = grid.steps();
        if n > MAX_STEPS {
            return Err(Error::InvalidParam(format!(
                "cholesky scheme is capped at n = {MAX_STEPS} steps (cost guard), got {n}"
            )));
        }
        let mut cov = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let c = fbm_covariance(grid.node(i + 1), grid.node(j + 1), hurst);
                cov[i * n + j] = c;
                cov[j * n + i] = c;
            }
        }
        let lower = cholesky_lower_packed(&cov, n)?;
        Ok(Self { grid, hurst, lower })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn hurst(&self) -> HurstParam {
        self.hurst
    }

    /// Entry (i, j), j <= i, of the lower factor.
    pub fn lower_entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i);
        self.lower[i * (i + 1) / 2 + j]
    }

    /// Draws one path; consumes n normals in index order (Box-Muller pads
    /// odd n by one discarded draw).
    pub fn sample_path(&self, source: &mut RandomSource, method: NormalMethod) -> Result<FbmPath> {
        let n = self.grid.steps();
        let mut z = vec![0.0f64; n];
        source.fill_normals(&mut z, method)?;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        for i in 0..n {
            let row = &self.lower[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            let v: f64 = row.iter().zip(&z).map(|(l, zj)| l * zj).sum();
            values.push(v);
        }
        Ok(FbmPath {
            grid: self.grid,
            hurst: self.hurst,
            values,
            driving_increments: None,
        })
    }
}

/// Lower Cholesky factor of a symmetric matrix given as a dense n×n slice,
/// returned packed row-major. Fails if a pivot drops below -tol, with
/// tol = 1e-12 × the largest diagonal entry.
pub(crate) fn cholesky_lower_packed(dense: &[f64], n: usize) -> Result<Vec<f64>> {
    let max_diag = (0..n).map(|i| dense[i * n + i]).fold(0.0f64, f64::max);
    let tol = 1e-12 * max_diag.max(1.0);
    let mut lower = vec![0.0f64; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = dense[i * n + j];
            for k in 0..j {
                sum -= lower[i * (i + 1) / 2 + k] * lower[j * (j + 1) / 2 + k];
            }
            if i == j {
                if sum < -tol {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: sum });
                }
                lower[i * (i + 1) / 2 + j] = sum.max(0.0).sqrt();
            } else {
                let d = lower[j * (j + 1) / 2 + j];
                lower[i * (i + 1) / 2 + j] = if d > 0.0 { sum / d } else { 0.0 };
            }
        }
    }
    Ok(lower)
}

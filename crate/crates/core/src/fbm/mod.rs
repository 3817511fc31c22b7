//! Fractional Brownian motion on a uniform time grid: covariance and
//! kernel functions plus three path-sampling schemes (exact circulant
//! embedding, exact Cholesky, and a kernel discretization that also
//! returns the driving Brownian increments).

mod cholesky;
mod davies_harte;
mod kernel;

pub use cholesky::CholeskyFbm;
pub(crate) use cholesky::cholesky_lower_packed as cholesky_lower_dense;
pub use davies_harte::{circulant_eigenvalues_for, DaviesHarte};
pub use kernel::{c_h, molchan_golosov_kernel, HybridKernelFbm};

pub use crate::special::gauss_2f1;

use crate::error::{Error, Result};
use crate::rng::{NormalMethod, RandomSource};

/// Uniform partition of [0, T] into `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "grid horizon must be positive and finite, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParam("grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Node t_k = k T / n; t_0 = 0 and t_n = T exactly.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.steps);
        self.horizon * (k as f64 / self.steps as f64)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.node(k)).collect()
    }
}

/// Hurst exponent, constrained to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstParam(f64);

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h < 1.0 && h.is_finite() {
            Ok(Self(h))
        } else {
            Err(Error::InvalidParam(format!(
                "Hurst parameter must lie in (0, 1), got {h}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// One sampled trajectory. `values[0] = 0`; `driving_increments` carries
/// the underlying Brownian increments and is present exactly when the path
/// came from the kernel scheme.
#[derive(Debug, Clone)]
pub struct FbmPath {
    pub grid: TimeGrid,
    pub hurst: HurstParam,
    pub values: Vec<f64>,
    pub driving_increments: Option<Vec<f64>>,
}

/// fBM covariance γ(s, t) = ½ (t^{2H} + s^{2H} − |t−s|^{2H}) for s, t ≥ 0.
pub fn fbm_covariance(s: f64, t: f64, hurst: HurstParam) -> f64 {
    let h2 = 2.0 * hurst.value();
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance of unit-spacing fractional Gaussian noise at lag k:
/// ½ (|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H}); equals 1 at lag 0.
pub fn fgn_autocovariance(k: usize, hurst: HurstParam) -> f64 {
    let h2 = 2.0 * hurst.value();
    if k == 0 {
        return 1.0;
    }
    let kf = k as f64;
    0.5 * ((kf + 1.0).powf(h2) - 2.0 * kf.powf(h2) + (kf - 1.0).powf(h2))
}

/// Which sampling scheme to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    DaviesHarte,
    Cholesky,
    Hybrid,
}

/// A prepared sampler: scheme-specific tables are built once and are
/// immutable afterwards, so a sampler can be shared across threads while
/// each thread drives its own substream.
#[derive(Debug)]
pub enum FbmSampler {
    DaviesHarte(DaviesHarte),
    Cholesky(CholeskyFbm),
    Hybrid(HybridKernelFbm),
}

impl FbmSampler {
    pub fn prepare(scheme: Scheme, grid: TimeGrid, hurst: HurstParam) -> Result<Self> {
        Ok(match scheme {
            Scheme::DaviesHarte => Self::DaviesHarte(DaviesHarte::new(grid, hurst)?),
            Scheme::Cholesky => Self::Cholesky(CholeskyFbm::new(grid, hurst)?),
            Scheme::Hybrid => Self::Hybrid(HybridKernelFbm::new(grid, hurst)?),
        })
    }

    pub fn sample_path(&self, source: &mut RandomSource, method: NormalMethod) -> Result<FbmPath> {
        match self {
            Self::DaviesHarte(g) => g.sample_path(source, method),
            Self::Cholesky(g) => g.sample_path(source, method),
            Self::Hybrid(g) => g.sample_path(source, method),
        }
    }

    pub fn grid(&self) -> TimeGrid {
        match self {
            Self::DaviesHarte(g) => g.grid(),
            Self::Cholesky(g) => g.grid(),
            Self::Hybrid(g) => g.grid(),
        }
    }

    pub fn hurst(&self) -> HurstParam {
        match self {
            Self::DaviesHarte(g) => g.hurst(),
            Self::Cholesky(g) => g.hurst(),
            Self::Hybrid(g) => g.hurst(),
        }
    }

    /// Exact words drawn per path under Box-Muller; `None` for the
    /// ziggurat, whose consumption is variable.
    pub fn words_per_path(&self, method: NormalMethod) -> Option<u64> {
        if method != NormalMethod::BoxMuller {
            return None;
        }
        let n = self.grid().steps();
        Some(match self {
            Self::DaviesHarte(_) => RandomSource::box_muller_words(2 * n),
            Self::Cholesky(_) | Self::Hybrid(_) => RandomSource::box_muller_words(n),
        })
    }
}

/// Samples one path by circulant embedding (sets up tables, draws, tears
/// down; prepare a [`DaviesHarte`] directly when sampling many paths).
pub fn davies_harte(grid: TimeGrid, hurst: HurstParam, source: &mut RandomSource) -> Result<FbmPath> {
    DaviesHarte::new(grid, hurst)?.sample_path(source, NormalMethod::BoxMuller)
}

/// Samples one path from the exact joint law via Cholesky factorization.
pub fn cholesky_fbm(grid: TimeGrid, hurst: HurstParam, source: &mut RandomSource) -> Result<FbmPath> {
    CholeskyFbm::new(grid, hurst)?.sample_path(source, NormalMethod::BoxMuller)
}

/// Samples one path by kernel discretization, returning the driving
/// Brownian increments alongside the fBM values.
pub fn hybrid_kernel_fbm(
    grid: TimeGrid,
    hurst: HurstParam,
    source: &mut RandomSource,
) -> Result<FbmPath> {
    HybridKernelFbm::new(grid, hurst)?.sample_path(source, NormalMethod::BoxMuller)
}

//! Molchan-Golosov kernel machinery: the normalization constant c_H, the
//! kernel itself, and the kernel-discretization path scheme that writes
//! fBM as a weighted sum of Brownian increments.
//!
//! The scheme matches second moments exactly on the sub-intervals where
//! the kernel is singular for H != 1/2 — the one adjacent to the
//! evaluation time (s -> t) and the first one (s -> 0) — and uses a
//! midpoint kernel evaluation everywhere else. A midpoint rule on either
//! singular cell would bias the path variance at the few-percent level,
//! visibly violating Var(B^H_t) = t^{2H} near the origin. The Brownian
//! increments are returned with the path so a stochastic-volatility model
//! can correlate against the same noise.

use crate::error::{Error, Result};
use crate::rng::{NormalMethod, RandomSource};
use crate::special::{adaptive_simpson, gamma, gauss_2f1};

use super::{FbmPath, HurstParam, TimeGrid};

/// Kernel normalization c_H = [2H Γ(3/2−H) / (Γ(2−2H) Γ(H+1/2))]^{1/2}.
///
/// Exactly 1 at H = 1/2 (all gamma arguments are 1).
pub fn c_h(hurst: HurstParam) -> f64 {
    let h = hurst.value();
    if h == 0.5 {
        return 1.0;
    }
    (2.0 * h * gamma(1.5 - h) / (gamma(2.0 - 2.0 * h) * gamma(h + 0.5))).sqrt()
}

/// Molchan-Golosov kernel
/// K(t, s) = c_H (t−s)^{H−1/2} F(H−1/2, 1/2−H, H+1/2; 1 − t/s) on 0 < s < t.
///
/// Returns 0 for s outside (0, t] (the indicator), and exactly 1 for
/// H = 1/2. For H < 1/2 the kernel diverges as s → t, so s = t is an error.
pub fn molchan_golosov_kernel(t: f64, s: f64, hurst: HurstParam) -> Result<f64> {
    if !(s > 0.0) || s > t {
        return Ok(0.0);
    }
    let h = hurst.value();
    if s == t {
        return match h {
            _ if h < 0.5 => Err(Error::SingularPoint),
            _ if h == 0.5 => Ok(1.0),
            _ => Ok(0.0), // (t-s)^{H-1/2} with positive exponent
        };
    }
    if h == 0.5 {
        return Ok(1.0);
    }
    let a = h - 0.5;
    let f = gauss_2f1(a, 0.5 - h, h + 0.5, 1.0 - t / s)?;
    Ok(c_h(hurst) * (t - s).powf(a) * f)
}

#[derive(Debug, Clone)]
pub struct HybridKernelFbm {
    grid: TimeGrid,
    hurst: HurstParam,
    // Packed lower-triangular weights: row k (1-based) holds k entries,
    // w[k][i] multiplying the Brownian increment of [t_i, t_{i+1}].
    weights: Vec<f64>,
    sqrt_dt: f64,
}

impl HybridKernelFbm {
    pub fn new(grid: TimeGrid, hurst: HurstParam) -> Result<Self> {
        let n = grid.steps();
        if n < 1 {
            return Err(Error::InvalidParam("kernel scheme needs n >= 1".into()));
        }
        let h = hurst.value();
        let dt = grid.dt();
        let mut weights = Vec::with_capacity(n * (n + 1) / 2);

        if h == 0.5 {
            // K ≡ 1: the path is exactly the cumulative sum of increments.
            weights.resize(n * (n + 1) / 2, 1.0);
        } else {
            let c = c_h(hurst);
            for k in 1..=n {
                let t_k = grid.node(k);
                if k == 1 {
                    // Single cell: the full-range integral is the fBM
                    // variance identity ∫_0^{t_1} K² = t_1^{2H}.
                    weights.push((t_k.powf(2.0 * h) / dt).sqrt());
                    continue;
                }
                // First sub-interval, singular at s -> 0:
                // w² Δt = ∫_0^{Δt} K(t_k, s)² ds.
                weights.push((leading_interval_second_moment(t_k, dt, hurst)? / dt).sqrt());
                for i in 1..k - 1 {
                    let mid = grid.node(i) + 0.5 * dt;
                    weights.push(molchan_golosov_kernel(t_k, mid, hurst)?);
                }
                // Adjacent sub-interval, singular at s -> t:
                // w² Δt = ∫_{t_{k-1}}^{t_k} K(t_k, s)² ds.
                let second_moment = singular_interval_second_moment(t_k, dt, hurst, c)?;
                weights.push((second_moment / dt).sqrt());
            }
        }

        Ok(Self {
            grid,
            hurst,
            weights,
            sqrt_dt: dt.sqrt(),
        })
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn hurst(&self) -> HurstParam {
        self.hurst
    }

    /// Weight row for gridpoint k (k = 1..=n), one entry per sub-interval.
    pub fn weight_row(&self, k: usize) -> &[f64] {
        debug_assert!((1..=self.grid.steps()).contains(&k));
        &self.weights[(k - 1) * k / 2..(k - 1) * k / 2 + k]
    }

    /// Draws one path; consumes n normals in increment order (Box-Muller
    /// pads odd n by one discarded draw). The returned path carries the
    /// driving increments ΔB_i ~ N(0, Δt).
    pub fn sample_path(&self, source: &mut RandomSource, method: NormalMethod) -> Result<FbmPath> {
        let n = self.grid.steps();
        let mut db = vec![0.0f64; n];
        source.fill_normals(&mut db, method)?;
        for z in db.iter_mut() {
            *z *= self.sqrt_dt;
        }
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        for k in 1..=n {
            let row = self.weight_row(k);
            let v: f64 = row.iter().zip(&db).map(|(w, b)| w * b).sum();
            values.push(v);
        }
        Ok(FbmPath {
            grid: self.grid,
            hurst: self.hurst,
            values,
            driving_increments: Some(db),
        })
    }
}

// ∫_0^{dt} K(t, s)² ds for t > dt. Near s = 0 the kernel squares to
// s^{-γ} with γ = |2H−1| in both Hurst regimes; the substitution
// s = v^{1/(1−γ)} turns that into a bounded integrand. The kernel itself
// stays cheap arbitrarily close to s = 0 thanks to the connection-formula
// branch of the hypergeometric evaluation.
fn leading_interval_second_moment(t: f64, dt: f64, hurst: HurstParam) -> Result<f64> {
    let h = hurst.value();
    let p = 1.0 - (2.0 * h - 1.0).abs();
    // Relative floor on s keeps t/s inside the f64 range; the mass below
    // s = 1e-30 t is far under the quadrature tolerance.
    let v_floor = (1e-30 * t).powf(p);
    let integrand = |v: f64| -> f64 {
        let v = v.max(v_floor);
        let s = v.powf(1.0 / p);
        let k = molchan_golosov_kernel(t, s, hurst).unwrap_or(f64::NAN);
        k * k * s / (p * v)
    };
    let upper = dt.powf(p);
    let total = adaptive_simpson(&integrand, 0.0, upper, 1e-10 * upper.max(1e-12));
    if !total.is_finite() {
        return Err(Error::NoConvergence { max_terms: 0 });
    }
    Ok(total)
}

// ∫_{t-dt}^{t} K(t, s)² ds for t > dt, split as the closed-form leading
// power plus a quadrature correction that is finite at s = t:
//   c² dt^{2H}/(2H) + ∫_0^{dt} c² u^{2H-1} (F(z(u))² − 1) du,
// with u = t − s and z(u) = −u/(t−u) small and negative on the range.
fn singular_interval_second_moment(
    t: f64,
    dt: f64,
    hurst: HurstParam,
    c: f64,
) -> Result<f64> {
    let h = hurst.value();
    let a = h - 0.5;
    let b = 0.5 - h;
    let cc = h + 0.5;
    let leading = c * c * dt.powf(2.0 * h) / (2.0 * h);
    let integrand = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let z = -u / (t - u);
        let f = gauss_2f1(a, b, cc, z).unwrap_or(f64::NAN);
        c * c * u.powf(2.0 * h - 1.0) * (f * f - 1.0)
    };
    let correction = adaptive_simpson(&integrand, 0.0, dt, 1e-10 * leading.max(1e-12));
    let total = leading + correction;
    if !total.is_finite() {
        return Err(Error::NoConvergence { max_terms: 0 });
    }
    Ok(total)
}

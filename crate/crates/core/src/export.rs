//! File formats: CSV emitters for paths, moments, error reports, scaling
//! surfaces, and price tables, plus a little-endian binary frame for fBM
//! paths (header: H as f64, n as u64, T as f64; then the n+1 values).
//!
//! All CSVs carry a header row, comma separators, UTF-8, decimal points.
//! Floats are written with Rust's shortest round-trip formatting, so a
//! reproducible run produces byte-identical files.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fbm::{FbmPath, HurstParam, TimeGrid};
use crate::hurst::{ScalingSurface, ZetaSlopes};
use crate::models::{FsabrParams, ModelPath};
use crate::pricing::{ConvergenceRow, PriceEstimate, TvoSpec};
use crate::stats::{ErrorReport, MomentEstimates};

pub fn write_fbm_path_csv<W: Write>(out: &mut W, path: &FbmPath) -> Result<()> {
    match &path.driving_increments {
        Some(db) => {
            writeln!(out, "t,value,dB")?;
            for (k, &v) in path.values.iter().enumerate() {
                let db_k = if k == 0 { 0.0 } else { db[k - 1] };
                writeln!(out, "{},{},{}", path.grid.node(k), v, db_k)?;
            }
        }
        None => {
            writeln!(out, "t,value")?;
            for (k, &v) in path.values.iter().enumerate() {
                writeln!(out, "{},{}", path.grid.node(k), v)?;
            }
        }
    }
    Ok(())
}

pub fn write_model_path_csv<W: Write>(out: &mut W, path: &ModelPath) -> Result<()> {
    match &path.fbm.driving_increments {
        Some(db) => {
            writeln!(out, "t,x,y,dB")?;
            for k in 0..=path.grid.steps() {
                let db_k = if k == 0 { 0.0 } else { db[k - 1] };
                writeln!(out, "{},{},{},{}", path.grid.node(k), path.x[k], path.y[k], db_k)?;
            }
        }
        None => {
            writeln!(out, "t,x,y")?;
            for k in 0..=path.grid.steps() {
                writeln!(out, "{},{},{}", path.grid.node(k), path.x[k], path.y[k])?;
            }
        }
    }
    Ok(())
}

pub fn write_fbm_frame<W: Write>(out: &mut W, path: &FbmPath) -> Result<()> {
    out.write_all(&path.hurst.value().to_le_bytes())?;
    out.write_all(&(path.grid.steps() as u64).to_le_bytes())?;
    out.write_all(&path.grid.horizon().to_le_bytes())?;
    for v in &path.values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_fbm_frame<R: Read>(input: &mut R) -> Result<FbmPath> {
    let mut buf8 = [0u8; 8];
    input.read_exact(&mut buf8)?;
    let h = f64::from_le_bytes(buf8);
    input.read_exact(&mut buf8)?;
    let n = u64::from_le_bytes(buf8) as usize;
    input.read_exact(&mut buf8)?;
    let horizon = f64::from_le_bytes(buf8);
    let hurst = HurstParam::new(h)?;
    let grid = TimeGrid::new(horizon, n)?;
    let mut values = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        input.read_exact(&mut buf8)?;
        values.push(f64::from_le_bytes(buf8));
    }
    if values[0] != 0.0 {
        return Err(Error::InvalidParam("frame path does not start at zero".into()));
    }
    Ok(FbmPath {
        grid,
        hurst,
        values,
        driving_increments: None,
    })
}

pub fn write_moments_csv<W: Write>(
    out: &mut W,
    moments: &MomentEstimates,
    grid: TimeGrid,
) -> Result<()> {
    writeln!(out, "k,t,mean,variance")?;
    for k in 0..moments.dim() {
        writeln!(
            out,
            "{},{},{},{}",
            k,
            grid.node(k),
            moments.mean[k],
            moments.variance[k]
        )?;
    }
    Ok(())
}

/// Covariance surface in long form: one (k, j, value) triplet per row.
pub fn write_covariance_csv<W: Write>(out: &mut W, moments: &MomentEstimates) -> Result<()> {
    writeln!(out, "k,j,value")?;
    for k in 0..moments.dim() {
        for j in 0..moments.dim() {
            writeln!(out, "{},{},{}", k, j, moments.cov(k, j))?;
        }
    }
    Ok(())
}

pub fn write_error_report_csv<W: Write>(out: &mut W, report: &ErrorReport) -> Result<()> {
    writeln!(out, "epsilon1,epsilon2,epsilon3,n_paths,hurst,horizon,steps")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        report.epsilon1,
        report.epsilon2,
        report.epsilon3,
        report.n_paths,
        report.hurst,
        report.horizon,
        report.steps
    )?;
    Ok(())
}

pub fn write_scaling_surface_csv<W: Write>(out: &mut W, surface: &ScalingSurface) -> Result<()> {
    writeln!(out, "q,delta,m")?;
    for (qi, &q) in surface.q_list.iter().enumerate() {
        for (di, &d) in surface.delta_list.iter().enumerate() {
            writeln!(out, "{},{},{}", q, d, surface.m_values[qi][di])?;
        }
    }
    Ok(())
}

pub fn write_zeta_csv<W: Write>(out: &mut W, slopes: &ZetaSlopes) -> Result<()> {
    writeln!(out, "q,zeta,r_squared")?;
    for (i, &q) in slopes.q_list.iter().enumerate() {
        writeln!(out, "{},{},{}", q, slopes.zeta[i], slopes.fits[i].r_squared)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn write_price_table_csv<W: Write>(
    out: &mut W,
    rows: &[(f64, PriceEstimate)],
    spec: &TvoSpec,
    params: &FsabrParams,
    grid: TimeGrid,
    source_label: &str,
) -> Result<()> {
    writeln!(
        out,
        "K,T,side,price,se,ci_lo,ci_hi,N,n,H,rho,nu,sigma0,sigma_bar,source_label"
    )?;
    for (strike, est) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            strike,
            spec.expiry,
            spec.side,
            est.price,
            est.std_error,
            est.ci_low,
            est.ci_high,
            est.n_paths,
            grid.steps(),
            params.hurst.value(),
            params.rho,
            params.nu,
            params.alpha0,
            spec.target_vol,
            source_label
        )?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(out: &mut W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(out, "N,price,se,ci_lo,ci_hi")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n_paths, r.price, r.std_error, r.ci_low, r.ci_high
        )?;
    }
    Ok(())
}

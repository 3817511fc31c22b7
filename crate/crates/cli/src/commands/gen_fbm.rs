//! gen-fbm: simulate an fBM ensemble with a chosen scheme, accumulate the
//! per-gridpoint moments and covariance surface, and report the RMSE
//! errors against the exact law. Optionally dumps the first few sample
//! paths as CSV plus binary frames.

use std::path::Path;

use clap::Args;
use fracmc::export;
use fracmc::fbm::{FbmSampler, HurstParam, Scheme, TimeGrid};
use fracmc::stats;
use fracmc::{Error, Result};

use crate::config::Config;
use crate::manifest::Manifest;
use crate::source::SourceArgs;

use super::{emit, to_json_writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemeArg {
    DaviesHarte,
    Cholesky,
    Hybrid,
}

#[derive(Debug, Args)]
pub struct GenFbmArgs {
    /// Hurst parameter in (0, 1)
    #[arg(short = 'H', long, alias = "H")]
    pub hurst: Option<f64>,

    /// Horizon T in years
    #[arg(short = 'T', long, alias = "T")]
    pub horizon: Option<f64>,

    /// Number of grid steps n
    #[arg(short = 'n', long, alias = "n")]
    pub steps: Option<usize>,

    /// Number of Monte Carlo paths N
    #[arg(short = 'N', long, alias = "N")]
    pub paths: Option<usize>,

    /// Sampling scheme
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,

    /// Also write the first K sample paths (CSV + binary frame)
    #[arg(long, value_name = "K")]
    pub write_paths: Option<usize>,

    #[command(flatten)]
    pub source: SourceArgs,
}

pub fn run(args: &GenFbmArgs, cfg: &Config, out_dir: &Path) -> Result<()> {
    let mut manifest = Manifest::new(out_dir, "gen-fbm");

    let hurst = HurstParam::new(cfg.resolve_required(args.hurst, "hurst")?)?;
    let horizon: f64 = cfg.resolve(args.horizon, "horizon", 1.0)?;
    let steps: usize = cfg.resolve(args.steps, "steps", 252)?;
    let n_paths: usize = cfg.resolve(args.paths, "paths", 10_000)?;
    let scheme_name: String = cfg.resolve(
        args.scheme.map(|s| scheme_key(s).to_string()),
        "scheme",
        "davies-harte".to_string(),
    )?;
    let scheme = parse_scheme(&scheme_name)?;
    let write_paths: usize = cfg.resolve(args.write_paths, "write-paths", 0)?;

    manifest.record("hurst", hurst.value());
    manifest.record("horizon", horizon);
    manifest.record("steps", steps);
    manifest.record("paths", n_paths);
    manifest.record("scheme", &scheme_name);
    manifest.record("write-paths", write_paths);

    let grid = TimeGrid::new(horizon, steps)?;
    let sampler = FbmSampler::prepare(scheme, grid, hurst)?;
    let method = args.source.normal_method(cfg, &mut manifest)?;
    let min_words = sampler
        .words_per_path(method)
        .map(|w| w * n_paths as u64)
        .unwrap_or(0);
    let source = args.source.build(cfg, min_words, &mut manifest)?;
    if let (Some(remaining), Some(per_path)) =
        (source.words_remaining(), sampler.words_per_path(method))
    {
        let needed = per_path * n_paths as u64;
        if remaining < needed {
            return Err(Error::Exhausted {
                requested: needed,
                remaining,
            });
        }
    }

    let moments = stats::simulate_moments(&sampler, &source, n_paths, method)?;
    let report = stats::rmse_errors(&moments, hurst, grid, n_paths);

    emit(out_dir, "moments.csv", &mut manifest, |w| {
        export::write_moments_csv(w, &moments, grid)
    })?;
    emit(out_dir, "covariance.csv", &mut manifest, |w| {
        export::write_covariance_csv(w, &moments)
    })?;
    emit(out_dir, "errors.csv", &mut manifest, |w| {
        export::write_error_report_csv(w, &report)
    })?;
    emit(out_dir, "errors.json", &mut manifest, |w| {
        to_json_writer(w, &report)
    })?;

    // Sample paths replay the exact substreams the ensemble used.
    for i in 0..write_paths.min(n_paths) {
        let mut sub = source.substream(i, n_paths)?;
        let path = sampler.sample_path(&mut sub, method)?;
        emit(out_dir, &format!("path_{i:04}.csv"), &mut manifest, |w| {
            export::write_fbm_path_csv(w, &path)
        })?;
        emit(out_dir, &format!("path_{i:04}.fbm"), &mut manifest, |w| {
            export::write_fbm_frame(w, &path)
        })?;
    }

    manifest.write()?;
    println!(
        "gen-fbm: N = {n_paths}, eps1 = {:.6}, eps2 = {:.6}, eps3 = {:.6}",
        report.epsilon1, report.epsilon2, report.epsilon3
    );
    Ok(())
}

fn scheme_key(s: SchemeArg) -> &'static str {
    match s {
        SchemeArg::DaviesHarte => "davies-harte",
        SchemeArg::Cholesky => "cholesky",
        SchemeArg::Hybrid => "hybrid",
    }
}

fn parse_scheme(name: &str) -> Result<Scheme> {
    match name {
        "davies-harte" => Ok(Scheme::DaviesHarte),
        "cholesky" => Ok(Scheme::Cholesky),
        "hybrid" => Ok(Scheme::Hybrid),
        other => Err(Error::InvalidParam(format!(
            "unknown scheme '{other}' (expected davies-harte, cholesky, or hybrid)"
        ))),
    }
}

//! realized-var: trailing realized volatility from a daily-close CSV,
//! one row per window aligned to the window's end date.

use std::path::{Path, PathBuf};

use clap::Args;
use fracmc::stats::{load_price_csv, rolling_realized_vol};
use fracmc::Result;

use crate::config::Config;
use crate::manifest::Manifest;

use super::emit;

#[derive(Debug, Args)]
pub struct RealizedVarArgs {
    /// Price CSV with `date` and `close` columns
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Returns per window
    #[arg(long)]
    pub window: Option<usize>,

    /// Annualization factor
    #[arg(long)]
    pub af: Option<f64>,
}

pub fn run(args: &RealizedVarArgs, cfg: &Config, out_dir: &Path) -> Result<()> {
    let mut manifest = Manifest::new(out_dir, "realized-var");
    let input: PathBuf = cfg.resolve_required(args.input.clone(), "input")?;
    let window: usize = cfg.resolve(args.window, "window", 21)?;
    let af: f64 = cfg.resolve(args.af, "af", 252.0)?;
    manifest.record("input", input.display());
    manifest.record("window", window);
    manifest.record("af", af);

    let mut series = load_price_csv(&input)?;
    series.annualization = af;
    let vols = rolling_realized_vol(&series, window)?;

    emit(out_dir, "realized_vol.csv", &mut manifest, |w| {
        use std::io::Write;
        writeln!(w, "date,vol")?;
        for (i, v) in vols.iter().enumerate() {
            writeln!(w, "{},{}", series.dates[i + window], v)?;
        }
        Ok(())
    })?;

    manifest.write()?;
    println!(
        "realized-var: {} windows of {} returns, AF = {}",
        vols.len(),
        window,
        af
    );
    Ok(())
}

//! price-tvo: Monte Carlo prices for target-volatility calls or puts
//! under fSABR, over one strike or a strike sweep with common random
//! numbers, with an optional nested convergence trace. When ν = 0 the
//! run also emits the Black-Scholes oracle comparison with z-scores.

use std::path::Path;

use clap::Args;
use fracmc::export;
use fracmc::fbm::{HurstParam, TimeGrid};
use fracmc::models::FsabrParams;
use fracmc::pricing::{
    black_scholes_call, convergence_study, strike_sweep, OptionSide, TvoSpec,
};
use fracmc::rng::RandomSource;
use fracmc::{Error, Result};

use crate::config::Config;
use crate::manifest::Manifest;
use crate::source::SourceArgs;

use super::{emit, parse_list};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SideArg {
    Call,
    Put,
}

#[derive(Debug, Args)]
pub struct PriceTvoArgs {
    /// Spot S0
    #[arg(long)]
    pub s0: Option<f64>,

    /// Initial volatility α0
    #[arg(long)]
    pub alpha0: Option<f64>,

    /// Vol-of-vol ν
    #[arg(long)]
    pub nu: Option<f64>,

    /// Spot/vol correlation ρ
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,

    /// Hurst parameter of the volatility driver
    #[arg(short = 'H', long, alias = "H")]
    pub hurst: Option<f64>,

    /// Expiry T in years (the grid horizon)
    #[arg(short = 'T', long, alias = "T")]
    pub horizon: Option<f64>,

    /// Grid steps n
    #[arg(short = 'n', long, alias = "n")]
    pub steps: Option<usize>,

    /// Monte Carlo paths N
    #[arg(short = 'N', long, alias = "N")]
    pub paths: Option<usize>,

    /// Single strike K
    #[arg(long)]
    pub strike: Option<f64>,

    /// Strike sweep lo:hi:count (overrides --strike)
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub strike_range: Option<String>,

    /// Target volatility σ̄
    #[arg(long)]
    pub target_vol: Option<f64>,

    /// Option side
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,

    /// Emit a nested convergence trace at these path counts
    #[arg(long, value_name = "N1,N2,...")]
    pub convergence: Option<String>,

    #[command(flatten)]
    pub source: SourceArgs,
}

pub fn run(args: &PriceTvoArgs, cfg: &Config, out_dir: &Path) -> Result<()> {
    let mut manifest = Manifest::new(out_dir, "price-tvo");

    let s0: f64 = cfg.resolve(args.s0, "s0", 1.0)?;
    let alpha0: f64 = cfg.resolve_required(args.alpha0, "alpha0")?;
    let nu: f64 = cfg.resolve(args.nu, "nu", 0.0)?;
    let rho: f64 = cfg.resolve(args.rho, "rho", 0.0)?;
    let hurst = HurstParam::new(cfg.resolve_required(args.hurst, "hurst")?)?;
    let horizon: f64 = cfg.resolve(args.horizon, "horizon", 0.5)?;
    let steps: usize = cfg.resolve(args.steps, "steps", 500)?;
    let n_paths: usize = cfg.resolve(args.paths, "paths", 10_000)?;
    let target_vol: f64 = cfg.resolve_required(args.target_vol, "target-vol")?;
    let side = match cfg.resolve(
        args.side.map(|s| match s {
            SideArg::Call => "call".to_string(),
            SideArg::Put => "put".to_string(),
        }),
        "side",
        "call".to_string(),
    )? {
        s if s == "call" => OptionSide::Call,
        s if s == "put" => OptionSide::Put,
        s => {
            return Err(Error::InvalidParam(format!(
                "unknown side '{s}' (expected call or put)"
            )))
        }
    };

    let strikes: Vec<f64> = match cfg.resolve_opt(args.strike_range.clone(), "strike-range")? {
        Some(raw) => parse_strike_range(&raw)?,
        None => vec![cfg.resolve(args.strike, "strike", s0)?],
    };

    manifest.record("s0", s0);
    manifest.record("alpha0", alpha0);
    manifest.record("nu", nu);
    manifest.record("rho", rho);
    manifest.record("hurst", hurst.value());
    manifest.record("horizon", horizon);
    manifest.record("steps", steps);
    manifest.record("paths", n_paths);
    manifest.record("target-vol", target_vol);
    manifest.record("side", side);
    manifest.record(
        "strikes",
        strikes
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    let params = FsabrParams::new(s0, alpha0, nu, rho, hurst)?;
    let grid = TimeGrid::new(horizon, steps)?;
    let template = TvoSpec::new(strikes[0], horizon, target_vol, side)?;

    // Each fSABR path draws n normals for the fBM driver and n for the
    // orthogonal component: 2n words per path under Box-Muller.
    let words_needed = 2 * RandomSource::box_muller_words(steps) * n_paths as u64;
    let source = args.source.build(cfg, words_needed, &mut manifest)?;

    let table = strike_sweep(&params, &template, &strikes, grid, n_paths, &source)?;
    emit(out_dir, "prices.csv", &mut manifest, |w| {
        export::write_price_table_csv(w, &table, &template, &params, grid, source.label())
    })?;

    // Constant-volatility limit: compare against the scaled Black-Scholes
    // closed form.
    if nu == 0.0 {
        emit(out_dir, "oracle.csv", &mut manifest, |w| {
            use std::io::Write;
            writeln!(w, "K,price,se,bs_price,z_score")?;
            for (k, est) in &table {
                let scaled_bs = match side {
                    OptionSide::Call => {
                        target_vol / alpha0 * black_scholes_call(s0, *k, alpha0, horizon)
                    }
                    OptionSide::Put => {
                        // Put-call parity at zero rate: put = call − S0 + K.
                        alpha0 / target_vol
                            * (black_scholes_call(s0, *k, alpha0, horizon) - s0 + k)
                    }
                };
                let z = (est.price - scaled_bs) / est.std_error;
                writeln!(w, "{},{},{},{},{}", k, est.price, est.std_error, scaled_bs, z)?;
            }
            Ok(())
        })?;
    }

    if let Some(raw) = cfg.resolve_opt(args.convergence.clone(), "convergence")? {
        let n_list = parse_list::<usize>(&raw, "convergence")?;
        manifest.record("convergence", &raw);
        let rows = convergence_study(&params, &template, grid, &n_list, &source)?;
        emit(out_dir, "convergence.csv", &mut manifest, |w| {
            export::write_convergence_csv(w, &rows)
        })?;
    }

    manifest.write()?;
    let (k0, first) = &table[0];
    println!(
        "price-tvo: {} K = {k0} -> {:.6} ± {:.6} ({} strikes, N = {n_paths})",
        side, first.price, first.std_error,
        table.len()
    );
    Ok(())
}

fn parse_strike_range(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParam(format!(
            "strike range must be LO:HI:COUNT, got '{raw}'"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad strike-range low '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad strike-range high '{}'", parts[1])))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad strike-range count '{}'", parts[2])))?;
    if count < 2 || !(hi > lo) || !(lo > 0.0) {
        return Err(Error::InvalidParam(format!(
            "strike range needs 0 < LO < HI and COUNT >= 2, got '{raw}'"
        )));
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}

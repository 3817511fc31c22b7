//! Randomness-source selection shared by every command: a seed for the
//! deterministic generator or a path to a raw entropy file, never both.

use std::path::PathBuf;

use fracmc::rng::{NormalMethod, RandomSource};
use fracmc::{Error, Result};

use crate::config::Config;
use crate::manifest::Manifest;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, clap::Args)]
pub struct SourceArgs {
    /// Seed for the deterministic generator
    #[arg(long)]
    pub seed: Option<u64>,

    /// Raw entropy file (32-bit little-endian words, no header)
    #[arg(long, value_name = "FILE")]
    pub entropy: Option<PathBuf>,

    /// Uniform-to-normal transform: box-muller has an exact word budget,
    /// ziggurat a variable one
    #[arg(long, value_enum)]
    pub normal_method: Option<NormalMethodArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NormalMethodArg {
    BoxMuller,
    Ziggurat,
}

impl SourceArgs {
    /// Builds the source, recording the resolved choice in the manifest.
    /// `min_words` is the precomputed word budget for entropy files.
    pub fn build(&self, cfg: &Config, min_words: u64, manifest: &mut Manifest) -> Result<RandomSource> {
        let entropy = cfg.resolve_opt(self.entropy.clone(), "entropy")?;
        let seed_flag = cfg.resolve_opt(self.seed, "seed")?;
        if entropy.is_some() && seed_flag.is_some() {
            return Err(Error::InvalidParam(
                "--seed and --entropy are mutually exclusive".into(),
            ));
        }
        match entropy {
            Some(path) => {
                manifest.record("entropy", path.display());
                manifest.record("entropy-min-words", min_words);
                RandomSource::open_entropy_file(&path, min_words)
            }
            None => {
                let seed = seed_flag.unwrap_or(DEFAULT_SEED);
                manifest.record("seed", seed);
                Ok(RandomSource::pseudo(seed))
            }
        }
    }

    pub fn normal_method(&self, cfg: &Config, manifest: &mut Manifest) -> Result<NormalMethod> {
        let raw: Option<String> = cfg.resolve_opt(
            self.normal_method.map(|m| match m {
                NormalMethodArg::BoxMuller => "box-muller".to_string(),
                NormalMethodArg::Ziggurat => "ziggurat".to_string(),
            }),
            "normal-method",
        )?;
        let method = match raw.as_deref() {
            None | Some("box-muller") => NormalMethod::BoxMuller,
            Some("ziggurat") => NormalMethod::Ziggurat,
            Some(other) => {
                return Err(Error::InvalidParam(format!(
                    "unknown normal method '{other}' (expected box-muller or ziggurat)"
                )))
            }
        };
        manifest.record(
            "normal-method",
            match method {
                NormalMethod::BoxMuller => "box-muller",
                NormalMethod::Ziggurat => "ziggurat",
            },
        );
        Ok(method)
    }
}

//! rand-check: the built-in sanity battery (monobit, runs, byte
//! chi-square) over a seeded generator or an entropy file, plus raw-word
//! export in the identical binary format for external NIST/Dieharder
//! runs. Export always starts at the beginning of the stream, so for an
//! entropy file the exported bytes are a bit-exact prefix of the input.

use std::path::{Path, PathBuf};

use clap::Args;
use fracmc::rng::rand_check;
use fracmc::Result;

use crate::config::Config;
use crate::manifest::Manifest;
use crate::source::SourceArgs;

use super::{emit, to_json_writer};

#[derive(Debug, Args)]
pub struct RandCheckArgs {
    /// Words to feed the battery
    #[arg(long)]
    pub words: Option<u64>,

    /// Also export raw words to this file (inside the output directory)
    #[arg(long, value_name = "FILE")]
    pub export: Option<PathBuf>,

    /// How many words to export
    #[arg(long)]
    pub export_words: Option<u64>,

    #[command(flatten)]
    pub source: SourceArgs,
}

/// Returns whether the battery passed.
pub fn run(args: &RandCheckArgs, cfg: &Config, out_dir: &Path) -> Result<bool> {
    let mut manifest = Manifest::new(out_dir, "rand-check");
    let words: u64 = cfg.resolve(args.words, "words", 1_000_000)?;
    let export_words: u64 = cfg.resolve(args.export_words, "export-words", 1_000_000)?;
    let export: Option<PathBuf> = cfg.resolve_opt(args.export.clone(), "export")?;
    manifest.record("words", words);

    let min_words = words.max(if export.is_some() { export_words } else { 0 });
    let mut source = args.source.build(cfg, min_words, &mut manifest)?;
    let report = rand_check(&mut source, words)?;

    emit(out_dir, "report.json", &mut manifest, |w| {
        to_json_writer(w, &report)
    })?;

    if let Some(name) = export {
        manifest.record("export-words", export_words);
        // A fresh source from the same origin: the exported words are the
        // first words of the stream, independent of what the battery read.
        let mut fresh = args.source.build(cfg, export_words, &mut Manifest::new(out_dir, "x"))?;
        let file_name = name
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "words.bin".to_string());
        emit(out_dir, &file_name, &mut manifest, |w| {
            fresh.export_words(w, export_words)
        })?;
    }

    manifest.write()?;
    println!(
        "rand-check: monobit p = {:.4}, runs p = {:.4}, byte chi-square p = {:.4} -> {}",
        report.monobit_p,
        report.runs_p,
        report.byte_chi_square_p,
        if report.all_pass { "PASS" } else { "FAIL" }
    );
    Ok(report.all_pass)
}

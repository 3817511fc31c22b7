pub mod estimate_hurst;
pub mod gen_fbm;
pub mod price_tvo;
pub mod rand_check;
pub mod realized_var;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use fracmc::Result;

use crate::manifest::Manifest;

/// Writes one artifact through a buffered writer and registers it in the
/// manifest.
pub fn emit<F>(out_dir: &Path, name: &str, manifest: &mut Manifest, write: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = out_dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    write(&mut w)?;
    use std::io::Write;
    w.flush()?;
    drop(w);
    manifest.add_output(&path)?;
    Ok(path)
}

pub fn to_json_writer<T: serde::Serialize>(
    w: &mut BufWriter<File>,
    value: &T,
) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(std::io::Error::other)?;
    use std::io::Write;
    w.write_all(b"\n")?;
    Ok(())
}

/// Parses a comma-separated list of numbers.
pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| {
            s.trim().parse::<T>().map_err(|_| {
                fracmc::Error::InvalidParam(format!("cannot parse '{s}' in {what} list"))
            })
        })
        .collect()
}

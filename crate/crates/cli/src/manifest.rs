//! Run manifest: the fully resolved configuration plus a checksum per
//! artifact, written alongside the outputs. No timestamps, so rerunning a
//! command with the same inputs reproduces the manifest byte for byte.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use fracmc::Result;
use serde::Serialize;

#[derive(Debug, Serialize)]
struct OutputEntry {
    file: String,
    bytes: u64,
    fnv64: String,
}

#[derive(Debug, Serialize)]
struct ManifestDoc {
    command: String,
    config: BTreeMap<String, String>,
    outputs: Vec<OutputEntry>,
}

pub struct Manifest {
    out_dir: PathBuf,
    doc: ManifestDoc,
}

impl Manifest {
    pub fn new(out_dir: &Path, command: &str) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            doc: ManifestDoc {
                command: command.to_string(),
                config: BTreeMap::new(),
                outputs: Vec::new(),
            },
        }
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.doc.config.insert(key.to_string(), value.to_string());
    }

    /// Registers a finished artifact, hashing its bytes.
    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        let mut file = File::open(path)?;
        let mut hasher = Fnv64::new();
        let mut buf = [0u8; 8192];
        let mut total = 0u64;
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
            total += n as u64;
        }
        self.doc.outputs.push(OutputEntry {
            file: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            bytes: total,
            fnv64: format!("{:016x}", hasher.finish()),
        });
        Ok(())
    }

    pub fn write(self) -> Result<PathBuf> {
        let path = self.out_dir.join("manifest.json");
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &self.doc)
            .map_err(std::io::Error::other)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }
}

// FNV-1a, 64-bit.
struct Fnv64(u64);

impl Fnv64 {
    fn new() -> Self {
        Self(0xcbf29ce484222325)
    }

    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

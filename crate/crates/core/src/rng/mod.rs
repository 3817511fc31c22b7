//! Uniform and normal variate supply from either a seeded deterministic
//! generator or a raw entropy file, with substream partitioning for
//! parallel consumers.
//!
//! A [`RandomSource`] is single-consumer; parallelism goes exclusively
//! through [`RandomSource::substream`], whose outputs may be consumed on
//! different threads. Pseudo sources are fully reproducible from the seed.
//! Entropy sources never re-read a consumed word and never fall back to
//! pseudo randomness: exhaustion is a hard error, so a source-comparison
//! experiment cannot silently change its randomness supply.

mod entropy;
mod pcg;
mod sanity;
mod ziggurat;

pub use entropy::EntropyReader;
pub use pcg::Pcg32;
pub use sanity::{rand_check, SanityReport, SIGNIFICANCE};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// How uniform words are turned into standard normals.
///
/// Box-Muller consumes exactly two words per pair of normals, which makes
/// entropy budgeting exact; the ziggurat consumes a variable number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalMethod {
    BoxMuller,
    Ziggurat,
}

#[derive(Debug)]
enum Kind {
    Pseudo { seed: u64, gen: Pcg32 },
    Entropy(EntropyReader),
}

/// A supplier of uniform 32-bit words.
#[derive(Debug)]
pub struct RandomSource {
    kind: Kind,
}

/// Maps a 32-bit word to the open interval (0, 1): (w + 1/2) / 2³².
///
/// Neither endpoint is reachable, so logs and Box-Muller never see 0 or 1.
#[inline]
pub fn word_to_open_unit(w: u32) -> f64 {
    (w as f64 + 0.5) / 4294967296.0
}

/// Box-Muller transform: two uniforms in (0,1) to two independent
/// standard normals.
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

impl RandomSource {
    /// Deterministic source: same seed, identical word sequence.
    pub fn pseudo(seed: u64) -> Self {
        Self {
            kind: Kind::Pseudo {
                seed,
                gen: Pcg32::new(seed),
            },
        }
    }

    /// Opens a raw entropy file: 4 bytes per 32-bit word, little-endian,
    /// no header. Fails with `TruncatedWord` if the byte length is not a
    /// multiple of 4, `FileTooShort` if fewer than `expected_min_words`
    /// words are present.
    pub fn open_entropy_file(path: &Path, expected_min_words: u64) -> Result<Self> {
        Ok(Self {
            kind: Kind::Entropy(EntropyReader::open(path, expected_min_words)?),
        })
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            Kind::Pseudo { .. } => "pseudo",
            Kind::Entropy(_) => "entropy",
        }
    }

    pub fn is_entropy(&self) -> bool {
        matches!(self.kind, Kind::Entropy(_))
    }

    /// Words left before exhaustion; `None` for pseudo sources.
    pub fn words_remaining(&self) -> Option<u64> {
        match &self.kind {
            Kind::Pseudo { .. } => None,
            Kind::Entropy(r) => Some(r.words_remaining()),
        }
    }

    #[inline]
    pub fn next_word(&mut self) -> Result<u32> {
        match &mut self.kind {
            Kind::Pseudo { gen, .. } => Ok(gen.next_u32()),
            Kind::Entropy(r) => r.next_word(),
        }
    }

    /// Next uniform in the open interval (0, 1).
    #[inline]
    pub fn next_uniform(&mut self) -> Result<f64> {
        Ok(word_to_open_unit(self.next_word()?))
    }

    /// Two independent standard normals via Box-Muller; consumes exactly
    /// two words.
    #[inline]
    pub fn normal_pair(&mut self) -> Result<(f64, f64)> {
        let u1 = self.next_uniform()?;
        let u2 = self.next_uniform()?;
        Ok(box_muller(u1, u2))
    }

    /// One standard normal via the 256-layer ziggurat; consumes a variable
    /// number of words.
    pub fn ziggurat_normal(&mut self) -> Result<f64> {
        ziggurat::sample(self)
    }

    /// Fills `out` with standard normals. With Box-Muller an odd-length
    /// fill consumes one extra normal (the spare of the last pair is
    /// discarded, never cached across calls), so the word consumption of a
    /// fill is a function of its length alone.
    pub fn fill_normals(&mut self, out: &mut [f64], method: NormalMethod) -> Result<()> {
        match method {
            NormalMethod::BoxMuller => {
                let mut chunks = out.chunks_exact_mut(2);
                for pair in &mut chunks {
                    let (z1, z2) = self.normal_pair()?;
                    pair[0] = z1;
                    pair[1] = z2;
                }
                if let [last] = chunks.into_remainder() {
                    *last = self.normal_pair()?.0;
                }
            }
            NormalMethod::Ziggurat => {
                for z in out.iter_mut() {
                    *z = self.ziggurat_normal()?;
                }
            }
        }
        Ok(())
    }

    /// Words consumed by `fill_normals(len, BoxMuller)`.
    pub fn box_muller_words(len: usize) -> u64 {
        2 * len.div_ceil(2) as u64
    }

    /// Splits off the substream for `worker_index` of `workers`.
    ///
    /// Pseudo: an independently seeded stream derived from the base seed
    /// and the worker index. Entropy: the contiguous block
    /// `[k*floor(W/workers), (k+1)*floor(W/workers))` of the words remaining
    /// at the current cursor, so blocks of distinct workers are pairwise
    /// disjoint. With a single worker the substream is the parent stream.
    pub fn substream(&self, worker_index: usize, workers: usize) -> Result<RandomSource> {
        if workers == 0 || worker_index >= workers {
            return Err(Error::InvalidParam(format!(
                "worker index {worker_index} out of range for {workers} workers"
            )));
        }
        match &self.kind {
            Kind::Pseudo { seed, gen } => {
                if workers == 1 {
                    return Ok(Self {
                        kind: Kind::Pseudo {
                            seed: *seed,
                            gen: gen.clone(),
                        },
                    });
                }
                let h1 = pcg::splitmix_mix(
                    seed.wrapping_add((worker_index as u64).wrapping_mul(0x9E3779B97F4A7C15)),
                );
                let h2 = pcg::splitmix_mix(h1);
                Ok(Self {
                    kind: Kind::Pseudo {
                        seed: h1,
                        gen: Pcg32::with_stream(h1, h2 >> 1),
                    },
                })
            }
            Kind::Entropy(r) => {
                let block = r.words_remaining() / workers as u64;
                if block == 0 {
                    return Err(Error::Exhausted {
                        requested: 1,
                        remaining: 0,
                    });
                }
                let start = r.cursor() + worker_index as u64 * block;
                Ok(Self {
                    kind: Kind::Entropy(r.reopen_range(start, start + block)?),
                })
            }
        }
    }

    /// Writes the next `count` words in the identical raw little-endian
    /// format, for feeding external test suites. For entropy sources this
    /// is a bit-exact pass-through of the file bytes.
    pub fn export_words<W: Write>(&mut self, out: &mut W, count: u64) -> Result<()> {
        match &mut self.kind {
            Kind::Pseudo { gen, .. } => {
                for _ in 0..count {
                    out.write_all(&gen.next_u32().to_le_bytes())?;
                }
                Ok(())
            }
            Kind::Entropy(r) => r.export_words(out, count),
        }
    }
}

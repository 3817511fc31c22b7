//! File-backed entropy source: a raw stream of 32-bit little-endian words,
//! 4 bytes per word, no header or framing.
//!
//! A reader owns a half-open word range [next, end) of the file. Words are
//! never re-read; exhaustion is an error, not a wraparound.

use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct EntropyReader {
    path: PathBuf,
    file: BufReader<File>,
    next_word: u64,
    end_word: u64,
}

impl EntropyReader {
    /// Opens `path` over its full word range. The byte length must be a
    /// multiple of 4 and hold at least `expected_min_words` words.
    pub fn open(path: &Path, expected_min_words: u64) -> Result<Self> {
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        if len % 4 != 0 {
            return Err(Error::TruncatedWord { len });
        }
        let words = len / 4;
        if words < expected_min_words {
            return Err(Error::FileTooShort {
                found: words,
                needed: expected_min_words,
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            file: BufReader::new(file),
            next_word: 0,
            end_word: words,
        })
    }

    /// Reopens the same file over the word range [start, end).
    pub fn reopen_range(&self, start: u64, end: u64) -> Result<Self> {
        debug_assert!(start <= end && end <= self.end_word);
        let file = File::open(&self.path)?;
        let mut reader = BufReader::new(file);
        reader.seek(SeekFrom::Start(start * 4))?;
        Ok(Self {
            path: self.path.clone(),
            file: reader,
            next_word: start,
            end_word: end,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn cursor(&self) -> u64 {
        self.next_word
    }

    pub fn words_remaining(&self) -> u64 {
        self.end_word - self.next_word
    }

    pub fn next_word(&mut self) -> Result<u32> {
        if self.next_word >= self.end_word {
            return Err(Error::Exhausted {
                requested: 1,
                remaining: 0,
            });
        }
        let mut buf = [0u8; 4];
        self.file.read_exact(&mut buf)?;
        self.next_word += 1;
        Ok(u32::from_le_bytes(buf))
    }

    /// Copies the next `count` words to `out` in the identical raw format.
    /// Bit-exact pass-through: the bytes written equal the bytes read.
    pub fn export_words<W: Write>(&mut self, out: &mut W, count: u64) -> Result<()> {
        let remaining = self.words_remaining();
        if count > remaining {
            return Err(Error::Exhausted {
                requested: count,
                remaining,
            });
        }
        let mut left = count * 4;
        let mut buf = [0u8; 8192];
        while left > 0 {
            let take = (buf.len() as u64).min(left) as usize;
            self.file.read_exact(&mut buf[..take])?;
            out.write_all(&buf[..take])?;
            left -= take as u64;
        }
        self.next_word += count;
        Ok(())
    }
}

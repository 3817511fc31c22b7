//! Lightweight randomness sanity battery: monobit frequency, runs test,
//! and byte-frequency chi-square, each reported as a p-value and flagged
//! at significance 0.01.
//!
//! This is a quick in-process screen, not a replacement for the external
//! NIST or Dieharder suites; raw words can be exported bit-exactly for
//! those (see [`RandomSource::export_words`]).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{chi_square_sf, erfc};

use super::RandomSource;

pub const SIGNIFICANCE: f64 = 0.01;
const MIN_WORDS: u64 = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct SanityReport {
    pub words_tested: u64,
    pub significance: f64,
    pub monobit_p: f64,
    pub runs_p: f64,
    pub byte_chi_square_p: f64,
    pub monobit_pass: bool,
    pub runs_pass: bool,
    pub byte_pass: bool,
    pub all_pass: bool,
}

/// Runs the battery on the next `words` 32-bit words of `source`.
pub fn rand_check(source: &mut RandomSource, words: u64) -> Result<SanityReport> {
    if words < MIN_WORDS {
        return Err(Error::InvalidParam(format!(
            "rand_check needs at least {MIN_WORDS} words, got {words}"
        )));
    }

    let mut ones: u64 = 0;
    let mut transitions: u64 = 0;
    let mut byte_counts = [0u64; 256];
    let mut prev_msb: Option<u32> = None;

    for _ in 0..words {
        let w = source.next_word()?;
        ones += w.count_ones() as u64;
        // Bit order is LSB first within a word; adjacent-bit transitions
        // inside the word, plus the junction with the previous word's MSB.
        transitions += ((w ^ (w >> 1)) & 0x7FFF_FFFF).count_ones() as u64;
        if let Some(msb) = prev_msb {
            if msb != (w & 1) {
                transitions += 1;
            }
        }
        prev_msb = Some(w >> 31);
        for b in w.to_le_bytes() {
            byte_counts[b as usize] += 1;
        }
    }

    let n_bits = (words * 32) as f64;

    // Monobit frequency: S = #ones - #zeros, p = erfc(|S|/sqrt(2 n)).
    let s = 2.0 * ones as f64 - n_bits;
    let monobit_p = erfc(s.abs() / (2.0 * n_bits).sqrt());

    // Runs test; degenerate proportions make the test inapplicable and fail.
    let pi = ones as f64 / n_bits;
    let runs_p = if (pi - 0.5).abs() >= 2.0 / n_bits.sqrt() {
        0.0
    } else {
        let v = transitions as f64 + 1.0;
        let expected = 2.0 * n_bits * pi * (1.0 - pi);
        erfc((v - expected).abs() / (2.0 * (2.0 * n_bits).sqrt() * pi * (1.0 - pi)))
    };

    // Byte-frequency chi-square, 256 cells.
    let total_bytes = (words * 4) as f64;
    let expected = total_bytes / 256.0;
    let chi2: f64 = byte_counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let byte_chi_square_p = chi_square_sf(255.0, chi2);

    let monobit_pass = monobit_p > SIGNIFICANCE;
    let runs_pass = runs_p > SIGNIFICANCE;
    let byte_pass = byte_chi_square_p > SIGNIFICANCE;
    Ok(SanityReport {
        words_tested: words,
        significance: SIGNIFICANCE,
        monobit_p,
        runs_p,
        byte_chi_square_p,
        monobit_pass,
        runs_pass,
        byte_pass,
        all_pass: monobit_pass && runs_pass && byte_pass,
    })
}

//! Ziggurat sampler for the standard normal, 256 layers.
//!
//! Tables are computed once at startup from the normal density: only the
//! published rightmost-edge constant R for 256 layers is hardcoded; the
//! common layer area V and the layer edges follow from f(x) = exp(-x²/2)
//! and the normal tail mass.
//!
//! Each attempt consumes two words (one for layer index and sign, one for
//! the magnitude uniform); wedge and tail rejections consume more, so the
//! total word count per variate is variable.

use std::sync::OnceLock;

use crate::error::Result;
use crate::special::erfc;

use super::RandomSource;

const LAYERS: usize = 256;
// Published rightmost edge for a 256-layer normal ziggurat, kept at its
// published precision.
#[allow(clippy::excessive_precision)]
const ZIG_R: f64 = 3.654152885361008772;

struct ZigTables {
    // x[0] = V/f(R) pseudo-width, x[1] = R, strictly decreasing, x[256] = 0.
    x: [f64; LAYERS + 1],
    // f[i] = exp(-x[i]²/2), increasing, f[256] = 1.
    f: [f64; LAYERS + 1],
}

fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

fn build_tables() -> ZigTables {
    let f_r = density(ZIG_R);
    let tail = (std::f64::consts::PI / 2.0).sqrt() * erfc(ZIG_R / std::f64::consts::SQRT_2);
    let v = ZIG_R * f_r + tail;

    let mut x = [0.0f64; LAYERS + 1];
    let mut f = [0.0f64; LAYERS + 1];
    x[0] = v / f_r;
    x[1] = ZIG_R;
    for i in 2..LAYERS {
        let prev = x[i - 1];
        let arg = density(prev) + v / prev;
        debug_assert!(arg < 1.0, "ziggurat recursion left the density range");
        x[i] = (-2.0 * arg.ln()).sqrt();
    }
    x[LAYERS] = 0.0;
    for i in 0..=LAYERS {
        f[i] = density(x[i]);
    }
    ZigTables { x, f }
}

fn tables() -> &'static ZigTables {
    static TABLES: OnceLock<ZigTables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

/// Draws one standard normal variate from `source`.
pub(super) fn sample(source: &mut RandomSource) -> Result<f64> {
    let t = tables();
    loop {
        let w = source.next_word()?;
        let i = (w & 0xFF) as usize;
        let sign = if w & 0x100 != 0 { -1.0 } else { 1.0 };
        let u = source.next_uniform()?;
        let x = u * t.x[i];
        if x < t.x[i + 1] {
            return Ok(sign * x);
        }
        if i == 0 {
            // Tail beyond R: Marsaglia's exponential-rejection sampler.
            loop {
                let u1 = source.next_uniform()?;
                let u2 = source.next_uniform()?;
                let xt = -u1.ln() / ZIG_R;
                let yt = -u2.ln();
                if 2.0 * yt >= xt * xt {
                    return Ok(sign * (ZIG_R + xt));
                }
            }
        }
        let u2 = source.next_uniform()?;
        let y = t.f[i] + u2 * (t.f[i + 1] - t.f[i]);
        if y < density(x) {
            return Ok(sign * x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_close_and_decrease() {
        let t = tables();
        for i in 1..=LAYERS {
            assert!(t.x[i] < t.x[i - 1], "x table not strictly decreasing at {i}");
        }
        // The last recursion step must land on the density maximum f(0) = 1.
        let closure = density(t.x[LAYERS - 1])
            + (ZIG_R * density(ZIG_R)
                + (std::f64::consts::PI / 2.0).sqrt()
                    * erfc(ZIG_R / std::f64::consts::SQRT_2))
                / t.x[LAYERS - 1];
        assert!(
            (closure - 1.0).abs() < 1e-7,
            "ziggurat does not close: {closure}"
        );
    }
}

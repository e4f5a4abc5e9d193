//! Binary PPM/PGM output.
//!
//! Color images are written as P6 with maxval 255 and naive 8-bit
//! quantization `round(255 * c)`. Depth and accumulation maps are written as
//! 16-bit P5 with a linear mapping of the stated value range.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

use super::Image;

pub fn write_ppm(path: &Path, image: &Image) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(w, "P6\n{} {}\n255\n", image.width, image.height)?;
    let mut buf = Vec::with_capacity(image.pixels.len() * 3);
    for p in &image.pixels {
        for c in p {
            buf.push((c.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// 16-bit big-endian P5 (PGM convention) with values mapped linearly from
/// `[lo, hi]` to `[0, 65535]`.
pub fn write_pgm16(path: &Path, width: usize, height: usize, values: &[f64], lo: f64, hi: f64) -> Result<()> {
    assert_eq!(values.len(), width * height);
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(w, "P5\n{} {}\n65535\n", width, height)?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut buf = Vec::with_capacity(values.len() * 2);
    for v in values {
        let q = (((v - lo) / span).clamp(0.0, 1.0) * 65535.0).round() as u16;
        buf.extend_from_slice(&q.to_be_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

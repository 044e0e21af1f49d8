//! CMRIMG binary images and 8-bit PGM import.
//!
//! CMRIMG layout, little-endian: the magic `b"CMRIMG01"`, `u32` rows, `u32`
//! cols, then `rows * cols` pairs of `f64` (real, imaginary), row-major.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::ComplexImage;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CMRIMG01";
const HEADER_LEN: usize = 16;

pub fn encode(img: &ComplexImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * img.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(img.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(img.cols() as u32).to_le_bytes());
    for z in img.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<ComplexImage> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated CMRIMG header".into()));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad magic, expected CMRIMG01".into()));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|p| p.checked_mul(16))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() < expected {
        return Err(Error::Format(format!(
            "truncated CMRIMG payload: {} of {} bytes",
            body.len(),
            expected
        )));
    }
    if body.len() > expected {
        return Err(Error::Format("trailing bytes after CMRIMG payload".into()));
    }
    let data = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    ComplexImage::new(rows, cols, data)
}

pub fn write_image(path: impl AsRef<Path>, img: &ComplexImage) -> Result<()> {
    fs::write(path, encode(img))?;
    Ok(())
}

/// Reads a CMRIMG file, or a binary PGM (detected by its `P5` magic).
pub fn read_image(path: impl AsRef<Path>) -> Result<ComplexImage> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else {
        decode(&bytes)
    }
}

/// Binary P5 PGM with maxval 255, as a real image scaled to unit ℓ2 norm.
pub fn decode_pgm(bytes: &[u8]) -> Result<ComplexImage> {
    let mut pos = 0;
    let mut fields = [0usize; 4];
    for (n, field) in fields.iter_mut().enumerate() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated PGM header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::Format("non-ASCII PGM header".into()))?;
        if n == 0 {
            if token != "P5" {
                return Err(Error::Format("bad magic, expected P5".into()));
            }
            continue;
        }
        *field = token
            .parse()
            .map_err(|_| Error::Format(format!("bad PGM header field `{token}`")))?;
    }
    let [_, cols, rows, maxval] = fields;
    if maxval != 255 {
        return Err(Error::Format(format!("PGM maxval {maxval} unsupported, expected 255")));
    }
    // exactly one whitespace byte separates header and raster
    pos += 1;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < rows * cols {
        return Err(Error::Format("truncated PGM raster".into()));
    }
    let values: Vec<f64> = raster[..rows * cols].iter().map(|&b| f64::from(b)).collect();
    ComplexImage::from_real(rows, cols, &values)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm(rows: usize, cols: usize, fill: u8) -> Vec<u8> {
        let mut b = format!("P5\n# comment\n{cols} {rows}\n255\n").into_bytes();
        b.extend(std::iter::repeat_n(fill, rows * cols));
        b
    }

    #[test]
    fn header_errors() {
        let img = ComplexImage::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let bytes = encode(&img);
        assert_eq!(bytes.len(), 16 + 6 * 16);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).unwrap_err().to_string().contains("magic"));
        assert!(decode(&bytes[..bytes.len() - 1]).unwrap_err().to_string().contains("truncated"));
        assert!(decode(&bytes[..10]).is_err());
        let mut nan = bytes.clone();
        nan[16..24].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode(&nan), Err(Error::NonFinite(0))));
    }

    #[test]
    fn pgm_constant_image_normalizes() {
        let img = decode_pgm(&pgm(4, 8, 128)).unwrap();
        assert_eq!(img.shape(), (4, 8));
        assert!((img.norm() - 1.0).abs() < 1e-12);
        assert!(img.data().iter().all(|z| z.im == 0.0 && z.re > 0.0));
    }

    #[test]
    fn pgm_zero_image_is_rejected() {
        assert!(matches!(decode_pgm(&pgm(4, 4, 0)), Err(Error::ZeroSignal)));
    }

    #[test]
    fn pgm_rejects_other_maxval() {
        let mut b = b"P5 2 2 65535\n".to_vec();
        b.extend([0u8; 8]);
        assert!(decode_pgm(&b).is_err());
        assert!(decode_pgm(b"P5 2 2 255\n\x01").is_err());
    }
}

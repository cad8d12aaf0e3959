//! Binary PPM (P6, maxval 255) reader/writer for RGB previews.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::RgbImage;
use crate::error::{Error, Result};

pub fn save_ppm(img: &RgbImage, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{} {}\n255\n", img.width, img.height)?;
    let mut bytes = Vec::with_capacity(img.pixels.len() * 3);
    for p in &img.pixels {
        for c in p {
            // round half-up on the nonnegative range
            let q = (c.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8;
            bytes.push(q);
        }
    }
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

fn next_token(r: &mut impl Read) -> Result<String> {
    let mut tok = String::new();
    let mut byte = [0u8; 1];
    let mut in_comment = false;
    loop {
        if r.read(&mut byte)? == 0 {
            if tok.is_empty() {
                return Err(Error::Format("unexpected end of PPM header".into()));
            }
            return Ok(tok);
        }
        let c = byte[0] as char;
        if in_comment {
            if c == '\n' {
                in_comment = false;
            }
            continue;
        }
        if c == '#' {
            in_comment = true;
            continue;
        }
        if c.is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            return Ok(tok);
        }
        tok.push(c);
    }
}

pub fn load_ppm(path: &Path) -> Result<RgbImage> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = next_token(&mut r)?;
    if magic != "P6" {
        return Err(Error::Format(format!("expected P6 magic, got {magic:?}")));
    }
    let width: usize = next_token(&mut r)?
        .parse()
        .map_err(|_| Error::Format("bad width".into()))?;
    let height: usize = next_token(&mut r)?
        .parse()
        .map_err(|_| Error::Format("bad height".into()))?;
    let maxval: usize = next_token(&mut r)?
        .parse()
        .map_err(|_| Error::Format("bad maxval".into()))?;
    if maxval != 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("zero-sized image".into()));
    }
    let mut bytes = vec![0u8; width * height * 3];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::Format("truncated pixel payload".into()))?;
    let pixels = bytes
        .chunks_exact(3)
        .map(|c| {
            [
                c[0] as f64 / 255.0,
                c[1] as f64 / 255.0,
                c[2] as f64 / 255.0,
            ]
        })
        .collect();
    Ok(RgbImage {
        height,
        width,
        pixels,
    })
}

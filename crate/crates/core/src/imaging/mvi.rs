//! MVI container: little-endian, magic "MVI1", u32 geometry tag
//! (0=HSV, 1=S2, 2=SPD3), u32 height, u32 width, u32 values-per-pixel,
//! height*width*vpp float64 row-major, then the anchor as vpp float64.
//!
//! A sibling "MVB1" container stores a scalar brightness channel.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{BrightnessChannel, ManifoldImage};
use crate::error::{Error, Result};
use crate::geometry::{GeometryTag, ManifoldPoint};

const MAGIC: &[u8; 4] = b"MVI1";
const BRIGHT_MAGIC: &[u8; 4] = b"MVB1";

fn tag_to_u32(tag: GeometryTag) -> u32 {
    match tag {
        GeometryTag::HsvProduct => 0,
        GeometryTag::Sphere2 => 1,
        GeometryTag::Spd3 => 2,
    }
}

fn tag_from_u32(v: u32) -> Result<GeometryTag> {
    match v {
        0 => Ok(GeometryTag::HsvProduct),
        1 => Ok(GeometryTag::Sphere2),
        2 => Ok(GeometryTag::Spd3),
        other => Err(Error::Format(format!("unknown geometry tag {other}"))),
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; n * 8];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::Format("truncated payload".into()))?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn save_mvi(img: &ManifoldImage, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let vpp = img.tag.values_per_pixel();
    w.write_all(MAGIC)?;
    w.write_all(&tag_to_u32(img.tag).to_le_bytes())?;
    w.write_all(&(img.height as u32).to_le_bytes())?;
    w.write_all(&(img.width as u32).to_le_bytes())?;
    w.write_all(&(vpp as u32).to_le_bytes())?;
    for p in &img.pixels {
        for v in p.ambient() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    for v in img.anchor.ambient() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_mvi(path: &Path) -> Result<ManifoldImage> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let tag = tag_from_u32(read_u32(&mut r)?)?;
    let height = read_u32(&mut r)? as usize;
    let width = read_u32(&mut r)? as usize;
    let vpp = read_u32(&mut r)? as usize;
    if vpp != tag.values_per_pixel() {
        return Err(Error::Format(format!(
            "values-per-pixel {vpp} does not match tag {tag:?}"
        )));
    }
    let data = read_f64s(&mut r, height * width * vpp)?;
    let anchor_data = read_f64s(&mut r, vpp)?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let pixels = data
        .chunks_exact(vpp)
        .map(|c| ManifoldPoint::from_ambient(tag, c))
        .collect::<Result<Vec<_>>>()?;
    let anchor = ManifoldPoint::from_ambient(tag, &anchor_data)?;
    ManifoldImage::new(tag, height, width, pixels, anchor)
}

pub fn save_brightness(b: &BrightnessChannel, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(BRIGHT_MAGIC)?;
    w.write_all(&(b.height as u32).to_le_bytes())?;
    w.write_all(&(b.width as u32).to_le_bytes())?;
    for v in &b.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_brightness(path: &Path) -> Result<BrightnessChannel> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for magic".into()))?;
    if &magic != BRIGHT_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let height = read_u32(&mut r)? as usize;
    let width = read_u32(&mut r)? as usize;
    let values = read_f64s(&mut r, height * width)?;
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Format("brightness values must be finite and >= 0".into()));
    }
    Ok(BrightnessChannel {
        height,
        width,
        values,
    })
}

//! RGB <-> HSV and RGB <-> chromaticity-brightness codecs.

use std::f64::consts::PI;

use super::{BrightnessChannel, ManifoldImage, RgbImage};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, AnchorSet, GeometryTag, ManifoldPoint};

/// Standard hexcone RGB -> HSV with hue in radians wrapped to [-pi, pi).
/// Achromatic pixels get hue 0.
pub fn rgb_to_hsv(img: &RgbImage) -> ManifoldImage {
    let anchor = AnchorSet::default().hsv;
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let max = r.max(g).max(b);
            let min = r.min(g).min(b);
            let delta = max - min;
            let h_deg = if delta == 0.0 {
                0.0
            } else if max == r {
                60.0 * ((g - b) / delta)
            } else if max == g {
                60.0 * ((b - r) / delta + 2.0)
            } else {
                60.0 * ((r - g) / delta + 4.0)
            };
            let h = wrap_angle(h_deg * PI / 180.0);
            let s = if max == 0.0 { 0.0 } else { delta / max };
            ManifoldPoint::Hsv { h, s, v: max }
        })
        .collect();
    ManifoldImage {
        tag: GeometryTag::HsvProduct,
        height: img.height,
        width: img.width,
        pixels,
        anchor,
    }
}

/// Inverse hexcone transform; saturation and value are clamped to [0,1]
/// first (the manifold ops never clamp, rendering does).
pub fn hsv_to_rgb(img: &ManifoldImage) -> Result<RgbImage> {
    if img.tag != GeometryTag::HsvProduct {
        return Err(Error::TagMismatch {
            expected: GeometryTag::HsvProduct,
            got: img.tag,
        });
    }
    let pixels = img
        .pixels
        .iter()
        .map(|p| {
            let (h, s, v) = match p {
                ManifoldPoint::Hsv { h, s, v } => (*h, *s, *v),
                _ => unreachable!(),
            };
            let s = s.clamp(0.0, 1.0);
            let v = v.clamp(0.0, 1.0);
            // back to [0, 360) degrees
            let h_deg = (h * 180.0 / PI).rem_euclid(360.0);
            let hh = h_deg / 60.0;
            let sector = (hh.floor() as i64).clamp(0, 5);
            let f = hh - sector as f64;
            let p0 = v * (1.0 - s);
            let q = v * (1.0 - s * f);
            let t = v * (1.0 - s * (1.0 - f));
            match sector {
                0 => [v, t, p0],
                1 => [q, v, p0],
                2 => [p0, v, t],
                3 => [p0, q, v],
                4 => [t, p0, v],
                _ => [v, p0, q],
            }
        })
        .collect();
    Ok(RgbImage {
        height: img.height,
        width: img.width,
        pixels,
    })
}

/// Split an RGB image into its chromaticity (unit direction on S^2, first
/// octant) and brightness (Euclidean norm) components. Black pixels map to
/// the sphere anchor with brightness 0.
pub fn rgb_to_cb(img: &RgbImage) -> (ManifoldImage, BrightnessChannel) {
    let anchor = AnchorSet::default().sphere;
    let mut values = Vec::with_capacity(img.pixels.len());
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let n = (r * r + g * g + b * b).sqrt();
            values.push(n);
            if n == 0.0 {
                anchor.clone()
            } else {
                ManifoldPoint::Sphere([r / n, g / n, b / n])
            }
        })
        .collect();
    (
        ManifoldImage {
            tag: GeometryTag::Sphere2,
            height: img.height,
            width: img.width,
            pixels,
            anchor,
        },
        BrightnessChannel {
            height: img.height,
            width: img.width,
            values,
        },
    )
}

/// Recombine chromaticity and brightness: pixel = brightness * chroma with
/// negative chroma components clamped to 0 before scaling and channels
/// clamped to [0,1] after.
pub fn cb_to_rgb(chroma: &ManifoldImage, brightness: &BrightnessChannel) -> Result<RgbImage> {
    if chroma.tag != GeometryTag::Sphere2 {
        return Err(Error::TagMismatch {
            expected: GeometryTag::Sphere2,
            got: chroma.tag,
        });
    }
    if chroma.height != brightness.height || chroma.width != brightness.width {
        return Err(Error::DimensionMismatch(format!(
            "chroma {}x{} vs brightness {}x{}",
            chroma.height, chroma.width, brightness.height, brightness.width
        )));
    }
    let pixels = chroma
        .pixels
        .iter()
        .zip(&brightness.values)
        .map(|(p, &b)| {
            let c = match p {
                ManifoldPoint::Sphere(v) => v,
                _ => unreachable!(),
            };
            [
                (b * c[0].max(0.0)).clamp(0.0, 1.0),
                (b * c[1].max(0.0)).clamp(0.0, 1.0),
                (b * c[2].max(0.0)).clamp(0.0, 1.0),
            ]
        })
        .collect();
    Ok(RgbImage {
        height: chroma.height,
        width: chroma.width,
        pixels,
    })
}

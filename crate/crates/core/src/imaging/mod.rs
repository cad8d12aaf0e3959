//! Manifold-valued image containers, color-space codecs, DT voxel repair,
//! and file I/O.

mod color;
mod mvi;
mod ppm;
mod repair;
mod tangent;

pub use color::{cb_to_rgb, hsv_to_rgb, rgb_to_cb, rgb_to_hsv};
pub use mvi::{load_brightness, load_mvi, save_brightness, save_mvi};
pub use ppm::{load_ppm, save_ppm};
pub use repair::{repair_spd_image, RepairReport, DEFAULT_REPAIR_EPSILON};
pub use tangent::{image_to_tangent_field, tangent_field_to_image};

use crate::error::{Error, Result};
use crate::geometry::{GeometryTag, ManifoldPoint};

/// H x W grid of manifold points sharing one geometry and anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldImage {
    pub tag: GeometryTag,
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<ManifoldPoint>,
    pub anchor: ManifoldPoint,
}

impl ManifoldImage {
    pub fn new(
        tag: GeometryTag,
        height: usize,
        width: usize,
        pixels: Vec<ManifoldPoint>,
        anchor: ManifoldPoint,
    ) -> Result<Self> {
        if height == 0 || width == 0 || pixels.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} grid with {} pixels",
                height,
                width,
                pixels.len()
            )));
        }
        if anchor.tag() != tag {
            return Err(Error::TagMismatch {
                expected: tag,
                got: anchor.tag(),
            });
        }
        let img = ManifoldImage {
            tag,
            height,
            width,
            pixels,
            anchor,
        };
        img.validate()?;
        Ok(img)
    }

    pub fn validate(&self) -> Result<()> {
        self.anchor.validate()?;
        for (i, p) in self.pixels.iter().enumerate() {
            if p.tag() != self.tag {
                return Err(Error::TagMismatch {
                    expected: self.tag,
                    got: p.tag(),
                });
            }
            p.validate().map_err(|e| {
                Error::InvalidPoint(format!("pixel {i}: {e}"))
            })?;
        }
        Ok(())
    }

    pub fn pixel(&self, row: usize, col: usize) -> &ManifoldPoint {
        &self.pixels[row * self.width + col]
    }
}

/// Real-valued RGB image with channels in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if height == 0 || width == 0 || pixels.len() != height * width {
            return Err(Error::DimensionMismatch("rgb image".into()));
        }
        for p in &pixels {
            for c in p {
                if !c.is_finite() || *c < 0.0 || *c > 1.0 {
                    return Err(Error::InvalidPoint(format!("rgb channel {c} outside [0,1]")));
                }
            }
        }
        Ok(RgbImage {
            height,
            width,
            pixels,
        })
    }
}

/// Per-pixel Euclidean norm of the RGB vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessChannel {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

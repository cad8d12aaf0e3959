//! Validation and repair of raw diffusion-tensor voxels.

use super::ManifoldImage;
use crate::error::{Error, Result};
use crate::geometry::eig::{self, Mat3};
use crate::geometry::{GeometryTag, ManifoldPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairReport {
    pub total_voxels: usize,
    pub repaired_voxels: usize,
}

pub const DEFAULT_REPAIR_EPSILON: f64 = 1e-6;

/// Repair a grid of raw (possibly asymmetric, possibly indefinite) 3x3
/// voxels into a valid SPD image: symmetrize, then clamp eigenvalues to
/// at least `epsilon`. Idempotent; counts voxels that needed any change.
pub fn repair_spd_image(
    voxels: &[Mat3],
    height: usize,
    width: usize,
    epsilon: f64,
) -> Result<(ManifoldImage, RepairReport)> {
    if epsilon <= 0.0 {
        return Err(Error::Config(format!("repair epsilon {epsilon} must be > 0")));
    }
    if voxels.len() != height * width {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} grid with {} voxels",
            height,
            width,
            voxels.len()
        )));
    }
    let mut repaired = 0usize;
    let mut pixels = Vec::with_capacity(voxels.len());
    for (idx, raw) in voxels.iter().enumerate() {
        if raw.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("voxel {idx}")));
        }
        let asym = eig::asymmetry(raw);
        let sym = eig::symmetric_part(raw);
        let (vals, q) = eig::sym_eigen(&sym);
        let clamped = [
            vals[0].max(epsilon),
            vals[1].max(epsilon),
            vals[2].max(epsilon),
        ];
        // slack keeps repair idempotent against eigensolver rounding
        let needs_clamp = vals.iter().any(|&v| v < epsilon * (1.0 - 1e-9));
        if asym > crate::geometry::SYMMETRY_TOL || needs_clamp {
            repaired += 1;
        }
        let fixed = if needs_clamp {
            eig::symmetric_part(&eig::from_eigen(&clamped, &q))
        } else {
            sym
        };
        pixels.push(ManifoldPoint::Spd(fixed));
    }
    let anchor = ManifoldPoint::Spd(eig::IDENTITY);
    let img = ManifoldImage::new(GeometryTag::Spd3, height, width, pixels, anchor)?;
    Ok((
        img,
        RepairReport {
            total_voxels: voxels.len(),
            repaired_voxels: repaired,
        },
    ))
}

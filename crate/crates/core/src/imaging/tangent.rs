//! Flattening images to per-pixel tangent coordinates at a shared anchor
//! (the representation networks consume) and back.

use super::ManifoldImage;
use crate::error::{Error, Result};
use crate::geometry::{self, GeometryTag, ManifoldPoint, TangentBasis};

/// Per-pixel log at the anchor, in basis coordinates, flattened row-major.
/// Output length is pixels * tangent_dim (3 HSV, 2 sphere, 6 SPD).
pub fn image_to_tangent_field(img: &ManifoldImage, anchor: &ManifoldPoint) -> Result<Vec<f64>> {
    if anchor.tag() != img.tag {
        return Err(Error::TagMismatch {
            expected: img.tag,
            got: anchor.tag(),
        });
    }
    let basis = TangentBasis::new(anchor)?;
    let mut out = Vec::with_capacity(img.pixels.len() * basis.dim());
    for p in &img.pixels {
        let v = geometry::log(anchor, p)?;
        out.extend(basis.ambient_to_basis(&v)?);
    }
    Ok(out)
}

/// Per-pixel exp after lifting basis coordinates back to the tangent space.
pub fn tangent_field_to_image(
    field: &[f64],
    tag: GeometryTag,
    height: usize,
    width: usize,
    anchor: &ManifoldPoint,
) -> Result<ManifoldImage> {
    let dim = tag.tangent_dim();
    if field.len() != height * width * dim {
        return Err(Error::DimensionMismatch(format!(
            "field length {} vs {}x{}x{}",
            field.len(),
            height,
            width,
            dim
        )));
    }
    let basis = geometry::basis::tangent_basis(tag, anchor)?;
    let pixels = field
        .chunks_exact(dim)
        .map(|coords| {
            let v = basis.basis_to_ambient(coords)?;
            geometry::exp(anchor, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    ManifoldImage::new(tag, height, width, pixels, anchor.clone())
}

//! Deterministic orthonormal bases of tangent spaces, used to give every
//! pixel a fixed-size coordinate block for network I/O (3 for HSV, 2 for
//! sphere, 6 for SPD).

use super::{dot3, norm3, GeometryTag, ManifoldPoint, TangentCoords, TangentVector};
use crate::error::{Error, Result};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal basis of the tangent space at a fixed anchor.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    anchor: ManifoldPoint,
    kind: BasisKind,
}

#[derive(Debug, Clone)]
enum BasisKind {
    Hsv,
    Sphere { b1: [f64; 3], b2: [f64; 3] },
    Spd,
}

impl TangentBasis {
    /// Deterministic basis at the anchor. Sphere: Gram-Schmidt of a fixed
    /// seed axis against the anchor, completed by the cross product. SPD:
    /// the six canonical symmetric matrices (off-diagonals scaled 1/sqrt2).
    pub fn new(anchor: &ManifoldPoint) -> Result<Self> {
        anchor.validate()?;
        let kind = match anchor {
            ManifoldPoint::Hsv { .. } => BasisKind::Hsv,
            ManifoldPoint::Sphere(a) => {
                // seed from the x axis unless the anchor is nearly parallel to it
                let seed = if a[0].abs() < 0.9 {
                    [1.0, 0.0, 0.0]
                } else {
                    [0.0, 1.0, 0.0]
                };
                let d = dot3(a, &seed);
                let mut b1 = [seed[0] - d * a[0], seed[1] - d * a[1], seed[2] - d * a[2]];
                let n = norm3(&b1);
                for v in b1.iter_mut() {
                    *v /= n;
                }
                let b2 = [
                    a[1] * b1[2] - a[2] * b1[1],
                    a[2] * b1[0] - a[0] * b1[2],
                    a[0] * b1[1] - a[1] * b1[0],
                ];
                BasisKind::Sphere { b1, b2 }
            }
            ManifoldPoint::Spd(_) => BasisKind::Spd,
        };
        Ok(TangentBasis {
            anchor: anchor.clone(),
            kind,
        })
    }

    pub fn anchor(&self) -> &ManifoldPoint {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        self.anchor.tag().tangent_dim()
    }

    /// Coordinates of a tangent vector in this basis.
    pub fn ambient_to_basis(&self, v: &TangentVector) -> Result<Vec<f64>> {
        match (&self.kind, &v.coords) {
            (BasisKind::Hsv, TangentCoords::Hsv(d)) => Ok(d.to_vec()),
            (BasisKind::Sphere { b1, b2 }, TangentCoords::Sphere(d)) => {
                Ok(vec![dot3(d, b1), dot3(d, b2)])
            }
            (BasisKind::Spd, TangentCoords::Spd(m)) => Ok(vec![
                m[0][0],
                m[1][1],
                m[2][2],
                m[0][1] * std::f64::consts::SQRT_2,
                m[0][2] * std::f64::consts::SQRT_2,
                m[1][2] * std::f64::consts::SQRT_2,
            ]),
            _ => Err(Error::TagMismatch {
                expected: self.anchor.tag(),
                got: v.tag(),
            }),
        }
    }

    /// Lift basis coordinates back to an ambient tangent vector at the anchor.
    pub fn basis_to_ambient(&self, coords: &[f64]) -> Result<TangentVector> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        let tc = match &self.kind {
            BasisKind::Hsv => TangentCoords::Hsv([coords[0], coords[1], coords[2]]),
            BasisKind::Sphere { b1, b2 } => TangentCoords::Sphere([
                coords[0] * b1[0] + coords[1] * b2[0],
                coords[0] * b1[1] + coords[1] * b2[1],
                coords[0] * b1[2] + coords[1] * b2[2],
            ]),
            BasisKind::Spd => {
                let off01 = coords[3] * SQRT_HALF;
                let off02 = coords[4] * SQRT_HALF;
                let off12 = coords[5] * SQRT_HALF;
                TangentCoords::Spd([
                    [coords[0], off01, off02],
                    [off01, coords[1], off12],
                    [off02, off12, coords[2]],
                ])
            }
        };
        Ok(TangentVector {
            anchor: self.anchor.clone(),
            coords: tc,
        })
    }

    /// The basis elements as ambient tangent vectors.
    pub fn vectors(&self) -> Vec<TangentVector> {
        (0..self.dim())
            .map(|k| {
                let mut c = vec![0.0; self.dim()];
                c[k] = 1.0;
                self.basis_to_ambient(&c).expect("unit coordinate vector")
            })
            .collect()
    }
}

/// Convenience constructor by tag, using the given anchor.
pub fn tangent_basis(tag: GeometryTag, anchor: &ManifoldPoint) -> Result<TangentBasis> {
    if anchor.tag() != tag {
        return Err(Error::TagMismatch {
            expected: tag,
            got: anchor.tag(),
        });
    }
    TangentBasis::new(anchor)
}

//! Riemannian exp/log maps, geodesic distances, tangent projections, and
//! tangent-space interpolation for the three supported image manifolds:
//! the HSV product manifold S^1 x [0,1]^2, the unit sphere S^2, and the
//! cone SPD(3) under the Log-Euclidean metric.

pub mod basis;
pub mod eig;
pub mod random;
mod hsv;
mod sphere;
mod spd;

pub use basis::TangentBasis;
pub use eig::Mat3;
pub use hsv::{hsv_exp, hsv_log, wrap_angle};
pub use sphere::{sphere_exp, sphere_log, sphere_project_tangent};
pub use spd::{spd_dexp, spd_dlog, spd_exp, spd_log, sym_matrix_exp, sym_matrix_log};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const SPHERE_NORM_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const TANGENCY_TOL: f64 = 1e-10;
pub const ANTIPODAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeometryTag {
    HsvProduct,
    Sphere2,
    Spd3,
}

impl GeometryTag {
    /// Ambient values stored per pixel (3 for HSV, 3 for sphere, 9 for SPD).
    pub fn values_per_pixel(self) -> usize {
        match self {
            GeometryTag::HsvProduct | GeometryTag::Sphere2 => 3,
            GeometryTag::Spd3 => 9,
        }
    }

    /// Intrinsic tangent dimension (coordinates fed to networks).
    pub fn tangent_dim(self) -> usize {
        match self {
            GeometryTag::HsvProduct => 3,
            GeometryTag::Sphere2 => 2,
            GeometryTag::Spd3 => 6,
        }
    }
}

/// One pixel/voxel value on a tagged geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldPoint {
    /// Hue in radians in [-pi, pi), saturation and value nominally in [0,1].
    Hsv { h: f64, s: f64, v: f64 },
    /// Unit vector in R^3.
    Sphere([f64; 3]),
    /// Symmetric positive definite 3x3 matrix.
    Spd(Mat3),
}

impl ManifoldPoint {
    pub fn tag(&self) -> GeometryTag {
        match self {
            ManifoldPoint::Hsv { .. } => GeometryTag::HsvProduct,
            ManifoldPoint::Sphere(_) => GeometryTag::Sphere2,
            ManifoldPoint::Spd(_) => GeometryTag::Spd3,
        }
    }

    /// HSV point with the hue wrapped into [-pi, pi).
    pub fn hsv(h: f64, s: f64, v: f64) -> Self {
        ManifoldPoint::Hsv {
            h: wrap_angle(h),
            s,
            v,
        }
    }

    /// Unit-norm sphere point; errors if the norm deviates beyond tolerance.
    pub fn sphere(v: [f64; 3]) -> Result<Self> {
        let n = norm3(&v);
        if (n - 1.0).abs() > SPHERE_NORM_TOL {
            return Err(Error::InvalidPoint(format!(
                "sphere point norm {n} deviates from 1"
            )));
        }
        Ok(ManifoldPoint::Sphere(v))
    }

    /// Sphere point from an arbitrary nonzero vector, normalized.
    pub fn sphere_normalized(v: [f64; 3]) -> Result<Self> {
        let n = norm3(&v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidPoint(format!("cannot normalize norm {n}")));
        }
        Ok(ManifoldPoint::Sphere([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// SPD point; errors on asymmetry beyond tolerance or non-positive spectrum.
    pub fn spd(m: Mat3) -> Result<Self> {
        if eig::asymmetry(&m) > SYMMETRY_TOL {
            return Err(Error::InvalidPoint(format!(
                "matrix asymmetry {} exceeds tolerance",
                eig::asymmetry(&m)
            )));
        }
        let min = eig::min_eigenvalue(&m);
        if min <= 0.0 {
            return Err(Error::NotSpd {
                min_eigenvalue: min,
            });
        }
        Ok(ManifoldPoint::Spd(eig::symmetric_part(&m)))
    }

    /// Check the per-geometry invariants without consuming the point.
    pub fn validate(&self) -> Result<()> {
        match self {
            ManifoldPoint::Hsv { h, s, v } => {
                if !(-std::f64::consts::PI..std::f64::consts::PI).contains(h) {
                    return Err(Error::InvalidPoint(format!("hue {h} outside [-pi, pi)")));
                }
                if !h.is_finite() || !s.is_finite() || !v.is_finite() {
                    return Err(Error::NonFinite("hsv point".into()));
                }
                Ok(())
            }
            ManifoldPoint::Sphere(v) => {
                let n = norm3(v);
                if (n - 1.0).abs() > SPHERE_NORM_TOL {
                    return Err(Error::InvalidPoint(format!("sphere norm {n}")));
                }
                Ok(())
            }
            ManifoldPoint::Spd(m) => {
                if eig::asymmetry(m) > SYMMETRY_TOL {
                    return Err(Error::InvalidPoint("spd asymmetry".into()));
                }
                let min = eig::min_eigenvalue(m);
                if min <= 0.0 {
                    return Err(Error::NotSpd {
                        min_eigenvalue: min,
                    });
                }
                Ok(())
            }
        }
    }

    /// Raw ambient values (3 or 9 floats, row-major for SPD).
    pub fn ambient(&self) -> Vec<f64> {
        match self {
            ManifoldPoint::Hsv { h, s, v } => vec![*h, *s, *v],
            ManifoldPoint::Sphere(v) => v.to_vec(),
            ManifoldPoint::Spd(m) => m.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_ambient(tag: GeometryTag, data: &[f64]) -> Result<Self> {
        match tag {
            GeometryTag::HsvProduct => {
                if data.len() != 3 {
                    return Err(Error::DimensionMismatch("hsv ambient".into()));
                }
                let p = ManifoldPoint::Hsv {
                    h: data[0],
                    s: data[1],
                    v: data[2],
                };
                p.validate()?;
                Ok(p)
            }
            GeometryTag::Sphere2 => {
                if data.len() != 3 {
                    return Err(Error::DimensionMismatch("sphere ambient".into()));
                }
                ManifoldPoint::sphere([data[0], data[1], data[2]])
            }
            GeometryTag::Spd3 => {
                if data.len() != 9 {
                    return Err(Error::DimensionMismatch("spd ambient".into()));
                }
                let mut m = eig::ZERO;
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] = data[3 * i + j];
                    }
                }
                ManifoldPoint::spd(m)
            }
        }
    }
}

/// Tangent-space element at a declared anchor point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub anchor: ManifoldPoint,
    pub coords: TangentCoords,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TangentCoords {
    /// (delta hue, delta saturation, delta value)
    Hsv([f64; 3]),
    /// Ambient 3-vector orthogonal to the anchor.
    Sphere([f64; 3]),
    /// Symmetric 3x3 matrix.
    Spd(Mat3),
}

impl TangentVector {
    pub fn tag(&self) -> GeometryTag {
        self.anchor.tag()
    }

    pub fn zero(anchor: ManifoldPoint) -> Self {
        let coords = match anchor.tag() {
            GeometryTag::HsvProduct => TangentCoords::Hsv([0.0; 3]),
            GeometryTag::Sphere2 => TangentCoords::Sphere([0.0; 3]),
            GeometryTag::Spd3 => TangentCoords::Spd(eig::ZERO),
        };
        TangentVector { anchor, coords }
    }

    /// Riemannian norm at the anchor. Coincides with the geodesic distance
    /// to exp_y of this vector: Euclidean for HSV and sphere, and for SPD
    /// the Log-Euclidean metric norm (Frobenius norm of the vector pulled
    /// back through the differential of the matrix log at the anchor).
    pub fn norm(&self) -> f64 {
        match (&self.coords, &self.anchor) {
            (TangentCoords::Hsv(d), _) => norm3(d),
            (TangentCoords::Sphere(d), _) => norm3(d),
            (TangentCoords::Spd(v), ManifoldPoint::Spd(y)) => {
                eig::frobenius_norm(&spd::spd_dlog(y, v))
            }
            _ => f64::NAN,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        let coords = match &self.coords {
            TangentCoords::Hsv(d) => TangentCoords::Hsv([d[0] * t, d[1] * t, d[2] * t]),
            TangentCoords::Sphere(d) => TangentCoords::Sphere([d[0] * t, d[1] * t, d[2] * t]),
            TangentCoords::Spd(m) => TangentCoords::Spd(eig::scale(m, t)),
        };
        TangentVector {
            anchor: self.anchor.clone(),
            coords,
        }
    }

    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        if self.anchor != other.anchor {
            return Err(Error::DimensionMismatch(
                "tangent vectors at different anchors".into(),
            ));
        }
        let coords = match (&self.coords, &other.coords) {
            (TangentCoords::Hsv(a), TangentCoords::Hsv(b)) => {
                TangentCoords::Hsv([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            }
            (TangentCoords::Sphere(a), TangentCoords::Sphere(b)) => {
                TangentCoords::Sphere([a[0] + b[0], a[1] + b[1], a[2] + b[2]])
            }
            (TangentCoords::Spd(a), TangentCoords::Spd(b)) => TangentCoords::Spd(eig::add(a, b)),
            _ => {
                return Err(Error::TagMismatch {
                    expected: self.tag(),
                    got: other.tag(),
                })
            }
        };
        Ok(TangentVector {
            anchor: self.anchor.clone(),
            coords,
        })
    }
}

/// The fixed anchors used for network I/O in each geometry.
#[derive(Debug, Clone)]
pub struct AnchorSet {
    pub hsv: ManifoldPoint,
    pub sphere: ManifoldPoint,
    pub spd: ManifoldPoint,
}

impl Default for AnchorSet {
    fn default() -> Self {
        let r = 1.0 / 3f64.sqrt();
        AnchorSet {
            // hue pi wraps to -pi under the [-pi, pi) convention
            hsv: ManifoldPoint::hsv(std::f64::consts::PI, 0.0, 0.0),
            sphere: ManifoldPoint::Sphere([r, r, r]),
            spd: ManifoldPoint::Spd(eig::IDENTITY),
        }
    }
}

impl AnchorSet {
    pub fn anchor(&self, tag: GeometryTag) -> ManifoldPoint {
        match tag {
            GeometryTag::HsvProduct => self.hsv.clone(),
            GeometryTag::Sphere2 => self.sphere.clone(),
            GeometryTag::Spd3 => self.spd.clone(),
        }
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_tags(expected: GeometryTag, got: GeometryTag) -> Result<()> {
    if expected != got {
        return Err(Error::TagMismatch { expected, got });
    }
    Ok(())
}

/// log_y(x): the smallest tangent vector at `y` whose exponential is `x`.
pub fn log(y: &ManifoldPoint, x: &ManifoldPoint) -> Result<TangentVector> {
    check_tags(y.tag(), x.tag())?;
    match (y, x) {
        (ManifoldPoint::Hsv { .. }, ManifoldPoint::Hsv { .. }) => hsv::hsv_log(y, x),
        (ManifoldPoint::Sphere(_), ManifoldPoint::Sphere(_)) => sphere::sphere_log(y, x),
        (ManifoldPoint::Spd(_), ManifoldPoint::Spd(_)) => spd::spd_log(y, x),
        _ => unreachable!(),
    }
}

/// exp_y(v): follow the geodesic from `y` with initial velocity `v`.
pub fn exp(y: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
    check_tags(y.tag(), v.tag())?;
    match y {
        ManifoldPoint::Hsv { .. } => hsv::hsv_exp(y, v),
        ManifoldPoint::Sphere(_) => sphere::sphere_exp(y, v),
        ManifoldPoint::Spd(_) => spd::spd_exp(y, v),
    }
}

/// Geodesic distance between two points of the same geometry.
pub fn distance(x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
    check_tags(x.tag(), y.tag())?;
    match (x, y) {
        (ManifoldPoint::Hsv { h: xh, s: xs, v: xv }, ManifoldPoint::Hsv { h: yh, s: ys, v: yv }) => {
            let dh = wrap_angle(xh - yh);
            Ok((dh * dh + (xs - ys) * (xs - ys) + (xv - yv) * (xv - yv)).sqrt())
        }
        (ManifoldPoint::Sphere(a), ManifoldPoint::Sphere(b)) => {
            if a == b {
                return Ok(0.0);
            }
            // atan2 form stays well conditioned near coincident and
            // antipodal pairs, where acos of the dot product loses digits
            let c = dot3(a, b).clamp(-1.0, 1.0);
            let proj = [a[0] - c * b[0], a[1] - c * b[1], a[2] - c * b[2]];
            Ok(norm3(&proj).atan2(c))
        }
        (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => {
            let la = spd::sym_matrix_log(a)?;
            let lb = spd::sym_matrix_log(b)?;
            Ok(eig::frobenius_norm(&eig::sub(&la, &lb)))
        }
        _ => unreachable!(),
    }
}

/// Tangent-space interpolation between a real sample and a canonicalized
/// generator output: (1-t) log_y(x_real) + t log_y(exp_y(g_raw)).
pub fn interpolate(
    y: &ManifoldPoint,
    x_real: &ManifoldPoint,
    g_raw: &TangentVector,
    t: f64,
) -> Result<TangentVector> {
    let real = log(y, x_real)?;
    let canon = log(y, &exp(y, g_raw)?)?;
    real.scale(1.0 - t).add(&canon.scale(t))
}

#[cfg(test)]
mod tests;

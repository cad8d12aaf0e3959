//! Exp/log maps on the HSV product manifold S^1 x [0,1]^2.
//!
//! Hue lives on the circle represented as [-pi, pi); saturation and value
//! are treated as a flat vector space, clamped to [0,1] only at render time.

use std::f64::consts::PI;

use super::{ManifoldPoint, TangentCoords, TangentVector};
use crate::error::{Error, Result};

/// Wrap an angle into [-pi, pi). The wrapped difference of two hues is the
/// minimal-norm tangent along the circle.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = (a + PI).rem_euclid(two_pi) - PI;
    // rem_euclid can return exactly two_pi for inputs just below a wrap
    // boundary under rounding; fold that back.
    if r >= PI {
        r - two_pi
    } else {
        r
    }
}

pub fn hsv_log(y: &ManifoldPoint, x: &ManifoldPoint) -> Result<TangentVector> {
    match (y, x) {
        (
            ManifoldPoint::Hsv { h: yh, s: ys, v: yv },
            ManifoldPoint::Hsv { h: xh, s: xs, v: xv },
        ) => Ok(TangentVector {
            anchor: y.clone(),
            coords: TangentCoords::Hsv([wrap_angle(xh - yh), xs - ys, xv - yv]),
        }),
        _ => Err(Error::TagMismatch {
            expected: super::GeometryTag::HsvProduct,
            got: x.tag(),
        }),
    }
}

pub fn hsv_exp(y: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
    match (y, &v.coords) {
        (ManifoldPoint::Hsv { h: yh, s: ys, v: yv }, TangentCoords::Hsv(d)) => {
            Ok(ManifoldPoint::Hsv {
                h: wrap_angle(yh + d[0]),
                s: ys + d[1],
                v: yv + d[2],
            })
        }
        _ => Err(Error::TagMismatch {
            expected: super::GeometryTag::HsvProduct,
            got: v.tag(),
        }),
    }
}

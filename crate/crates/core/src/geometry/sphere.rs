//! Exp/log maps on the unit sphere S^2.

use super::{dot3, norm3, GeometryTag, ManifoldPoint, TangentCoords, TangentVector};
use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 1e-8;

/// Orthogonal projection of an ambient vector onto the tangent plane at `y`:
/// p_y(h) = h - <y, h> y.
pub fn sphere_project_tangent(y: &ManifoldPoint, h: [f64; 3]) -> Result<TangentVector> {
    let yv = match y {
        ManifoldPoint::Sphere(v) => v,
        _ => {
            return Err(Error::TagMismatch {
                expected: GeometryTag::Sphere2,
                got: y.tag(),
            })
        }
    };
    let d = dot3(yv, &h);
    Ok(TangentVector {
        anchor: y.clone(),
        coords: TangentCoords::Sphere([h[0] - d * yv[0], h[1] - d * yv[1], h[2] - d * yv[2]]),
    })
}

pub fn sphere_log(y: &ManifoldPoint, x: &ManifoldPoint) -> Result<TangentVector> {
    let (yv, xv) = match (y, x) {
        (ManifoldPoint::Sphere(a), ManifoldPoint::Sphere(b)) => (a, b),
        _ => {
            return Err(Error::TagMismatch {
                expected: GeometryTag::Sphere2,
                got: x.tag(),
            })
        }
    };
    let c = dot3(yv, xv).clamp(-1.0, 1.0);
    if c <= -1.0 + super::ANTIPODAL_TOL {
        return Err(Error::Antipodal { dot: c });
    }
    // p_y(x - y) = p_y(x); the angle from atan2 stays well conditioned at
    // both ends of the geodesic, unlike acos near |dot| = 1
    let proj = [xv[0] - c * yv[0], xv[1] - c * yv[1], xv[2] - c * yv[2]];
    let pn = norm3(&proj);
    let theta = pn.atan2(c);
    if pn < SERIES_CUTOFF {
        // x is (numerically) y; the projected difference already is the
        // first-order tangent and theta/pn -> 1
        return Ok(TangentVector {
            anchor: y.clone(),
            coords: TangentCoords::Sphere(proj),
        });
    }
    let scale = theta / pn;
    Ok(TangentVector {
        anchor: y.clone(),
        coords: TangentCoords::Sphere([proj[0] * scale, proj[1] * scale, proj[2] * scale]),
    })
}

pub fn sphere_exp(y: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
    let (yv, d) = match (y, &v.coords) {
        (ManifoldPoint::Sphere(a), TangentCoords::Sphere(d)) => (a, d),
        _ => {
            return Err(Error::TagMismatch {
                expected: GeometryTag::Sphere2,
                got: v.tag(),
            })
        }
    };
    let residual = dot3(yv, d).abs();
    if residual > super::TANGENCY_TOL {
        return Err(Error::NotTangent { residual });
    }
    let t = norm3(d);
    let (c, sc) = if t < SERIES_CUTOFF {
        // cos t ~ 1 - t^2/2 + t^4/24, sin t / t ~ 1 - t^2/6 + t^4/120
        let t2 = t * t;
        (
            1.0 - t2 / 2.0 + t2 * t2 / 24.0,
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
        )
    } else {
        (t.cos(), t.sin() / t)
    };
    let out = [
        c * yv[0] + sc * d[0],
        c * yv[1] + sc * d[1],
        c * yv[2] + sc * d[2],
    ];
    // renormalize against accumulated rounding
    ManifoldPoint::sphere_normalized(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(v: [f64; 3]) -> ManifoldPoint {
        ManifoldPoint::sphere(v).unwrap()
    }

    #[test]
    fn project_removes_normal_component() {
        let y = pt([0.0, 0.0, 1.0]);
        let t = sphere_project_tangent(&y, [1.0, 0.0, -1.0]).unwrap();
        match t.coords {
            TangentCoords::Sphere(d) => assert_eq!(d, [1.0, 0.0, 0.0]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn project_idempotent() {
        let y = pt([0.0, 0.0, 1.0]);
        let t = sphere_project_tangent(&y, [0.3, -0.4, 0.0]).unwrap();
        match t.coords {
            TangentCoords::Sphere(d) => assert_eq!(d, [0.3, -0.4, 0.0]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn log_orthogonal_pair() {
        let y = pt([0.0, 0.0, 1.0]);
        let x = pt([1.0, 0.0, 0.0]);
        let v = sphere_log(&y, &x).unwrap();
        match v.coords {
            TangentCoords::Sphere(d) => {
                assert!((d[0] - PI / 2.0).abs() < 1e-14);
                assert!(d[1].abs() < 1e-14 && d[2].abs() < 1e-14);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn log_antipodal_errors() {
        let y = pt([0.0, 0.0, 1.0]);
        let x = pt([0.0, 0.0, -1.0]);
        assert!(matches!(sphere_log(&y, &x), Err(Error::Antipodal { .. })));
    }

    #[test]
    fn exp_quarter_and_half_circle() {
        let y = pt([0.0, 0.0, 1.0]);
        let v = TangentVector {
            anchor: y.clone(),
            coords: TangentCoords::Sphere([PI / 2.0, 0.0, 0.0]),
        };
        let x = sphere_exp(&y, &v).unwrap();
        assert!(super::super::distance(&x, &pt([1.0, 0.0, 0.0])).unwrap() < 1e-14);

        let half = TangentVector {
            anchor: y.clone(),
            coords: TangentCoords::Sphere([PI, 0.0, 0.0]),
        };
        let anti = sphere_exp(&y, &half).unwrap();
        assert!(super::super::distance(&anti, &pt([0.0, 0.0, -1.0])).unwrap() < 1e-7);
    }

    #[test]
    fn exp_rejects_non_tangent() {
        let y = pt([0.0, 0.0, 1.0]);
        let v = TangentVector {
            anchor: y.clone(),
            coords: TangentCoords::Sphere([0.0, 0.0, 0.5]),
        };
        assert!(matches!(sphere_exp(&y, &v), Err(Error::NotTangent { .. })));
    }
}

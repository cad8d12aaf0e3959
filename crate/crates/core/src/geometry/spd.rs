//! Exp/log maps on SPD(3) under the Log-Euclidean metric.
//!
//! The maps flatten through the matrix logarithm; differentials of the
//! scalar functions are evaluated on the eigenbasis via first divided
//! differences (Daleckii-Krein).

use super::eig::{self, Mat3};
use super::{GeometryTag, ManifoldPoint, TangentCoords, TangentVector};
use crate::error::{Error, Result};

/// Matrix logarithm of an SPD matrix via symmetric eigendecomposition.
pub fn sym_matrix_log(x: &Mat3) -> Result<Mat3> {
    let (vals, q) = eig::sym_eigen(x);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotSpd {
            min_eigenvalue: min,
        });
    }
    let logs = [vals[0].ln(), vals[1].ln(), vals[2].ln()];
    Ok(eig::symmetric_part(&eig::from_eigen(&logs, &q)))
}

/// Matrix exponential of a symmetric matrix; output is always SPD.
pub fn sym_matrix_exp(v: &Mat3) -> Mat3 {
    let (vals, q) = eig::sym_eigen(v);
    let exps = [vals[0].exp(), vals[1].exp(), vals[2].exp()];
    eig::symmetric_part(&eig::from_eigen(&exps, &q))
}

/// First divided difference of exp: (e^a - e^b)/(a - b), continuously
/// extended by e^a on the diagonal.
fn dd_exp(a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let d = 0.5 * (a - b);
    let factor = if d.abs() < 1e-6 {
        1.0 + d * d / 6.0
    } else {
        d.sinh() / d
    };
    m.exp() * factor
}

/// First divided difference of ln on positive arguments, extended by 1/a.
fn dd_log(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d.abs() < 1e-7 * a.abs().max(b.abs()) {
        2.0 / (a + b)
    } else {
        (a.ln() - b.ln()) / d
    }
}

fn apply_divided_difference(base_vals: &[f64; 3], q: &Mat3, v: &Mat3, dd: fn(f64, f64) -> f64) -> Mat3 {
    let w = eig::mat_mul(&eig::mat_mul(&eig::transpose(q), v), q);
    let mut scaled = eig::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            scaled[i][j] = w[i][j] * dd(base_vals[i], base_vals[j]);
        }
    }
    eig::symmetric_part(&eig::mat_mul(&eig::mat_mul(q, &scaled), &eig::transpose(q)))
}

/// Differential of the matrix exponential at the symmetric matrix `s`,
/// applied to the symmetric direction `v`.
pub fn spd_dexp(s: &Mat3, v: &Mat3) -> Mat3 {
    let (vals, q) = eig::sym_eigen(s);
    apply_divided_difference(&vals, &q, v, dd_exp)
}

/// Differential of the matrix logarithm at the SPD matrix `y`, applied to
/// the symmetric direction `v`. Inverse of `spd_dexp` at `log(y)`.
pub fn spd_dlog(y: &Mat3, v: &Mat3) -> Mat3 {
    let (vals, q) = eig::sym_eigen(y);
    apply_divided_difference(&vals, &q, v, dd_log)
}

/// log_y(x) = D_{log(y)}exp (log x - log y).
pub fn spd_log(y: &ManifoldPoint, x: &ManifoldPoint) -> Result<TangentVector> {
    let (ym, xm) = match (y, x) {
        (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => (a, b),
        _ => {
            return Err(Error::TagMismatch {
                expected: GeometryTag::Spd3,
                got: x.tag(),
            })
        }
    };
    let ly = sym_matrix_log(ym)?;
    let lx = sym_matrix_log(xm)?;
    let delta = eig::sub(&lx, &ly);
    Ok(TangentVector {
        anchor: y.clone(),
        coords: TangentCoords::Spd(spd_dexp(&ly, &delta)),
    })
}

/// exp_y(v) = exp(log y + D_y log v).
pub fn spd_exp(y: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
    let (ym, vm) = match (y, &v.coords) {
        (ManifoldPoint::Spd(a), TangentCoords::Spd(m)) => (a, m),
        _ => {
            return Err(Error::TagMismatch {
                expected: GeometryTag::Spd3,
                got: v.tag(),
            })
        }
    };
    if eig::asymmetry(vm) > super::SYMMETRY_TOL {
        return Err(Error::InvalidPoint("spd tangent not symmetric".into()));
    }
    let ly = sym_matrix_log(ym)?;
    let shifted = eig::add(&ly, &spd_dlog(ym, vm));
    Ok(ManifoldPoint::Spd(sym_matrix_exp(&shifted)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_identity_is_zero() {
        let l = sym_matrix_log(&eig::IDENTITY).unwrap();
        assert!(eig::frobenius_norm(&l) < 1e-14);
        let e = sym_matrix_exp(&eig::ZERO);
        assert!(eig::frobenius_norm(&eig::sub(&e, &eig::IDENTITY)) < 1e-14);
    }

    #[test]
    fn log_diagonal() {
        let a = [
            [std::f64::consts::E, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let l = sym_matrix_log(&a).unwrap();
        let expected = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(eig::frobenius_norm(&eig::sub(&l, &expected)) < 1e-13);
    }

    #[test]
    fn log_rejects_non_spd() {
        let a = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        match sym_matrix_log(&a) {
            Err(Error::NotSpd { min_eigenvalue }) => assert!((min_eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("expected NotSpd, got {other:?}"),
        }
    }

    #[test]
    fn identity_anchor_reduces_to_matrix_log() {
        let y = ManifoldPoint::Spd(eig::IDENTITY);
        let x = ManifoldPoint::Spd([
            [std::f64::consts::E, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]);
        let v = spd_log(&y, &x).unwrap();
        match v.coords {
            TangentCoords::Spd(m) => {
                let expected = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
                assert!(eig::frobenius_norm(&eig::sub(&m, &expected)) < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn exp_of_zero_is_base() {
        let y = ManifoldPoint::Spd([[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 0.8]]);
        let v = TangentVector::zero(y.clone());
        let back = spd_exp(&y, &v).unwrap();
        assert!(super::super::distance(&back, &y).unwrap() < 1e-12);
    }

    #[test]
    fn dexp_dlog_are_inverse() {
        let y = [[2.0, 0.4, -0.1], [0.4, 1.2, 0.3], [-0.1, 0.3, 0.7]];
        let v = [[0.5, -0.2, 0.1], [-0.2, 0.3, 0.0], [0.1, 0.0, -0.4]];
        let ly = sym_matrix_log(&y).unwrap();
        let fwd = spd_dexp(&ly, &v);
        let back = spd_dlog(&y, &fwd);
        assert!(eig::frobenius_norm(&eig::sub(&back, &v)) < 1e-10);
    }
}

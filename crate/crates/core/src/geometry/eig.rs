//! Dense 3x3 symmetric matrix helpers and a cyclic Jacobi eigensolver.

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
pub const ZERO: Mat3 = [[0.0; 3]; 3];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for k in 0..3 {
            let aik = a[i][k];
            for j in 0..3 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn add(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn scale(a: &Mat3, s: f64) -> Mat3 {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

pub fn symmetric_part(a: &Mat3) -> Mat3 {
    let mut out = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    out
}

pub fn asymmetry(a: &Mat3) -> f64 {
    let mut acc = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let d = a[i][j] - a[j][i];
            acc += d * d;
        }
    }
    acc.sqrt()
}

pub fn frobenius_norm(a: &Mat3) -> f64 {
    let mut acc = 0.0;
    for row in a {
        for v in row {
            acc += v * v;
        }
    }
    acc.sqrt()
}

pub fn frobenius_inner(a: &Mat3, b: &Mat3) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += a[i][j] * b[i][j];
        }
    }
    acc
}

/// Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, q)` with `a = q * diag(eigenvalues) * q^T`;
/// eigenvector `k` is column `k` of `q`. Off-diagonal mass is driven below
/// 1e-13 relative to the matrix norm.
pub fn sym_eigen(a: &Mat3) -> ([f64; 3], Mat3) {
    let mut m = symmetric_part(a);
    let mut q = IDENTITY;
    let scale_ref = frobenius_norm(&m).max(1.0);
    let tol = 1e-13 * scale_ref;

    for _sweep in 0..64 {
        let off = (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        if off <= tol {
            break;
        }
        for (p, r) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apr = m[p][r];
            if apr.abs() <= tol * 1e-3 {
                continue;
            }
            // classic Jacobi rotation annihilating m[p][r]
            let theta = (m[r][r] - m[p][p]) / (2.0 * apr);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let mkp = m[k][p];
                let mkr = m[k][r];
                m[k][p] = c * mkp - s * mkr;
                m[k][r] = s * mkp + c * mkr;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mrk = m[r][k];
                m[p][k] = c * mpk - s * mrk;
                m[r][k] = s * mpk + c * mrk;
            }
            for k in 0..3 {
                let qkp = q[k][p];
                let qkr = q[k][r];
                q[k][p] = c * qkp - s * qkr;
                q[k][r] = s * qkp + c * qkr;
            }
        }
    }
    ([m[0][0], m[1][1], m[2][2]], q)
}

/// Rebuild `q * diag(d) * q^T`.
pub fn from_eigen(vals: &[f64; 3], q: &Mat3) -> Mat3 {
    let mut dqt = ZERO;
    for i in 0..3 {
        for j in 0..3 {
            dqt[i][j] = vals[i] * q[j][i];
        }
    }
    mat_mul(q, &dqt)
}

pub fn min_eigenvalue(a: &Mat3) -> f64 {
    let (vals, _) = sym_eigen(a);
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs_diagonal() {
        let a = [[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.5]];
        let (vals, q) = sym_eigen(&a);
        let back = from_eigen(&vals, &q);
        assert!(frobenius_norm(&sub(&a, &back)) < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_dense() {
        let a = [[2.0, 0.5, -0.3], [0.5, 1.5, 0.2], [-0.3, 0.2, 0.9]];
        let (vals, q) = sym_eigen(&a);
        let back = from_eigen(&vals, &q);
        assert!(frobenius_norm(&sub(&a, &back)) < 1e-12);
        // orthogonality of q
        let qtq = mat_mul(&transpose(&q), &q);
        assert!(frobenius_norm(&sub(&qtq, &IDENTITY)) < 1e-12);
    }
}

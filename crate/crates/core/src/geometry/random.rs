//! Random point generation for invariant sweeps and tests.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::eig::{self, Mat3};
use super::{GeometryTag, ManifoldPoint};

pub fn random_hsv<R: Rng>(rng: &mut R) -> ManifoldPoint {
    ManifoldPoint::hsv(
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.gen_range(0.0..1.0),
        rng.gen_range(0.0..1.0),
    )
}

pub fn random_sphere<R: Rng>(rng: &mut R) -> ManifoldPoint {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        if let Ok(p) = ManifoldPoint::sphere_normalized(v) {
            return p;
        }
    }
}

/// SPD sample as the matrix exponential of a random symmetric matrix; the
/// exp closure keeps the spectrum positive and reasonably conditioned.
pub fn random_spd<R: Rng>(rng: &mut R, spread: f64) -> ManifoldPoint {
    let mut s: Mat3 = eig::ZERO;
    for i in 0..3 {
        for j in i..3 {
            let g: f64 = StandardNormal.sample(rng);
            s[i][j] = g * spread;
            s[j][i] = s[i][j];
        }
    }
    ManifoldPoint::Spd(super::spd::sym_matrix_exp(&s))
}

pub fn random_point<R: Rng>(tag: GeometryTag, rng: &mut R) -> ManifoldPoint {
    match tag {
        GeometryTag::HsvProduct => random_hsv(rng),
        GeometryTag::Sphere2 => random_sphere(rng),
        GeometryTag::Spd3 => random_spd(rng, 0.6),
    }
}

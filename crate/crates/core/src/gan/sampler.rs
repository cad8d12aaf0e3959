//! Latent noise and synthetic target distributions for each geometry.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::autograd::Tensor;
use crate::error::{Error, Result};
use crate::geometry::{
    self, sym_matrix_exp, sym_matrix_log, GeometryTag, ManifoldPoint, Mat3, TangentBasis,
};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal latent batch of shape [n, dim].
pub fn sample_latent<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Tensor {
    let data = (0..n * dim).map(|_| StandardNormal.sample(rng)).collect();
    Tensor::new(vec![n, dim], data).expect("latent shape")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvComponent {
    pub weight: f64,
    /// Hue mode in radians; samples are wrapped Gaussians around it.
    pub hue_mean: f64,
    pub hue_sigma: f64,
    pub sat_mean: f64,
    pub sat_sigma: f64,
    pub val_mean: f64,
    pub val_sigma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmfComponent {
    pub weight: f64,
    /// Mean direction, normalized on use.
    pub mean: [f64; 3],
    /// Concentration; 0 gives the uniform distribution on the sphere.
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdComponent {
    pub weight: f64,
    /// Mode of the component, a symmetric positive definite matrix.
    pub mean: Mat3,
    /// Spread of the Gaussian perturbation in log space.
    pub sigma: f64,
}

/// Mixture families used as training targets. Every draw is exactly on
/// the manifold by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticTarget {
    HsvMixture { components: Vec<HsvComponent> },
    VmfMixture { components: Vec<VmfComponent> },
    SpdMixture { components: Vec<SpdComponent> },
}

impl SyntheticTarget {
    pub fn tag(&self) -> GeometryTag {
        match self {
            SyntheticTarget::HsvMixture { .. } => GeometryTag::HsvProduct,
            SyntheticTarget::VmfMixture { .. } => GeometryTag::Sphere2,
            SyntheticTarget::SpdMixture { .. } => GeometryTag::Spd3,
        }
    }

    fn weights(&self) -> Vec<f64> {
        match self {
            SyntheticTarget::HsvMixture { components } => {
                components.iter().map(|c| c.weight).collect()
            }
            SyntheticTarget::VmfMixture { components } => {
                components.iter().map(|c| c.weight).collect()
            }
            SyntheticTarget::SpdMixture { components } => {
                components.iter().map(|c| c.weight).collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.weights();
        if w.is_empty() {
            return Err(Error::Config("target mixture has no components".into()));
        }
        if w.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
            return Err(Error::Config("component weights must be positive".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "component weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    fn pick_component<R: Rng>(&self, rng: &mut R) -> usize {
        let w = self.weights();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            acc += wk;
            if u < acc {
                return k;
            }
        }
        w.len() - 1
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<ManifoldPoint> {
        let k = self.pick_component(rng);
        match self {
            SyntheticTarget::HsvMixture { components } => {
                let c = &components[k];
                let gh: f64 = StandardNormal.sample(rng);
                let gs: f64 = StandardNormal.sample(rng);
                let gv: f64 = StandardNormal.sample(rng);
                Ok(ManifoldPoint::hsv(
                    c.hue_mean + c.hue_sigma * gh,
                    (c.sat_mean + c.sat_sigma * gs).clamp(0.0, 1.0),
                    (c.val_mean + c.val_sigma * gv).clamp(0.0, 1.0),
                ))
            }
            SyntheticTarget::VmfMixture { components } => {
                let c = &components[k];
                let mean = ManifoldPoint::sphere_normalized(c.mean)?;
                Ok(ManifoldPoint::Sphere(sample_vmf(rng, &mean, c.kappa)?))
            }
            SyntheticTarget::SpdMixture { components } => {
                let c = &components[k];
                let base = sym_matrix_log(&c.mean)?;
                let mut e = [[0.0f64; 3]; 3];
                for i in 0..3 {
                    let g: f64 = StandardNormal.sample(rng);
                    e[i][i] = c.sigma * g;
                    for j in (i + 1)..3 {
                        let g: f64 = StandardNormal.sample(rng);
                        let off = c.sigma * SQRT_HALF * g;
                        e[i][j] = off;
                        e[j][i] = off;
                    }
                }
                let mut sum = base;
                for i in 0..3 {
                    for j in 0..3 {
                        sum[i][j] += e[i][j];
                    }
                }
                ManifoldPoint::spd(sym_matrix_exp(&sum))
            }
        }
    }

    pub fn sample_many<R: Rng>(&self, rng: &mut R, n: usize) -> Result<Vec<ManifoldPoint>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Desk-scale default target for each geometry: a well-separated
    /// two-component mixture.
    pub fn default_for(tag: GeometryTag) -> SyntheticTarget {
        match tag {
            GeometryTag::HsvProduct => SyntheticTarget::HsvMixture {
                components: vec![
                    HsvComponent {
                        weight: 0.5,
                        hue_mean: -1.8,
                        hue_sigma: 0.25,
                        sat_mean: 0.7,
                        sat_sigma: 0.08,
                        val_mean: 0.6,
                        val_sigma: 0.08,
                    },
                    HsvComponent {
                        weight: 0.5,
                        hue_mean: 1.2,
                        hue_sigma: 0.25,
                        sat_mean: 0.4,
                        sat_sigma: 0.08,
                        val_mean: 0.8,
                        val_sigma: 0.08,
                    },
                ],
            },
            GeometryTag::Sphere2 => SyntheticTarget::VmfMixture {
                components: vec![
                    VmfComponent {
                        weight: 0.5,
                        mean: [1.0, 0.2, 0.1],
                        kappa: 30.0,
                    },
                    VmfComponent {
                        weight: 0.5,
                        mean: [-0.3, 0.9, 0.4],
                        kappa: 30.0,
                    },
                ],
            },
            GeometryTag::Spd3 => SyntheticTarget::SpdMixture {
                components: vec![
                    SpdComponent {
                        weight: 0.5,
                        mean: [[1.5, 0.3, 0.0], [0.3, 0.8, 0.1], [0.0, 0.1, 1.1]],
                        sigma: 0.12,
                    },
                    SpdComponent {
                        weight: 0.5,
                        mean: [[0.5, -0.1, 0.2], [-0.1, 1.9, 0.0], [0.2, 0.0, 0.7]],
                        sigma: 0.12,
                    },
                ],
            },
        }
    }
}

/// Draw from the von Mises-Fisher distribution on S^2 with the closed-form
/// inverse CDF for the cosine w of the polar angle:
/// w = 1 + ln(u + (1 - u) e^(-2 kappa)) / kappa.
fn sample_vmf<R: Rng>(rng: &mut R, mean: &ManifoldPoint, kappa: f64) -> Result<[f64; 3]> {
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::Config(format!("kappa {kappa} must be >= 0")));
    }
    let mu = match mean {
        ManifoldPoint::Sphere(v) => *v,
        _ => unreachable!(),
    };
    let u: f64 = rng.gen();
    let w = if kappa < 1e-12 {
        2.0 * u - 1.0
    } else {
        (1.0 + (u + (1.0 - u) * (-2.0 * kappa).exp()).ln() / kappa).clamp(-1.0, 1.0)
    };
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let basis = TangentBasis::new(mean)?;
    let vs = basis.basis_to_ambient(&[phi.cos(), phi.sin()])?;
    let dir = match vs.coords {
        geometry::TangentCoords::Sphere(d) => d,
        _ => unreachable!(),
    };
    let s = (1.0 - w * w).max(0.0).sqrt();
    let x = [
        w * mu[0] + s * dir[0],
        w * mu[1] + s * dir[1],
        w * mu[2] + s * dir[2],
    ];
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    Ok([x[0] / n, x[1] / n, x[2] / n])
}

//! Objectives for critic and generator, expressed on the tape so the
//! gradient-penalty term can be differentiated through twice.

use rand::Rng;

use super::network::Mlp;
use crate::autograd::{grad, Tape, Tensor, Value};
use crate::error::{Error, Result};
use crate::geometry::{self, GeometryTag, ManifoldPoint, TangentBasis};

/// Fixed-anchor tangent coordinates shared by both networks.
#[derive(Debug, Clone)]
pub struct GanGeometry {
    pub tag: GeometryTag,
    pub anchor: ManifoldPoint,
    pub basis: TangentBasis,
}

impl GanGeometry {
    pub fn new(tag: GeometryTag, anchor: ManifoldPoint) -> Result<Self> {
        if anchor.tag() != tag {
            return Err(Error::TagMismatch {
                expected: tag,
                got: anchor.tag(),
            });
        }
        let basis = TangentBasis::new(&anchor)?;
        Ok(GanGeometry { tag, anchor, basis })
    }

    pub fn dim(&self) -> usize {
        self.tag.tangent_dim()
    }

    /// Log every point at the anchor and stack the basis coordinates into
    /// an [n, dim] tensor.
    pub fn points_to_coords(&self, points: &[ManifoldPoint]) -> Result<Tensor> {
        let d = self.dim();
        let mut data = Vec::with_capacity(points.len() * d);
        for p in points {
            let v = geometry::log(&self.anchor, p)?;
            data.extend(self.basis.ambient_to_basis(&v)?);
        }
        Tensor::new(vec![points.len(), d], data)
    }

    /// Exponentiate each coordinate row back onto the manifold. This is
    /// how generator outputs become points, so they are valid by
    /// construction.
    pub fn coords_to_points(&self, coords: &Tensor) -> Result<Vec<ManifoldPoint>> {
        let d = self.dim();
        if coords.shape.len() != 2 || coords.shape[1] != d {
            return Err(Error::ShapeMismatch {
                op: "coords_to_points".into(),
                left: coords.shape.clone(),
                right: vec![coords.shape.first().copied().unwrap_or(0), d],
            });
        }
        coords
            .data
            .chunks(d)
            .map(|row| {
                let v = self.basis.basis_to_ambient(row)?;
                geometry::exp(&self.anchor, &v)
            })
            .collect()
    }

    /// Difference between raw coordinates and their canonical form
    /// log_y(exp_y(.)). Identity for SPD, a hue translation for HSV, and
    /// the identity inside the sphere's injectivity radius; rows whose
    /// exponential lands at the log's cut locus keep their raw value.
    pub fn canonical_offset(&self, raw: &Tensor) -> Result<Tensor> {
        let d = self.dim();
        let mut out = vec![0.0; raw.data.len()];
        for (r, row) in raw.data.chunks(d).enumerate() {
            let v = self.basis.basis_to_ambient(row)?;
            let p = geometry::exp(&self.anchor, &v)?;
            match geometry::log(&self.anchor, &p) {
                Ok(back) => {
                    let canon = self.basis.ambient_to_basis(&back)?;
                    for k in 0..d {
                        out[r * d + k] = canon[k] - row[k];
                    }
                }
                Err(Error::Antipodal { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Tensor::new(raw.shape.clone(), out)
    }

    /// Canonical coordinates of raw generator output, differentiable in
    /// the raw coordinates. The offset is locally constant wherever the
    /// canonicalization is defined, so it enters the tape as a constant.
    pub fn canonicalize(&self, raw: &Value) -> Result<Value> {
        let offset = self.canonical_offset(&raw.value())?;
        raw.add(&raw.tape().constant(offset))
    }

    /// Soft radial bound on generator outputs. On the sphere, rows are
    /// rescaled so their norm stays below the injectivity radius pi,
    /// where the log of the exponential ceases to be the identity and
    /// training destabilizes. The other geometries pass through.
    pub fn squash(&self, raw: &Value) -> Result<Value> {
        if self.tag != GeometryTag::Sphere2 {
            return Ok(raw.clone());
        }
        let r = SPHERE_SQUASH_RADIUS;
        let n = raw.l2_norm_rows()?;
        let factor = n
            .scalar_mul(1.0 / r)
            .tanh()
            .scalar_mul(r)
            .mul(&n.recip())?;
        raw.mul(&factor.broadcast_cols(self.dim())?)
    }

    /// Same bound applied outside any tape.
    pub fn squash_tensor(&self, raw: &Tensor) -> Result<Tensor> {
        if self.tag != GeometryTag::Sphere2 {
            return Ok(raw.clone());
        }
        let r = SPHERE_SQUASH_RADIUS;
        let d = self.dim();
        let mut out = raw.data.clone();
        for row in out.chunks_mut(d) {
            let n = (row.iter().map(|v| v * v).sum::<f64>() + 1e-12).sqrt();
            let factor = r * (n / r).tanh() / n;
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        Tensor::new(raw.shape.clone(), out)
    }
}

/// Strictly inside the sphere's injectivity radius.
pub const SPHERE_SQUASH_RADIUS: f64 = 3.0;

/// Pieces of one critic update: the scalar to minimize plus the detached
/// diagnostic terms that go into the training log.
#[derive(Debug, Clone)]
pub struct CriticLossParts {
    pub total: Value,
    /// E[D(fake)] - E[D(real)], the negated Wasserstein surrogate.
    pub wasserstein_gap: f64,
    pub gradient_penalty: f64,
}

/// WGAN-GP critic objective on one minibatch of coordinate rows.
///
/// `ts` holds one interpolation coefficient per sample; interpolates are
/// formed in the fixed-anchor tangent space, which matches interpolating
/// the underlying log maps.
pub fn critic_loss(
    tape: &Tape,
    critic: &Mlp,
    critic_params: &[Value],
    real_coords: &Tensor,
    fake_coords: &Tensor,
    ts: &[f64],
    lambda: f64,
) -> Result<CriticLossParts> {
    if real_coords.shape != fake_coords.shape {
        return Err(Error::ShapeMismatch {
            op: "critic_loss batches".into(),
            left: real_coords.shape.clone(),
            right: fake_coords.shape.clone(),
        });
    }
    let (n, d) = (real_coords.shape[0], real_coords.shape[1]);
    if ts.len() != n {
        return Err(Error::Config(format!(
            "need {n} interpolation coefficients, got {}",
            ts.len()
        )));
    }

    let real = tape.constant(real_coords.clone());
    let fake = tape.constant(fake_coords.clone());
    let scores_real = critic.forward(&real, critic_params)?;
    let scores_fake = critic.forward(&fake, critic_params)?;
    let gap = scores_fake.mean_all().sub(&scores_real.mean_all())?;

    let mut hat = vec![0.0; n * d];
    for i in 0..n {
        let t = ts[i];
        for k in 0..d {
            let idx = i * d + k;
            hat[idx] = (1.0 - t) * real_coords.data[idx] + t * fake_coords.data[idx];
        }
    }
    let x_hat = tape.leaf(Tensor::new(vec![n, d], hat)?);
    let scores_hat = critic.forward(&x_hat, critic_params)?;
    let g = grad(&scores_hat.sum_all(), &[x_hat], true)?;
    let penalty = g[0]
        .l2_norm_rows()?
        .add_scalar(-1.0)
        .square()
        .mean_all()
        .scalar_mul(lambda);

    let total = gap.add(&penalty)?;
    Ok(CriticLossParts {
        wasserstein_gap: gap.scalar_value(),
        gradient_penalty: penalty.scalar_value(),
        total,
    })
}

/// Generator objective: -E[D(log_y(exp_y(G(z))))].
pub fn generator_loss(
    geom: &GanGeometry,
    generator: &Mlp,
    gen_params: &[Value],
    critic: &Mlp,
    critic_params: &[Value],
    z: &Value,
) -> Result<Value> {
    let raw = geom.squash(&generator.forward(z, gen_params)?)?;
    let coords = geom.canonicalize(&raw)?;
    let scores = critic.forward(&coords, critic_params)?;
    Ok(scores.mean_all().neg())
}

/// One uniform interpolation coefficient per sample.
pub fn sample_ts<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen()).collect()
}

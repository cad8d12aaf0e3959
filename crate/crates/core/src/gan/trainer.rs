//! Minibatch WGAN-GP training loop over fixed-anchor tangent coordinates,
//! with periodic exact Wasserstein-1 evaluation against held-out samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::adam::AdamState;
use super::checkpoint::{write_atomic, Checkpoint};
use super::loss::{critic_loss, generator_loss, sample_ts, GanGeometry};
use super::network::Mlp;
use super::sampler::{sample_latent, SyntheticTarget};
use crate::autograd::{grad, Tape, Tensor};
use crate::error::{Error, Result};
use crate::geometry::{AnchorSet, GeometryTag, ManifoldPoint};
use crate::transport::{w1, w1_with_cost, CostKind, SampleSet, W1Method};

fn d_latent() -> usize {
    32
}
fn d_hidden() -> Vec<usize> {
    vec![128, 128]
}
fn d_lr() -> f64 {
    2e-4
}
fn d_batch() -> usize {
    64
}
fn d_n_critic() -> usize {
    5
}
fn d_lambda() -> f64 {
    10.0
}
fn d_iters() -> usize {
    2000
}
fn d_eval_interval() -> usize {
    200
}
fn d_eval_samples() -> usize {
    256
}
fn d_real_samples() -> usize {
    2048
}
fn d_true() -> bool {
    true
}

/// Ground cost used for the periodic W1 evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalCost {
    #[default]
    Geodesic,
    /// Tangent-space distance at the training anchor.
    Anchored,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerConfig {
    pub geometry: GeometryTag,
    /// Mixture to learn; the per-geometry default when omitted.
    #[serde(default)]
    pub target: Option<SyntheticTarget>,
    #[serde(default = "d_latent")]
    pub latent_dim: usize,
    #[serde(default = "d_hidden")]
    pub generator_hidden: Vec<usize>,
    #[serde(default = "d_hidden")]
    pub critic_hidden: Vec<usize>,
    #[serde(default = "d_lr")]
    pub learning_rate: f64,
    #[serde(default = "d_batch")]
    pub batch_size: usize,
    #[serde(default = "d_n_critic")]
    pub n_critic: usize,
    #[serde(default = "d_lambda")]
    pub gp_lambda: f64,
    #[serde(default = "d_iters")]
    pub generator_iters: usize,
    #[serde(default = "d_eval_interval")]
    pub eval_interval: usize,
    #[serde(default = "d_eval_samples")]
    pub eval_samples: usize,
    /// Size of the fixed training pool drawn from the target up front.
    #[serde(default = "d_real_samples")]
    pub real_samples: usize,
    /// Decay the learning rate linearly to zero over the budget.
    #[serde(default = "d_true")]
    pub lr_decay: bool,
    #[serde(default)]
    pub eval_cost: EvalCost,
    #[serde(default)]
    pub seed: u64,
}

impl TrainerConfig {
    pub fn desk_scale(geometry: GeometryTag) -> Self {
        TrainerConfig {
            geometry,
            target: None,
            latent_dim: d_latent(),
            generator_hidden: d_hidden(),
            critic_hidden: d_hidden(),
            learning_rate: d_lr(),
            batch_size: d_batch(),
            n_critic: d_n_critic(),
            gp_lambda: d_lambda(),
            generator_iters: d_iters(),
            eval_interval: d_eval_interval(),
            eval_samples: d_eval_samples(),
            real_samples: d_real_samples(),
            lr_decay: true,
            eval_cost: EvalCost::Geodesic,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("latent_dim", self.latent_dim),
            ("batch_size", self.batch_size),
            ("n_critic", self.n_critic),
            ("generator_iters", self.generator_iters),
            ("eval_interval", self.eval_interval),
            ("eval_samples", self.eval_samples),
            ("real_samples", self.real_samples),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !(self.learning_rate > 0.0) || !(self.gp_lambda >= 0.0) {
            return Err(Error::Config(
                "learning_rate must be > 0 and gp_lambda >= 0".into(),
            ));
        }
        if let Some(t) = &self.target {
            if t.tag() != self.geometry {
                return Err(Error::TagMismatch {
                    expected: self.geometry,
                    got: t.tag(),
                });
            }
            t.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub iter: usize,
    pub critic_loss: f64,
    pub gen_loss: f64,
    pub gp_term: f64,
    pub w1_eval: Option<f64>,
    pub lr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub records: Vec<LogRecord>,
}

impl TrainingLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,critic_loss,gen_loss,gp_term,w1_eval,lr\n");
        for r in &self.records {
            let w1 = r.w1_eval.map(|v| format!("{v:.17e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{},{:.17e}\n",
                r.iter, r.critic_loss, r.gen_loss, r.gp_term, w1, r.lr
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("iter,critic_loss,gen_loss,gp_term,w1_eval,lr") => {}
            _ => return Err(Error::Format("bad training log header".into())),
        }
        let mut records = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::Format(format!(
                    "log line {}: expected 6 fields",
                    lineno + 2
                )));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::Format(format!("log line {}: bad number {s}", lineno + 2)))
            };
            records.push(LogRecord {
                iter: fields[0]
                    .parse()
                    .map_err(|_| Error::Format(format!("log line {}: bad iter", lineno + 2)))?,
                critic_loss: num(fields[1])?,
                gen_loss: num(fields[2])?,
                gp_term: num(fields[3])?,
                w1_eval: if fields[4].is_empty() {
                    None
                } else {
                    Some(num(fields[4])?)
                },
                lr: num(fields[5])?,
            });
        }
        Ok(TrainingLog { records })
    }

    /// (iteration, w1) pairs at the evaluation checkpoints.
    pub fn w1_series(&self) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.w1_eval.map(|v| (r.iter, v)))
            .collect()
    }
}

#[derive(Debug)]
pub struct TrainingOutcome {
    pub log: TrainingLog,
    pub generator: Mlp,
    pub critic: Mlp,
    pub geometry: GanGeometry,
    pub checkpoints: Vec<Checkpoint>,
}

/// Draw latent noise and push it through generator and exponential map.
pub fn generate<R: Rng>(
    generator: &Mlp,
    geom: &GanGeometry,
    rng: &mut R,
    n: usize,
) -> Result<Vec<ManifoldPoint>> {
    let z = sample_latent(rng, n, generator.input_dim());
    let raw = geom.squash_tensor(&generator.forward_tensor(&z)?)?;
    geom.coords_to_points(&raw)
}

fn check_finite(data: &[f64], context: &str) -> Result<()> {
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NanAbort {
            context: context.into(),
        });
    }
    Ok(())
}

fn batch_rows<R: Rng>(pool: &Tensor, rng: &mut R, m: usize) -> Tensor {
    let (n, d) = (pool.shape[0], pool.shape[1]);
    let mut data = Vec::with_capacity(m * d);
    for _ in 0..m {
        let i = rng.gen_range(0..n);
        data.extend_from_slice(&pool.data[i * d..(i + 1) * d]);
    }
    Tensor::new(vec![m, d], data).expect("batch shape")
}

pub fn train(cfg: &TrainerConfig) -> Result<TrainingOutcome> {
    cfg.validate()?;
    let target = cfg
        .target
        .clone()
        .unwrap_or_else(|| SyntheticTarget::default_for(cfg.geometry));
    target.validate()?;
    if target.tag() != cfg.geometry {
        return Err(Error::TagMismatch {
            expected: cfg.geometry,
            got: target.tag(),
        });
    }

    let geom = GanGeometry::new(cfg.geometry, AnchorSet::default().anchor(cfg.geometry))?;
    let d = geom.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let pool = target.sample_many(&mut rng, cfg.real_samples)?;
    let pool_coords = geom.points_to_coords(&pool)?;
    let eval_real = SampleSet::uniform(target.sample_many(&mut rng, cfg.eval_samples)?)?;

    let mut gen_dims = vec![cfg.latent_dim];
    gen_dims.extend(&cfg.generator_hidden);
    gen_dims.push(d);
    let mut critic_dims = vec![d];
    critic_dims.extend(&cfg.critic_hidden);
    critic_dims.push(1);

    let mut generator = Mlp::init(&gen_dims, 0.2, &mut rng)?;
    let mut critic = Mlp::init(&critic_dims, 0.2, &mut rng)?;
    let mut gen_params = generator.parameters();
    let mut critic_params = critic.parameters();
    let mut adam_g = AdamState::new(&gen_params);
    let mut adam_c = AdamState::new(&critic_params);

    let mut log = TrainingLog::default();
    let mut checkpoints = Vec::new();

    let evaluate = |generator: &Mlp, rng: &mut ChaCha8Rng| -> Result<f64> {
        let fake = generate(generator, &geom, rng, cfg.eval_samples)?;
        let fake = SampleSet::uniform(fake)?;
        match cfg.eval_cost {
            EvalCost::Geodesic => w1(&fake, &eval_real, W1Method::Exact),
            EvalCost::Anchored => w1_with_cost(
                &fake,
                &eval_real,
                W1Method::Exact,
                CostKind::Anchored,
                Some(&geom.anchor),
            ),
        }
    };
    let snapshot = |iter: usize, generator: &Mlp, critic: &Mlp| Checkpoint {
        iter,
        geometry: cfg.geometry,
        anchor: geom.anchor.clone(),
        latent_dim: cfg.latent_dim,
        generator: generator.clone(),
        critic: critic.clone(),
    };

    let w0 = evaluate(&generator, &mut rng)?;
    checkpoints.push(snapshot(0, &generator, &critic));
    log.records.push(LogRecord {
        iter: 0,
        critic_loss: f64::NAN,
        gen_loss: f64::NAN,
        gp_term: f64::NAN,
        w1_eval: Some(w0),
        lr: cfg.learning_rate,
    });

    for iter in 1..=cfg.generator_iters {
        let lr = if cfg.lr_decay {
            cfg.learning_rate * (1.0 - (iter - 1) as f64 / cfg.generator_iters as f64)
        } else {
            cfg.learning_rate
        };

        let mut last_critic_loss = 0.0;
        let mut last_gp = 0.0;
        for _ in 0..cfg.n_critic {
            let real = batch_rows(&pool_coords, &mut rng, cfg.batch_size);
            let z = sample_latent(&mut rng, cfg.batch_size, cfg.latent_dim);
            let raw = geom.squash_tensor(&generator.forward_tensor(&z)?)?;
            let offset = geom.canonical_offset(&raw)?;
            let fake = Tensor::new(
                raw.shape.clone(),
                raw.data.iter().zip(&offset.data).map(|(a, b)| a + b).collect(),
            )?;
            let ts = sample_ts(&mut rng, cfg.batch_size);

            let tape = Tape::new();
            let params = critic.params_as_leaves(&tape);
            let parts = critic_loss(&tape, &critic, &params, &real, &fake, &ts, cfg.gp_lambda)?;
            last_critic_loss = parts.total.scalar_value();
            last_gp = parts.gradient_penalty;
            check_finite(
                &[last_critic_loss],
                &format!("critic loss at generator iteration {iter}"),
            )?;
            let grads: Vec<Tensor> = grad(&parts.total, &params, false)?
                .iter()
                .map(|g| g.value())
                .collect();
            for g in &grads {
                check_finite(&g.data, &format!("critic gradient at iteration {iter}"))?;
            }
            adam_c.step(&mut critic_params, &grads, lr)?;
            critic.set_parameters(&critic_params)?;
        }

        let z = sample_latent(&mut rng, cfg.batch_size, cfg.latent_dim);
        let tape = Tape::new();
        let params = generator.params_as_leaves(&tape);
        let critic_consts = critic.params_as_constants(&tape);
        let zv = tape.constant(z);
        let loss = generator_loss(&geom, &generator, &params, &critic, &critic_consts, &zv)?;
        let gen_loss = loss.scalar_value();
        check_finite(&[gen_loss], &format!("generator loss at iteration {iter}"))?;
        let grads: Vec<Tensor> = grad(&loss, &params, false)?
            .iter()
            .map(|g| g.value())
            .collect();
        for g in &grads {
            check_finite(&g.data, &format!("generator gradient at iteration {iter}"))?;
        }
        adam_g.step(&mut gen_params, &grads, lr)?;
        generator.set_parameters(&gen_params)?;

        let w1_eval = if iter % cfg.eval_interval == 0 || iter == cfg.generator_iters {
            let v = evaluate(&generator, &mut rng)?;
            checkpoints.push(snapshot(iter, &generator, &critic));
            Some(v)
        } else {
            None
        };
        log.records.push(LogRecord {
            iter,
            critic_loss: last_critic_loss,
            gen_loss,
            gp_term: last_gp,
            w1_eval,
            lr,
        });
    }

    Ok(TrainingOutcome {
        log,
        generator,
        critic,
        geometry: geom,
        checkpoints,
    })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

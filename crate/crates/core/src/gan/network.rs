//! Small fully connected networks for generator and critic.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::autograd::{Tape, Tensor, Value};
use crate::error::{Error, Result};

/// MLP with leaky-relu hidden layers and a linear output layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    pub layer_dims: Vec<usize>,
    pub hidden_slope: f64,
    /// Interleaved [w0, b0, w1, b1, ...] flat parameter payloads.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// He-style initialization scaled for leaky-relu hidden layers.
    pub fn init<R: Rng>(layer_dims: &[usize], hidden_slope: f64, rng: &mut R) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::Config(format!("bad layer dims {layer_dims:?}")));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let scale = (2.0 / fan_in as f64).sqrt();
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| {
                    let g: f64 = StandardNormal.sample(rng);
                    g * scale
                })
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Mlp {
            layer_dims: layer_dims.to_vec(),
            hidden_slope,
            weights,
            biases,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn layer_count(&self) -> usize {
        self.layer_dims.len() - 1
    }

    /// Parameters as tensors in [w0, b0, w1, b1, ...] order.
    pub fn parameters(&self) -> Vec<Tensor> {
        let mut out = Vec::new();
        for (k, pair) in self.layer_dims.windows(2).enumerate() {
            out.push(Tensor::new(vec![pair[0], pair[1]], self.weights[k].clone()).unwrap());
            out.push(Tensor::vector(self.biases[k].clone()));
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[Tensor]) -> Result<()> {
        if params.len() != 2 * self.layer_count() {
            return Err(Error::Config(format!(
                "expected {} parameter tensors, got {}",
                2 * self.layer_count(),
                params.len()
            )));
        }
        for k in 0..self.layer_count() {
            let (fan_in, fan_out) = (self.layer_dims[k], self.layer_dims[k + 1]);
            let w = &params[2 * k];
            let b = &params[2 * k + 1];
            if w.shape != vec![fan_in, fan_out] || b.shape != vec![fan_out] {
                return Err(Error::ShapeMismatch {
                    op: format!("layer {k} parameters"),
                    left: w.shape.clone(),
                    right: vec![fan_in, fan_out],
                });
            }
            self.weights[k] = w.data.clone();
            self.biases[k] = b.data.clone();
        }
        Ok(())
    }

    /// Register parameters on the tape as differentiable leaves.
    pub fn params_as_leaves(&self, tape: &Tape) -> Vec<Value> {
        self.parameters().into_iter().map(|t| tape.leaf(t)).collect()
    }

    /// Register parameters as constants (no gradient tracking).
    pub fn params_as_constants(&self, tape: &Tape) -> Vec<Value> {
        self.parameters()
            .into_iter()
            .map(|t| tape.constant(t))
            .collect()
    }

    /// Forward pass on the tape. `params` must follow the parameters()
    /// layout; `x` is a [batch, input_dim] matrix.
    pub fn forward(&self, x: &Value, params: &[Value]) -> Result<Value> {
        let layers = self.layer_count();
        let mut h = x.clone();
        for k in 0..layers {
            h = h.matmul(&params[2 * k])?.bias_add(&params[2 * k + 1])?;
            if k + 1 < layers {
                h = h.leaky_relu(self.hidden_slope);
            }
        }
        Ok(h)
    }

    /// All parameters concatenated in parameters() order.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.layer_count() {
            out.extend_from_slice(&self.weights[k]);
            out.extend_from_slice(&self.biases[k]);
        }
        out
    }

    pub fn flat_len(layer_dims: &[usize]) -> usize {
        layer_dims
            .windows(2)
            .map(|p| p[0] * p[1] + p[1])
            .sum()
    }

    /// Rebuild a network from its architecture and flat parameter payload.
    pub fn from_flat(layer_dims: &[usize], hidden_slope: f64, flat: &[f64]) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::Config(format!("bad layer dims {layer_dims:?}")));
        }
        if flat.len() != Self::flat_len(layer_dims) {
            return Err(Error::Config(format!(
                "expected {} parameters for dims {layer_dims:?}, got {}",
                Self::flat_len(layer_dims),
                flat.len()
            )));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut at = 0;
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            weights.push(flat[at..at + fan_in * fan_out].to_vec());
            at += fan_in * fan_out;
            biases.push(flat[at..at + fan_out].to_vec());
            at += fan_out;
        }
        Ok(Mlp {
            layer_dims: layer_dims.to_vec(),
            hidden_slope,
            weights,
            biases,
        })
    }

    /// Forward pass outside any tape, for sampling.
    pub fn forward_tensor(&self, x: &Tensor) -> Result<Tensor> {
        let tape = Tape::new();
        let xv = tape.constant(x.clone());
        let params = self.params_as_constants(&tape);
        Ok(self.forward(&xv, &params)?.value())
    }
}

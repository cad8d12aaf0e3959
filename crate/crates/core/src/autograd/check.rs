//! Central finite-difference verification of reverse-mode gradients.

use super::tape::{grad, Tape, Value};
use super::tensor::Tensor;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare reverse-mode gradients of a scalar function against central
/// finite differences, elementwise over every input tensor.
///
/// Relative error uses max(|analytic|, |numeric|, 1) as denominator so the
/// check is absolute for small gradients.
pub fn gradient_check<F>(f: F, inputs: &[Tensor], step: f64, tol: f64) -> Result<GradCheckReport>
where
    F: Fn(&Tape, &[Value]) -> Result<Value>,
{
    // analytic pass
    let tape = Tape::new();
    let vals: Vec<Value> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
    let out = f(&tape, &vals)?;
    let grads = grad(&out, &vals, false)?;

    let eval = |perturbed: &[Tensor]| -> Result<f64> {
        let tape = Tape::new();
        let vals: Vec<Value> = perturbed.iter().map(|t| tape.leaf(t.clone())).collect();
        Ok(f(&tape, &vals)?.scalar_value())
    };

    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (k, input) in inputs.iter().enumerate() {
        let analytic = grads[k].value();
        for idx in 0..input.len() {
            let mut plus = inputs.to_vec();
            plus[k].data[idx] += step;
            let mut minus = inputs.to_vec();
            minus[k].data[idx] -= step;
            let numeric = (eval(&plus)? - eval(&minus)?) / (2.0 * step);
            let a = analytic.data[idx];
            let abs = (a - numeric).abs();
            let rel = abs / a.abs().max(numeric.abs()).max(1.0);
            max_abs = max_abs.max(abs);
            max_rel = max_rel.max(rel);
        }
    }
    Ok(GradCheckReport {
        max_rel_error: max_rel,
        max_abs_error: max_abs,
        tolerance: tol,
        pass: max_rel < tol,
    })
}

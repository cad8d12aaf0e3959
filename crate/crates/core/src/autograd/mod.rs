//! Minimal reverse-mode automatic differentiation over dense float64
//! tensors, with gradients that can themselves be differentiated.

mod check;
mod tape;
mod tensor;

pub use check::{gradient_check, GradCheckReport};
pub use tape::{grad, Tape, Value};
pub use tensor::Tensor;

#[cfg(test)]
mod tests;

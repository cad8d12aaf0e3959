//! Manifold-valued image generation toolkit: Riemannian geometry for three
//! image manifolds, geodesic-cost Wasserstein-1 evaluation, a minimal
//! double-backprop autodiff engine, and a WGAN-GP trainer that keeps every
//! generated sample on its manifold by construction.

pub mod autograd;
pub mod error;
pub mod gan;
pub mod geometry;
pub mod imaging;
pub mod transport;

pub use error::{Error, Result};

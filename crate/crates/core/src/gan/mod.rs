//! Wasserstein GAN with gradient penalty, trained entirely in the tangent
//! space at a fixed anchor; generator outputs reach the manifold through
//! the exponential map.

mod adam;
mod checkpoint;
mod loss;
mod network;
mod sampler;
mod trainer;

pub use adam::AdamState;
pub use checkpoint::{load_checkpoint, save_checkpoint, write_atomic, Checkpoint};
pub use loss::{critic_loss, generator_loss, sample_ts, CriticLossParts, GanGeometry};
pub use network::Mlp;
pub use sampler::{
    sample_latent, HsvComponent, SpdComponent, SyntheticTarget, VmfComponent,
};
pub use trainer::{
    generate, spearman, train, EvalCost, LogRecord, TrainerConfig, TrainingLog,
    TrainingOutcome,
};

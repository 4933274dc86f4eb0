//! Conditional tabular GAN: condition vectors, the generator and
//! discriminator pair, and the training loop.

mod condition;
mod model;
mod train;

pub use condition::{build_condition, category_counts, sample_condition, CondLayout, Condition, ConditionSampler};
pub use model::{sigmoid, GanModel, GeneratorPass, Head};
pub(crate) use model::softplus;
pub use train::{train, train_with_encoder, EpochLoss, TrainConfig, Trainer};

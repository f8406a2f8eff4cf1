//! Toy masked-attention denoiser.
//!
//! A few-thousand-parameter model used to check the group-scoped mask
//! numerically: single-head attention layers with residual connections over
//! the embedded interleaved sequence, a linear denoising head on the target
//! block, hand-written backpropagation, and plain gradient descent.

mod check;
pub mod linalg;
mod model;
mod params;
pub mod task;
mod train;

pub use check::{compare_gradients, grad_check, leakage_jacobian, leakage_probe, GradCheckReport, LeakageProbe, FD_STEP, GRAD_FLOOR};
pub use model::{
    attention_backward, attention_forward, attention_mask, denoise_loss, embed_sequence, linear_schedule, masked_attention, mse,
    AttentionCache, DenoiseExample, ForwardPass, LatentState, MaskMode, RawPatches,
};
pub use params::{AttentionWeights, ModelDims, ToyModelParams, TEXT_CLASSES};
pub use train::{batch_loss_and_grad, conflict_benchmark, mean_loss, train, train_toy, ConflictResult, TrainConfig, TrainedModel};

//! Dense matrices, fully connected networks, their gradients (including the
//! second-order gradient-penalty term) and the RMSprop optimizer.

mod loss;
mod matrix;
mod mlp;
mod penalty;
mod rmsprop;

pub use loss::{argmax, softmax_cross_entropy};
pub use matrix::{dot, l2_norm, Matrix};
pub use mlp::{
    mlp_backward, mlp_forward, sigmoid, Dense, ForwardCache, HiddenActivation, MlpGrads, MlpParams, OutputActivation,
    DEFAULT_LEAKY_SLOPE,
};
pub use penalty::{critic_input_gradient, gradient_penalty_param_grads, input_gradient_chain, InputGradient};
pub use rmsprop::{rmsprop_step, RmspropConfig, RmspropState};

//! Input gradients of a scalar critic and the gradient penalty on them.
//!
//! For a critic `D` with layers `a_l = h_{l-1} W_l + b_l`, the input gradient
//! unrolls to
//!
//! ```text
//! δ_L = 1,  δ_{l-1} = (δ_l W_lᵀ) ⊙ m_{l-1},  ∇ₓD = δ_1 W_1ᵀ
//! ```
//!
//! where `m_l` is the leaky-ReLU derivative mask of layer `l`. The masks are
//! piecewise constant, so their derivative w.r.t. the parameters is taken as
//! zero and the expression is linear in each `W_l`. Differentiating it once
//! more gives the parameter gradient of the penalty.

use super::matrix::{l2_norm, Matrix};
use super::mlp::{mlp_forward, MlpGrads, MlpParams, OutputActivation};
use crate::error::{Error, Result};

/// Unrolled backward chain of a critic evaluated at a batch.
#[derive(Debug, Clone)]
pub struct InputGradient {
    /// Row `b` is ∇ₓD(x_b).
    pub grad: Matrix,
    /// Critic outputs D(x_b), one per row.
    pub values: Vec<f64>,
    /// δ_1 … δ_L.
    deltas: Vec<Matrix>,
    /// Derivative masks of the hidden layers, m_1 … m_{L-1}.
    masks: Vec<Matrix>,
}

fn check_scalar_critic(params: &MlpParams) -> Result<()> {
    if params.output_dim() != 1 || params.output_activation() != OutputActivation::Identity {
        return Err(Error::Contract(format!(
            "critic must have one identity output, got {} outputs with {:?}",
            params.output_dim(),
            params.output_activation()
        )));
    }
    Ok(())
}

pub fn input_gradient_chain(params: &MlpParams, x: &Matrix) -> Result<InputGradient> {
    check_scalar_critic(params)?;
    let (out, cache) = mlp_forward(params, x)?;
    let layers = params.layers();
    let n_layers = layers.len();
    let hidden = params.hidden_activation();

    let masks: Vec<Matrix> = cache.pre_activations()[..n_layers - 1]
        .iter()
        .map(|a| a.map(|v| hidden.derivative(v)))
        .collect();

    let mut deltas = vec![Matrix::filled(x.rows(), 1, 1.0)];
    for l in (1..n_layers).rev() {
        let upstream = deltas.last().expect("nonempty").matmul_t(&layers[l].weight)?;
        let delta = upstream.zip_map(&masks[l - 1], |u, m| u * m)?;
        deltas.push(delta);
    }
    deltas.reverse();
    let grad = deltas[0].matmul_t(&layers[0].weight)?;
    Ok(InputGradient {
        grad,
        values: out.into_vec(),
        deltas,
        masks,
    })
}

/// ∇ₓD for every row of `x`.
pub fn critic_input_gradient(params: &MlpParams, x: &Matrix) -> Result<Matrix> {
    Ok(input_gradient_chain(params, x)?.grad)
}

/// Penalty `coefficient · mean_b (‖∇ₓD(x_b)‖₂ − 1)²` and its gradient w.r.t. the critic parameters.
///
/// Rows whose input gradient is exactly zero contribute `coefficient` to the sum
/// and nothing to the parameter gradient.
pub fn gradient_penalty_param_grads(params: &MlpParams, x_hat: &Matrix, coefficient: f64) -> Result<(f64, MlpGrads)> {
    if !(coefficient > 0.0) {
        return Err(Error::Contract(format!("penalty coefficient must be > 0, got {coefficient}")));
    }
    if x_hat.rows() == 0 {
        return Err(Error::Contract("gradient penalty needs at least one row".into()));
    }
    let chain = input_gradient_chain(params, x_hat)?;
    let batch = x_hat.rows() as f64;
    let mut penalty = 0.0;
    // ∂penalty/∂(∇ₓD)
    let mut grad_bar = Matrix::zeros(chain.grad.rows(), chain.grad.cols());
    for b in 0..chain.grad.rows() {
        let g = chain.grad.row(b);
        let norm = l2_norm(g);
        let gap = norm - 1.0;
        penalty += gap * gap;
        if norm > 0.0 {
            let s = coefficient * 2.0 * gap / (batch * norm);
            for (o, &gi) in grad_bar.row_mut(b).iter_mut().zip(g) {
                *o = s * gi;
            }
        }
    }
    penalty *= coefficient / batch;

    let layers = params.layers();
    let mut grads = MlpGrads::zeros_like(params);
    // ∇ₓD = δ_1 W_1ᵀ
    grads.layers[0].weight = grad_bar.t_matmul(&chain.deltas[0])?;
    let mut delta_bar = grad_bar.matmul(&layers[0].weight)?;
    for l in 1..layers.len() {
        // δ_l = (δ_{l+1} W_{l+1}ᵀ) ⊙ m_l, written with 0-based indices
        let upstream_bar = delta_bar.zip_map(&chain.masks[l - 1], |d, m| d * m)?;
        grads.layers[l].weight = upstream_bar.t_matmul(&chain.deltas[l])?;
        delta_bar = upstream_bar.matmul(&layers[l].weight)?;
    }
    Ok((penalty, grads))
}

use super::mlp::{MlpGrads, MlpParams};
use crate::error::{Error, Result};

/// RMSprop hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmspropConfig {
    pub learning_rate: f64,
    pub decay: f64,
    pub epsilon: f64,
}

impl Default for RmspropConfig {
    fn default() -> Self {
        Self {
            learning_rate: 5e-5,
            decay: 0.99,
            epsilon: 1e-8,
        }
    }
}

/// Running mean of squared gradients for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct RmspropState {
    pub config: RmspropConfig,
    accumulators: MlpGrads,
}

impl RmspropState {
    pub fn new(params: &MlpParams, config: RmspropConfig) -> Self {
        Self {
            config,
            accumulators: MlpGrads::zeros_like(params),
        }
    }

    /// Restores a state with existing accumulators, e.g. from a checkpoint.
    pub fn with_accumulators(params: &MlpParams, config: RmspropConfig, accumulators: MlpGrads) -> Result<Self> {
        if !accumulators.matches(params) {
            return Err(Error::shape(
                "RmspropState::with_accumulators",
                format!("params {:?}", params.dims()),
                format!("{} accumulator layers", accumulators.layers.len()),
            ));
        }
        if accumulators.iter().any(|a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::Numeric("RMSprop accumulators must be finite and nonnegative".into()));
        }
        Ok(Self { config, accumulators })
    }

    pub fn accumulators(&self) -> &MlpGrads {
        &self.accumulators
    }

    /// `acc ← decay·acc + (1−decay)·g²;  θ ← θ − lr·g / (√acc + ε)`
    pub fn step(&mut self, params: &mut MlpParams, grads: &MlpGrads) -> Result<()> {
        if !grads.matches(params) || !self.accumulators.matches(params) {
            return Err(Error::shape(
                "rmsprop_step",
                format!("params {:?}", params.dims()),
                format!("{} gradient layers", grads.layers.len()),
            ));
        }
        let RmspropConfig {
            learning_rate: lr,
            decay,
            epsilon,
        } = self.config;
        let update = |p: &mut [f64], a: &mut [f64], g: &[f64]| {
            for ((p, a), &g) in p.iter_mut().zip(a.iter_mut()).zip(g) {
                *a = decay * *a + (1.0 - decay) * g * g;
                *p -= lr * g / (a.sqrt() + epsilon);
            }
        };
        for ((layer, acc), grad) in params
            .layers_mut()
            .iter_mut()
            .zip(self.accumulators.layers.iter_mut())
            .zip(&grads.layers)
        {
            update(
                layer.weight.as_mut_slice(),
                acc.weight.as_mut_slice(),
                grad.weight.as_slice(),
            );
            update(&mut layer.bias, &mut acc.bias, &grad.bias);
        }
        Ok(())
    }
}

/// Functional form: returns updated copies of the parameters and state.
pub fn rmsprop_step(params: &MlpParams, grads: &MlpGrads, state: &RmspropState) -> Result<(MlpParams, RmspropState)> {
    let mut params = params.clone();
    let mut state = state.clone();
    state.step(&mut params, grads)?;
    Ok((params, state))
}

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::RmspropConfig;

/// Which rows feed the critic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingMode {
    /// Critic and classifier see labeled rows only.
    Supervised,
    /// Critic sees every row, classifier only the labeled ones.
    SemiSupervised,
}

impl FromStr for TrainingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "supervised" => Ok(TrainingMode::Supervised),
            "semi-supervised" | "semisupervised" | "semi_supervised" => Ok(TrainingMode::SemiSupervised),
            other => Err(Error::Config(format!("unknown training mode {other:?}"))),
        }
    }
}

impl fmt::Display for TrainingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrainingMode::Supervised => "supervised",
            TrainingMode::SemiSupervised => "semi-supervised",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GanConfig {
    pub latent_dim: usize,
    pub hidden_width: usize,
    /// Number of affine layers per network.
    pub n_layers: usize,
    /// Gradient penalty weight; 0 disables the penalty.
    pub gp_coefficient: f64,
    pub class_loss_weight: f64,
    pub iterations: u64,
    /// Critic and classifier updates per generator update.
    pub inner_steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rmsprop_decay: f64,
    pub rmsprop_epsilon: f64,
    pub mode: TrainingMode,
    pub seed: u64,
    pub checkpoint_every: u64,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            latent_dim: 64,
            hidden_width: 512,
            n_layers: 4,
            gp_coefficient: 10.0,
            class_loss_weight: 1.0,
            iterations: 100_000,
            inner_steps: 2,
            batch_size: 64,
            learning_rate: 5e-5,
            rmsprop_decay: 0.99,
            rmsprop_epsilon: 1e-8,
            mode: TrainingMode::Supervised,
            seed: 0,
            checkpoint_every: 5_000,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("latent_dim", self.latent_dim),
            ("hidden_width", self.hidden_width),
            ("n_layers", self.n_layers),
            ("inner_steps", self.inner_steps),
            ("batch_size", self.batch_size),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be > 0")));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be > 0".into()));
        }
        if !(self.gp_coefficient >= 0.0 && self.gp_coefficient.is_finite()) {
            return Err(Error::Config(format!("gp_coefficient must be >= 0, got {}", self.gp_coefficient)));
        }
        if !(self.class_loss_weight >= 0.0 && self.class_loss_weight.is_finite()) {
            return Err(Error::Config(format!("class_loss_weight must be >= 0, got {}", self.class_loss_weight)));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be >= 0, got {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.rmsprop_decay) {
            return Err(Error::Config(format!("rmsprop_decay must be in [0, 1), got {}", self.rmsprop_decay)));
        }
        if !(self.rmsprop_epsilon > 0.0) {
            return Err(Error::Config(format!("rmsprop_epsilon must be > 0, got {}", self.rmsprop_epsilon)));
        }
        Ok(())
    }

    pub fn rmsprop(&self) -> RmspropConfig {
        RmspropConfig {
            learning_rate: self.learning_rate,
            decay: self.rmsprop_decay,
            epsilon: self.rmsprop_epsilon,
        }
    }

    /// Widths of one network from `input` to `output`.
    pub fn layer_dims(&self, input: usize, output: usize) -> Vec<usize> {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(self.hidden_width, self.n_layers - 1));
        dims.push(output);
        dims
    }
}

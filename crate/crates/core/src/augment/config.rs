use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RmspropConfig;

/// Where the extra training rows come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AugmentStrategy {
    /// Real rows only.
    None,
    /// Generator trained on the labeled training rows.
    Gan,
    /// Generator whose critic also sees unlabeled non-test rows.
    SsGan,
}

impl AugmentStrategy {
    pub const ALL: [AugmentStrategy; 3] = [AugmentStrategy::None, AugmentStrategy::Gan, AugmentStrategy::SsGan];
}

impl FromStr for AugmentStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "real" | "∅" => Ok(AugmentStrategy::None),
            "gan" => Ok(AugmentStrategy::Gan),
            "ss-gan" | "ssgan" | "ss_gan" => Ok(AugmentStrategy::SsGan),
            other => Err(Error::Config(format!("unknown augmentation strategy {other:?}"))),
        }
    }
}

impl fmt::Display for AugmentStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AugmentStrategy::None => "none",
            AugmentStrategy::Gan => "gan",
            AugmentStrategy::SsGan => "ss-gan",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub strategy: AugmentStrategy,
    /// Fake rows per real training row. Ignored for [`AugmentStrategy::None`].
    pub fake_ratio: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rmsprop_decay: f64,
    pub rmsprop_epsilon: f64,
    pub hidden_width: usize,
    pub n_layers: usize,
    /// Master seed of an experiment, or the classifier seed for [`train_nn1d`](super::train_nn1d).
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            strategy: AugmentStrategy::None,
            fake_ratio: 0.5,
            epochs: 200,
            batch_size: 64,
            learning_rate: 5e-5,
            rmsprop_decay: 0.99,
            rmsprop_epsilon: 1e-8,
            hidden_width: 512,
            n_layers: 4,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fake_ratio >= 0.0 && self.fake_ratio.is_finite()) {
            return Err(Error::Config(format!("fake_ratio must be >= 0, got {}", self.fake_ratio)));
        }
        for (name, v) in [
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("hidden_width", self.hidden_width),
            ("n_layers", self.n_layers),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("classifier {name} must be > 0")));
            }
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("classifier learning_rate must be >= 0, got {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.rmsprop_decay) {
            return Err(Error::Config(format!("classifier rmsprop_decay must be in [0, 1), got {}", self.rmsprop_decay)));
        }
        if !(self.rmsprop_epsilon > 0.0) {
            return Err(Error::Config(format!("classifier rmsprop_epsilon must be > 0, got {}", self.rmsprop_epsilon)));
        }
        Ok(())
    }

    /// The ratio actually applied: zero when no generator is used.
    pub fn effective_fake_ratio(&self) -> f64 {
        match self.strategy {
            AugmentStrategy::None => 0.0,
            _ => self.fake_ratio,
        }
    }

    pub fn rmsprop(&self) -> RmspropConfig {
        RmspropConfig {
            learning_rate: self.learning_rate,
            decay: self.rmsprop_decay,
            epsilon: self.rmsprop_epsilon,
        }
    }

    pub(crate) fn layer_dims(&self, input: usize, output: usize) -> Vec<usize> {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(self.hidden_width, self.n_layers - 1));
        dims.push(output);
        dims
    }
}

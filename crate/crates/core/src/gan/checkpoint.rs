use std::fs;
use std::path::Path;

use super::config::{GanConfig, TrainingMode};
use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::numerics::{
    Dense, HiddenActivation, Matrix, MlpGrads, MlpParams, OutputActivation, RmspropState, DEFAULT_LEAKY_SLOPE,
};
use crate::seed::rng_from;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"HSGN";
pub const CHECKPOINT_VERSION: u16 = 1;

/// Generator, critic and classifier together with their optimizer state.
///
/// The generator maps `[z, one-hot(class)]` (width `latent_dim + n_classes`)
/// to `n_bands` sigmoid outputs, the critic maps a spectrum to one score and
/// the classifier maps a spectrum to `n_classes` logits. Class id `c` uses
/// one-hot / logit index `c − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GanCheckpoint {
    pub config: GanConfig,
    pub n_bands: usize,
    pub n_classes: u16,
    /// Class ids that conditional labels are drawn from.
    pub classes: Vec<u16>,
    pub iteration: u64,
    pub generator: MlpParams,
    pub critic: MlpParams,
    pub classifier: MlpParams,
    pub generator_opt: RmspropState,
    pub critic_opt: RmspropState,
    pub classifier_opt: RmspropState,
}

/// Builds fresh networks; deterministic in `config.seed`.
pub fn init_networks(n_bands: usize, n_classes: u16, config: &GanConfig) -> Result<GanCheckpoint> {
    config.validate()?;
    if n_bands == 0 || n_classes == 0 {
        return Err(Error::Config(format!(
            "need at least one band and one class, got {n_bands} bands, {n_classes} classes"
        )));
    }
    let k = n_classes as usize;
    let hidden = HiddenActivation::LeakyRelu(DEFAULT_LEAKY_SLOPE);
    let mut rng = rng_from(config.seed);
    let generator = MlpParams::init(
        &config.layer_dims(config.latent_dim + k, n_bands),
        hidden,
        OutputActivation::Sigmoid,
        &mut rng,
    )?;
    let critic = MlpParams::init(&config.layer_dims(n_bands, 1), hidden, OutputActivation::Identity, &mut rng)?;
    let classifier = MlpParams::init(&config.layer_dims(n_bands, k), hidden, OutputActivation::Logits, &mut rng)?;
    let opt = config.rmsprop();
    Ok(GanCheckpoint {
        generator_opt: RmspropState::new(&generator, opt),
        critic_opt: RmspropState::new(&critic, opt),
        classifier_opt: RmspropState::new(&classifier, opt),
        config: config.clone(),
        n_bands,
        n_classes,
        classes: (1..=n_classes).collect(),
        iteration: 0,
        generator,
        critic,
        classifier,
    })
}

impl GanCheckpoint {
    /// Checks the dimensional contract between the three networks.
    pub fn check_invariants(&self) -> Result<()> {
        let k = self.n_classes as usize;
        let checks = [
            ("generator input", self.generator.input_dim(), self.config.latent_dim + k),
            ("generator output", self.generator.output_dim(), self.n_bands),
            ("critic input", self.critic.input_dim(), self.n_bands),
            ("critic output", self.critic.output_dim(), 1),
            ("classifier input", self.classifier.input_dim(), self.n_bands),
            ("classifier output", self.classifier.output_dim(), k),
        ];
        for (what, got, want) in checks {
            if got != want {
                return Err(Error::Contract(format!("{what} width {got}, expected {want}")));
            }
        }
        if self.generator.output_activation() != OutputActivation::Sigmoid {
            return Err(Error::Contract("generator must end in a sigmoid".into()));
        }
        if self.classes.is_empty() || self.classes.iter().any(|&c| c == 0 || c > self.n_classes) {
            return Err(Error::Contract(format!("invalid conditional classes {:?}", self.classes)));
        }
        Ok(())
    }

    pub fn latent_dim(&self) -> usize {
        self.config.latent_dim
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new(CHECKPOINT_MAGIC, CHECKPOINT_VERSION);
        write_config(&mut w, &self.config);
        w.count(self.n_bands);
        w.u16(self.n_classes);
        w.u64(self.iteration);
        w.count(self.classes.len());
        for &c in &self.classes {
            w.u16(c);
        }
        for (net, opt) in [
            (&self.generator, &self.generator_opt),
            (&self.critic, &self.critic_opt),
            (&self.classifier, &self.classifier_opt),
        ] {
            write_network(&mut w, net);
            for layer in &opt.accumulators().layers {
                w.f64s(layer.weight.as_slice());
                w.f64s(&layer.bias);
            }
        }
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::open(bytes, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?;
        let config = read_config(&mut r)?;
        let n_bands = r.count(0)?;
        let n_classes = r.u16()?;
        let iteration = r.u64()?;
        let n = r.count(2)?;
        let classes = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>>>()?;
        let mut nets = Vec::with_capacity(3);
        for _ in 0..3 {
            let net = read_network(&mut r)?;
            let mut acc = MlpGrads::zeros_like(&net);
            for layer in &mut acc.layers {
                let (rows, cols) = layer.weight.shape();
                layer.weight = Matrix::from_vec(rows, cols, r.f64s(rows * cols)?)?;
                layer.bias = r.f64s(cols)?;
            }
            let opt = RmspropState::with_accumulators(&net, config.rmsprop(), acc)?;
            nets.push((net, opt));
        }
        r.finish()?;
        let (classifier, classifier_opt) = nets.pop().expect("three networks");
        let (critic, critic_opt) = nets.pop().expect("three networks");
        let (generator, generator_opt) = nets.pop().expect("three networks");
        let ckpt = GanCheckpoint {
            config,
            n_bands,
            n_classes,
            classes,
            iteration,
            generator,
            critic,
            classifier,
            generator_opt,
            critic_opt,
            classifier_opt,
        };
        ckpt.check_invariants()?;
        Ok(ckpt)
    }
}

fn write_config(w: &mut Writer, c: &GanConfig) {
    w.count(c.latent_dim);
    w.count(c.hidden_width);
    w.count(c.n_layers);
    w.f64(c.gp_coefficient);
    w.f64(c.class_loss_weight);
    w.u64(c.iterations);
    w.count(c.inner_steps);
    w.count(c.batch_size);
    w.f64(c.learning_rate);
    w.f64(c.rmsprop_decay);
    w.f64(c.rmsprop_epsilon);
    w.u8(match c.mode {
        TrainingMode::Supervised => 0,
        TrainingMode::SemiSupervised => 1,
    });
    w.u64(c.seed);
    w.u64(c.checkpoint_every);
}

fn read_config(r: &mut Reader) -> Result<GanConfig> {
    let c = GanConfig {
        latent_dim: r.count(0)?,
        hidden_width: r.count(0)?,
        n_layers: r.count(0)?,
        gp_coefficient: r.f64()?,
        class_loss_weight: r.f64()?,
        iterations: r.u64()?,
        inner_steps: r.count(0)?,
        batch_size: r.count(0)?,
        learning_rate: r.f64()?,
        rmsprop_decay: r.f64()?,
        rmsprop_epsilon: r.f64()?,
        mode: match r.u8()? {
            0 => TrainingMode::Supervised,
            1 => TrainingMode::SemiSupervised,
            v => return Err(Error::Format(format!("unknown training mode tag {v}"))),
        },
        seed: r.u64()?,
        checkpoint_every: r.u64()?,
    };
    c.validate().map_err(|e| Error::Format(format!("stored config invalid: {e}")))?;
    Ok(c)
}

fn write_network(w: &mut Writer, net: &MlpParams) {
    w.count(net.layers().len());
    let HiddenActivation::LeakyRelu(slope) = net.hidden_activation();
    w.f64(slope);
    w.u8(match net.output_activation() {
        OutputActivation::Identity => 0,
        OutputActivation::Sigmoid => 1,
        OutputActivation::Logits => 2,
    });
    for layer in net.layers() {
        w.count(layer.input_dim());
        w.count(layer.output_dim());
        w.f64s(layer.weight.as_slice());
        w.f64s(&layer.bias);
    }
}

fn read_network(r: &mut Reader) -> Result<MlpParams> {
    let n_layers = r.count(16)?;
    let slope = r.f64()?;
    let output = match r.u8()? {
        0 => OutputActivation::Identity,
        1 => OutputActivation::Sigmoid,
        2 => OutputActivation::Logits,
        v => return Err(Error::Format(format!("unknown output activation tag {v}"))),
    };
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let rows = r.count(0)?;
        let cols = r.count(0)?;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("layer size overflow".into()))?;
        layers.push(Dense {
            weight: Matrix::from_vec(rows, cols, r.f64s(n)?)?,
            bias: r.f64s(cols)?,
        });
    }
    MlpParams::new(layers, HiddenActivation::LeakyRelu(slope), output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GanConfig {
        GanConfig {
            latent_dim: 3,
            hidden_width: 5,
            ..Default::default()
        }
    }

    #[test]
    fn pavia_university_shape() {
        let c = GanConfig { hidden_width: 16, ..Default::default() };
        let ckpt = init_networks(103, 9, &c).unwrap();
        assert_eq!(ckpt.generator.output_dim(), 103);
        assert_eq!(ckpt.generator.input_dim(), 64 + 9);
        assert_eq!(ckpt.classifier.output_dim(), 9);
        assert_eq!(ckpt.critic.output_dim(), 1);
        assert_eq!(ckpt.generator.layers().len(), 4);
        assert_eq!(ckpt.iteration, 0);
    }

    #[test]
    fn indian_pines_band_count() {
        let c = GanConfig { hidden_width: 16, ..Default::default() };
        assert_eq!(init_networks(224, 16, &c).unwrap().generator.output_dim(), 224);
    }

    #[test]
    fn seeded_init() {
        assert_eq!(init_networks(6, 2, &small()).unwrap(), init_networks(6, 2, &small()).unwrap());
        let other = GanConfig { seed: 1, ..small() };
        assert_ne!(init_networks(6, 2, &small()).unwrap(), init_networks(6, 2, &other).unwrap());
    }

    #[test]
    fn rejects_empty_shapes() {
        assert!(init_networks(0, 2, &small()).is_err());
        assert!(init_networks(4, 0, &small()).is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let ckpt = init_networks(6, 3, &small()).unwrap();
        let bytes = ckpt.encode();
        assert_eq!(&bytes[..4], b"HSGN");
        assert_eq!(GanCheckpoint::decode(&bytes).unwrap(), ckpt);
        let mut bad = bytes.clone();
        bad[40] ^= 1;
        assert!(matches!(GanCheckpoint::decode(&bad), Err(Error::Checksum { .. })));
        let mut bad = bytes;
        bad[0] = b'Z';
        assert!(matches!(GanCheckpoint::decode(&bad), Err(Error::BadMagic { .. })));
    }
}

//! Single optimization steps. Each one updates exactly one network.

use rand::Rng;
use rand_distr::StandardNormal;

use super::checkpoint::GanCheckpoint;
use crate::error::{Error, Result};
use crate::numerics::{
    gradient_penalty_param_grads, mlp_backward, mlp_forward, softmax_cross_entropy, Matrix, MlpGrads,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticStats {
    /// `mean D(real) − mean D(fake)`
    pub wasserstein: f64,
    /// Weighted gradient penalty, `coefficient · mean (‖∇D‖ − 1)²`.
    pub penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorStats {
    /// `−mean D(G(z, y))`
    pub adv_loss: f64,
    /// Cross-entropy of the frozen classifier on the generated batch.
    pub cond_loss: f64,
}

/// Latent draws and the conditioning labels that go with them.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentBatch {
    pub z: Matrix,
    /// Class ids (≥ 1).
    pub labels: Vec<u16>,
}

/// One-hot rows for class ids, index `c − 1`.
pub fn one_hot(labels: &[u16], n_classes: u16) -> Result<Matrix> {
    let k = n_classes as usize;
    let mut m = Matrix::zeros(labels.len(), k);
    for (r, &c) in labels.iter().enumerate() {
        if c == 0 || c > n_classes {
            return Err(Error::Label(format!("class id {c} outside 1..={n_classes}")));
        }
        m.set(r, c as usize - 1, 1.0);
    }
    Ok(m)
}

pub fn sample_latent<R: Rng + ?Sized>(rng: &mut R, rows: usize, latent_dim: usize) -> Matrix {
    let data = (0..rows * latent_dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_vec(rows, latent_dim, data).expect("sized")
}

impl GanCheckpoint {
    /// Draws `rows` latent vectors with labels uniform over `self.classes`.
    pub fn sample_latent_batch<R: Rng + ?Sized>(&self, rng: &mut R, rows: usize) -> LatentBatch {
        let z = sample_latent(rng, rows, self.latent_dim());
        let labels = (0..rows)
            .map(|_| self.classes[rng.random_range(0..self.classes.len())])
            .collect();
        LatentBatch { z, labels }
    }

    /// `G([z, conditioning])` for arbitrary (possibly blended) conditioning rows.
    pub fn generate(&self, z: &Matrix, conditioning: &Matrix) -> Result<Matrix> {
        self.generator.predict(&z.hstack(conditioning)?)
    }

    pub fn generate_batch(&self, batch: &LatentBatch) -> Result<Matrix> {
        self.generate(&batch.z, &one_hot(&batch.labels, self.n_classes)?)
    }

    /// Critic update on explicit real and fake batches.
    ///
    /// `mix[b]` places the penalty point at `mix[b]·real_b + (1 − mix[b])·fake_b`.
    pub fn critic_update(&mut self, real: &Matrix, fake: &Matrix, mix: &[f64]) -> Result<CriticStats> {
        if real.shape() != fake.shape() || mix.len() != real.rows() {
            return Err(Error::shape(
                "critic_update",
                format!("real {}", real.shape_str()),
                format!("fake {}, {} mixing weights", fake.shape_str(), mix.len()),
            ));
        }
        if real.rows() < 2 {
            return Err(Error::Contract(format!("critic batch needs at least 2 rows, got {}", real.rows())));
        }
        let batch = real.rows() as f64;
        let (d_real, cache_real) = mlp_forward(&self.critic, real)?;
        let (d_fake, cache_fake) = mlp_forward(&self.critic, fake)?;
        let wasserstein = d_real.mean() - d_fake.mean();

        let (mut grads, _) = mlp_backward(&self.critic, &cache_real, &Matrix::filled(real.rows(), 1, -1.0 / batch))?;
        let (fake_grads, _) = mlp_backward(&self.critic, &cache_fake, &Matrix::filled(fake.rows(), 1, 1.0 / batch))?;
        grads.add_assign(&fake_grads)?;

        let coefficient = self.config.gp_coefficient;
        let penalty = if coefficient > 0.0 {
            let mut x_hat = Matrix::zeros(real.rows(), real.cols());
            for (b, &e) in mix.iter().enumerate() {
                for ((o, &r), &f) in x_hat.row_mut(b).iter_mut().zip(real.row(b)).zip(fake.row(b)) {
                    *o = e * r + (1.0 - e) * f;
                }
            }
            let (penalty, gp_grads) = gradient_penalty_param_grads(&self.critic, &x_hat, coefficient)?;
            grads.add_assign(&gp_grads)?;
            penalty
        } else {
            0.0
        };
        ensure_finite("critic", &[wasserstein, penalty], &grads)?;
        self.critic_opt.step(&mut self.critic, &grads)?;
        Ok(CriticStats { wasserstein, penalty })
    }

    /// One critic update against a freshly generated fake batch of the same size.
    pub fn critic_step<R: Rng + ?Sized>(&mut self, real: &Matrix, rng: &mut R) -> Result<CriticStats> {
        if real.rows() < 2 {
            return Err(Error::Contract(format!("critic batch needs at least 2 rows, got {}", real.rows())));
        }
        let latent = self.sample_latent_batch(rng, real.rows());
        let fake = self.generate_batch(&latent)?;
        let mix: Vec<f64> = (0..real.rows()).map(|_| rng.random::<f64>()).collect();
        self.critic_update(real, &fake, &mix)
    }

    /// One classifier update with cross-entropy on real labeled spectra.
    pub fn classifier_step(&mut self, spectra: &Matrix, labels: &[u16]) -> Result<f64> {
        if labels.contains(&0) {
            return Err(Error::Contract("classifier batch contains unlabeled rows".into()));
        }
        if spectra.rows() != labels.len() || spectra.rows() == 0 {
            return Err(Error::shape(
                "classifier_step",
                format!("spectra {}", spectra.shape_str()),
                format!("{} labels", labels.len()),
            ));
        }
        let targets = class_indices(labels, self.n_classes)?;
        let (logits, cache) = mlp_forward(&self.classifier, spectra)?;
        let (loss, logits_grad) = softmax_cross_entropy(&logits, &targets)?;
        let (grads, _) = mlp_backward(&self.classifier, &cache, &logits_grad)?;
        ensure_finite("classifier", &[loss], &grads)?;
        self.classifier_opt.step(&mut self.classifier, &grads)?;
        Ok(loss)
    }

    /// Generator loss `−mean D(G) + w · CE(C(G), y)` and its gradient w.r.t. the generator.
    /// Critic and classifier are only read.
    pub fn generator_loss_and_grads(&self, batch: &LatentBatch) -> Result<(GeneratorStats, MlpGrads)> {
        let n = batch.z.rows();
        if n == 0 {
            return Err(Error::Contract("generator batch is empty".into()));
        }
        let input = batch.z.hstack(&one_hot(&batch.labels, self.n_classes)?)?;
        let (fake, g_cache) = mlp_forward(&self.generator, &input)?;

        let (d_fake, d_cache) = mlp_forward(&self.critic, &fake)?;
        let adv_loss = -d_fake.mean();
        let (_, mut fake_grad) = mlp_backward(&self.critic, &d_cache, &Matrix::filled(n, 1, -1.0 / n as f64))?;

        let targets = class_indices(&batch.labels, self.n_classes)?;
        let (logits, c_cache) = mlp_forward(&self.classifier, &fake)?;
        let (cond_loss, mut logits_grad) = softmax_cross_entropy(&logits, &targets)?;
        let weight = self.config.class_loss_weight;
        if weight != 0.0 {
            logits_grad.scale(weight);
            let (_, cond_grad) = mlp_backward(&self.classifier, &c_cache, &logits_grad)?;
            fake_grad.add_scaled(&cond_grad, 1.0)?;
        }

        let (grads, _) = mlp_backward(&self.generator, &g_cache, &fake_grad)?;
        Ok((GeneratorStats { adv_loss, cond_loss }, grads))
    }

    pub fn generator_update(&mut self, batch: &LatentBatch) -> Result<GeneratorStats> {
        let (stats, grads) = self.generator_loss_and_grads(batch)?;
        ensure_finite("generator", &[stats.adv_loss, stats.cond_loss], &grads)?;
        self.generator_opt.step(&mut self.generator, &grads)?;
        Ok(stats)
    }

    /// One generator update on a fresh latent batch of `batch_size` rows.
    pub fn generator_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<GeneratorStats> {
        let batch = self.sample_latent_batch(rng, self.config.batch_size);
        self.generator_update(&batch)
    }
}

fn class_indices(labels: &[u16], n_classes: u16) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|&c| {
            if c == 0 || c > n_classes {
                Err(Error::Label(format!("class id {c} outside 1..={n_classes}")))
            } else {
                Ok(c as usize - 1)
            }
        })
        .collect()
}

fn ensure_finite(which: &str, values: &[f64], grads: &MlpGrads) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) && grads.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{which} step produced non-finite values {values:?}")))
    }
}

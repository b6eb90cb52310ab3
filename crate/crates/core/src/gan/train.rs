use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;

use super::checkpoint::{init_networks, GanCheckpoint};
use super::config::{GanConfig, TrainingMode};
use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from, stream};

/// One line of the loss log. Values are averaged over the inner steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub iteration: u64,
    pub wasserstein: f64,
    pub penalty: f64,
    pub class_loss: f64,
    pub adv_loss: f64,
}

pub const LOSS_LOG_HEADER: &str = "iteration,wasserstein,penalty,class_loss,adv_loss";

/// Which rows the sampler drew, for auditing what each network saw.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchAudit {
    pub critic_labeled_rows: u64,
    pub critic_unlabeled_rows: u64,
    pub classifier_rows: u64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: GanCheckpoint,
    pub log: Vec<LossRecord>,
    pub audit: BatchAudit,
}

pub fn train(table: &SpectraTable, config: &GanConfig) -> Result<TrainOutcome> {
    train_with(table, config, |_| Ok(()))
}

/// Trains from scratch, calling `on_checkpoint` every `checkpoint_every`
/// iterations and once more for the final state.
///
/// Each iteration runs `inner_steps` critic steps, then `inner_steps`
/// classifier steps, then one generator step. Batches are drawn with
/// replacement.
pub fn train_with(
    table: &SpectraTable,
    config: &GanConfig,
    mut on_checkpoint: impl FnMut(&GanCheckpoint) -> Result<()>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if table.is_empty() {
        return Err(Error::Contract("cannot train on an empty table".into()));
    }
    let labeled = table.labeled_indices();
    if labeled.is_empty() {
        return Err(Error::Contract("training table has no labeled rows".into()));
    }
    let critic_pool: Vec<usize> = match config.mode {
        TrainingMode::Supervised => labeled.clone(),
        TrainingMode::SemiSupervised => (0..table.n_rows()).collect(),
    };

    let mut ckpt = init_networks(table.n_bands(), table.n_classes(), config)?;
    ckpt.classes = table.labeled().present_classes();
    let mut rng = rng_from(derive_seed(config.seed, stream::GAN_TRAINING));
    let mut log = Vec::with_capacity(config.iterations.min(1 << 20) as usize);
    let mut audit = BatchAudit::default();
    let spectra = table.spectra();
    let labels = table.labels();
    let inner = config.inner_steps as f64;

    for _ in 0..config.iterations {
        let mut record = LossRecord {
            iteration: ckpt.iteration + 1,
            wasserstein: 0.0,
            penalty: 0.0,
            class_loss: 0.0,
            adv_loss: 0.0,
        };
        for _ in 0..config.inner_steps {
            let rows = draw(&mut rng, &critic_pool, config.batch_size.max(2));
            for &r in &rows {
                if labels[r] == 0 {
                    audit.critic_unlabeled_rows += 1;
                } else {
                    audit.critic_labeled_rows += 1;
                }
            }
            let stats = ckpt.critic_step(&spectra.select_rows(&rows), &mut rng)?;
            record.wasserstein += stats.wasserstein / inner;
            record.penalty += stats.penalty / inner;
        }
        for _ in 0..config.inner_steps {
            let rows = draw(&mut rng, &labeled, config.batch_size);
            audit.classifier_rows += rows.len() as u64;
            let batch_labels: Vec<u16> = rows.iter().map(|&r| labels[r]).collect();
            record.class_loss += ckpt.classifier_step(&spectra.select_rows(&rows), &batch_labels)? / inner;
        }
        record.adv_loss = ckpt.generator_step(&mut rng)?.adv_loss;
        ckpt.iteration += 1;
        debug_assert!(ckpt.check_invariants().is_ok());
        log.push(record);
        if ckpt.iteration % config.checkpoint_every == 0 {
            on_checkpoint(&ckpt)?;
        }
        if ckpt.iteration % 1000 == 0 {
            log::info!(
                "iteration {}: wasserstein {:.5} penalty {:.5} class {:.5} adv {:.5}",
                record.iteration,
                record.wasserstein,
                record.penalty,
                record.class_loss,
                record.adv_loss
            );
        }
    }
    if config.iterations == 0 || ckpt.iteration % config.checkpoint_every != 0 {
        on_checkpoint(&ckpt)?;
    }
    Ok(TrainOutcome {
        checkpoint: ckpt,
        log,
        audit,
    })
}

fn draw<R: Rng + ?Sized>(rng: &mut R, pool: &[usize], n: usize) -> Vec<usize> {
    (0..n).map(|_| pool[rng.random_range(0..pool.len())]).collect()
}

pub fn write_loss_log(path: impl AsRef<Path>, log: &[LossRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{LOSS_LOG_HEADER}")?;
    for r in log {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration, r.wasserstein, r.penalty, r.class_loss, r.adv_loss
        )?;
    }
    out.flush()?;
    Ok(())
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::thread;

use serde::Serialize;

use super::classifier::{overall_accuracy, per_class_accuracy, train_nn1d};
use super::config::{AugmentConfig, AugmentStrategy};
use super::synthesize::augment_table;
use crate::dataio::{split, SpectraTable, SplitSpec};
use crate::error::{Error, Result};
use crate::gan::{train, GanCheckpoint, GanConfig, TrainingMode};
use crate::seed::{derive_seed, stream};

/// Per-stage seeds derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentSeeds {
    pub split: u64,
    pub gan: u64,
    pub augment: u64,
    pub classifier: u64,
}

impl ExperimentSeeds {
    pub fn from_master(master: u64) -> Self {
        Self {
            split: derive_seed(master, stream::SPLIT),
            gan: derive_seed(master, stream::GAN),
            augment: derive_seed(master, stream::AUGMENT),
            classifier: derive_seed(master, stream::CLASSIFIER),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub split: String,
    pub strategy: AugmentStrategy,
    pub fake_ratio: f64,
    pub master_seed: u64,
    pub overall_accuracy: f64,
    pub per_class_accuracy: BTreeMap<u16, f64>,
    pub train_real: usize,
    pub train_fake: usize,
    pub test_rows: usize,
}

pub const REPORT_CSV_HEADER: &str = "dataset,split,strategy,oa";

/// One CSV line per report with OA in percent, two decimals.
pub fn reports_csv(reports: &[EvalReport]) -> String {
    let mut s = format!("{REPORT_CSV_HEADER}\n");
    for r in reports {
        writeln!(s, "{},{},{},{:.2}", r.dataset, r.split, r.strategy, 100.0 * r.overall_accuracy).expect("string write");
    }
    s
}

pub fn reports_json(reports: &[EvalReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Split, optionally train a generator and augment, train the classifier and
/// score it on the labeled test rows.
///
/// All randomness comes from `augment.seed` through [`ExperimentSeeds`]: the
/// seed inside a random `split_spec` and `gan.seed` are replaced. `gan.mode`
/// follows the strategy. The semi-supervised critic sees every row outside the
/// test set.
pub fn run_experiment(
    dataset: &str,
    table: &SpectraTable,
    split_spec: &SplitSpec,
    augment: &AugmentConfig,
    gan: &GanConfig,
) -> Result<EvalReport> {
    let ratio = augment.effective_fake_ratio();
    let mut reports = run_ratio_sweep(dataset, table, split_spec, augment, gan, &[ratio])?;
    Ok(reports.remove(0))
}

/// Like [`run_experiment`] for several fake ratios, training the generator once.
/// With [`AugmentStrategy::None`] every ratio is treated as 0.
pub fn run_ratio_sweep(
    dataset: &str,
    table: &SpectraTable,
    split_spec: &SplitSpec,
    augment: &AugmentConfig,
    gan: &GanConfig,
    ratios: &[f64],
) -> Result<Vec<EvalReport>> {
    augment.validate()?;
    let seeds = ExperimentSeeds::from_master(augment.seed);
    let parts = split(table, &split_spec.reseeded(seeds.split))?;
    let real_train = parts.train.labeled();
    let test = parts.test.labeled();
    if real_train.is_empty() || test.is_empty() {
        return Err(Error::Contract(format!(
            "split left {} labeled training and {} labeled test rows",
            real_train.n_rows(),
            test.n_rows()
        )));
    }
    let generator = match augment.strategy {
        AugmentStrategy::None => None,
        AugmentStrategy::Gan => Some(train_generator(&real_train, gan, seeds.gan, TrainingMode::Supervised)?),
        AugmentStrategy::SsGan => {
            let non_test = parts.train.concat(&parts.unlabeled)?;
            Some(train_generator(&non_test, gan, seeds.gan, TrainingMode::SemiSupervised)?)
        }
    };
    let classifier_config = AugmentConfig { seed: seeds.classifier, ..augment.clone() };

    ratios
        .iter()
        .map(|&requested| {
            let config = AugmentConfig { fake_ratio: requested, ..augment.clone() };
            config.validate()?;
            let ratio = config.effective_fake_ratio();
            let train_table = match &generator {
                Some(ckpt) => augment_table(&real_train, ckpt, ratio, seeds.augment)?,
                None => real_train.clone(),
            };
            if test.synthetic().iter().any(|&s| s) {
                return Err(Error::Contract("synthetic rows reached the test set".into()));
            }
            let model = train_nn1d(&train_table, &classifier_config)?;
            let train_fake = train_table.synthetic().iter().filter(|&&s| s).count();
            Ok(EvalReport {
                dataset: dataset.to_string(),
                split: split_spec.descriptor(),
                strategy: augment.strategy,
                fake_ratio: ratio,
                master_seed: augment.seed,
                overall_accuracy: overall_accuracy(&model.params, &test)?,
                per_class_accuracy: per_class_accuracy(&model.params, &test)?,
                train_real: train_table.n_rows() - train_fake,
                train_fake,
                test_rows: test.n_rows(),
            })
        })
        .collect()
}

fn train_generator(rows: &SpectraTable, gan: &GanConfig, seed: u64, mode: TrainingMode) -> Result<GanCheckpoint> {
    let config = GanConfig { seed, mode, ..gan.clone() };
    Ok(train(rows, &config)?.checkpoint)
}

/// Runs one experiment per strategy concurrently; reports keep the input order.
pub fn run_strategies(
    dataset: &str,
    table: &SpectraTable,
    split_spec: &SplitSpec,
    augment: &AugmentConfig,
    gan: &GanConfig,
    strategies: &[AugmentStrategy],
) -> Result<Vec<EvalReport>> {
    thread::scope(|scope| {
        let handles: Vec<_> = strategies
            .iter()
            .map(|&strategy| {
                let cfg = AugmentConfig { strategy, ..augment.clone() };
                scope.spawn(move || run_experiment(dataset, table, split_spec, &cfg, gan))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect()
    })
}

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::config::AugmentConfig;
use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::numerics::{
    argmax, mlp_backward, mlp_forward, softmax_cross_entropy, HiddenActivation, MlpParams, OutputActivation,
    RmspropState, DEFAULT_LEAKY_SLOPE,
};
use crate::seed::rng_from;

/// A trained per-pixel classifier and its mean training loss per epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Nn1dModel {
    pub params: MlpParams,
    pub epoch_losses: Vec<f64>,
}

/// Trains a fully connected leaky-ReLU classifier on the labeled rows of
/// `table` with softmax cross-entropy and RMSprop. Logit `c − 1` scores class
/// id `c`. Initialization and batch order depend only on `config.seed`.
pub fn train_nn1d(table: &SpectraTable, config: &AugmentConfig) -> Result<Nn1dModel> {
    config.validate()?;
    let labeled = table.labeled_indices();
    if labeled.is_empty() {
        return Err(Error::Contract("classifier training needs at least one labeled row".into()));
    }
    let k = table.n_classes() as usize;
    let mut rng = rng_from(config.seed);
    let mut params = MlpParams::init(
        &config.layer_dims(table.n_bands(), k),
        HiddenActivation::LeakyRelu(DEFAULT_LEAKY_SLOPE),
        OutputActivation::Logits,
        &mut rng,
    )?;
    let mut opt = RmspropState::new(&params, config.rmsprop());
    let mut order = labeled;
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let x = table.spectra().select_rows(batch);
            let targets: Vec<usize> = batch.iter().map(|&r| table.labels()[r] as usize - 1).collect();
            let (logits, cache) = mlp_forward(&params, &x)?;
            let (loss, grad) = softmax_cross_entropy(&logits, &targets)?;
            let (grads, _) = mlp_backward(&params, &cache, &grad)?;
            opt.step(&mut params, &grads)?;
            total += loss * batch.len() as f64;
        }
        let mean = total / order.len() as f64;
        if !mean.is_finite() {
            return Err(Error::Numeric(format!("classifier loss became {mean}")));
        }
        epoch_losses.push(mean);
    }
    Ok(Nn1dModel { params, epoch_losses })
}

/// Predicted class id per row, ties going to the lowest id.
pub fn predict_classes(classifier: &MlpParams, table: &SpectraTable) -> Result<Vec<u16>> {
    if table.is_empty() {
        return Ok(Vec::new());
    }
    let logits = classifier.predict(table.spectra())?;
    Ok(logits.row_iter().map(|row| argmax(row) as u16 + 1).collect())
}

/// Fraction of labeled rows of `test` predicted correctly; 0 when none are labeled.
pub fn overall_accuracy(classifier: &MlpParams, test: &SpectraTable) -> Result<f64> {
    let labeled = test.labeled();
    let predicted = predict_classes(classifier, &labeled)?;
    if predicted.is_empty() {
        return Ok(0.0);
    }
    let correct = predicted.iter().zip(labeled.labels()).filter(|(p, y)| p == y).count();
    Ok(correct as f64 / predicted.len() as f64)
}

/// Accuracy per class id over the labeled rows of `test`, for classes present there.
pub fn per_class_accuracy(classifier: &MlpParams, test: &SpectraTable) -> Result<BTreeMap<u16, f64>> {
    let labeled = test.labeled();
    let predicted = predict_classes(classifier, &labeled)?;
    let mut tally: BTreeMap<u16, (usize, usize)> = BTreeMap::new();
    for (p, &y) in predicted.iter().zip(labeled.labels()) {
        let entry = tally.entry(y).or_default();
        entry.1 += 1;
        if *p == y {
            entry.0 += 1;
        }
    }
    Ok(tally
        .into_iter()
        .map(|(c, (hit, n))| (c, hit as f64 / n as f64))
        .collect())
}

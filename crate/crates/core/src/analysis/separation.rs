use std::thread;

use super::svm::{svm_accuracy, svm_train, SvmConfig};
use crate::dataio::SpectraTable;
use crate::error::{Error, Result};

/// Accuracy of an SVM trained on one source and tested on another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationGrid {
    pub real_real: f64,
    pub real_fake: f64,
    pub fake_real: f64,
    pub fake_fake: f64,
}

impl SeparationGrid {
    /// `(train, test, accuracy)` rows in a fixed order.
    pub fn entries(&self) -> [(&'static str, &'static str, f64); 4] {
        [
            ("real", "real", self.real_real),
            ("real", "fake", self.real_fake),
            ("fake", "real", self.fake_real),
            ("fake", "fake", self.fake_fake),
        ]
    }
}

/// Trains one SVM on real and one on fake data (same config, hence the same
/// seed) and tests each on both test sets.
pub fn separation_table(
    real_train: &SpectraTable,
    real_test: &SpectraTable,
    fake_train: &SpectraTable,
    fake_test: &SpectraTable,
    config: &SvmConfig,
) -> Result<SeparationGrid> {
    let bands = real_train.n_bands();
    for (name, t) in [("real_test", real_test), ("fake_train", fake_train), ("fake_test", fake_test)] {
        if t.n_bands() != bands {
            return Err(Error::shape(
                "separation_table",
                format!("real_train {bands} bands"),
                format!("{name} {} bands", t.n_bands()),
            ));
        }
    }
    let (real_model, fake_model) = thread::scope(|s| {
        let real = s.spawn(|| svm_train(real_train, config));
        let fake = s.spawn(|| svm_train(fake_train, config));
        (real.join().expect("svm thread"), fake.join().expect("svm thread"))
    });
    let (real_model, fake_model) = (real_model?, fake_model?);
    Ok(SeparationGrid {
        real_real: svm_accuracy(&real_model, real_test)?,
        real_fake: svm_accuracy(&real_model, fake_test)?,
        fake_real: svm_accuracy(&fake_model, real_test)?,
        fake_fake: svm_accuracy(&fake_model, fake_test)?,
    })
}

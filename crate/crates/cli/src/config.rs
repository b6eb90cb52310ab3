//! Plain-text `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use specgan_core::augment::{AugmentConfig, AugmentStrategy};
use specgan_core::dataio::{SplitAxis, SplitSpec, SpectraTable};
use specgan_core::gan::{GanConfig, TrainingMode};

use crate::failure::Failure;

pub struct KeyDef {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const KEYS: &[KeyDef] = &[
    KeyDef { name: "data", default: "", help: "input .hsit table (required by train and augment-eval)" },
    KeyDef { name: "out_dir", default: "out", help: "directory for outputs" },
    KeyDef { name: "dataset", default: "dataset", help: "dataset id written to reports" },
    KeyDef { name: "seed", default: "0", help: "GAN seed for train, master seed for augment-eval" },
    KeyDef { name: "latent_dim", default: "64", help: "generator noise width" },
    KeyDef { name: "hidden_width", default: "512", help: "GAN hidden layer width" },
    KeyDef { name: "n_layers", default: "4", help: "affine layers per GAN network" },
    KeyDef { name: "gp_coefficient", default: "10", help: "gradient penalty weight" },
    KeyDef { name: "class_loss_weight", default: "1", help: "weight of the conditional term in the generator loss" },
    KeyDef { name: "iterations", default: "100000", help: "generator updates" },
    KeyDef { name: "inner_steps", default: "2", help: "critic and classifier updates per iteration" },
    KeyDef { name: "batch_size", default: "64", help: "GAN batch size" },
    KeyDef { name: "learning_rate", default: "5e-5", help: "GAN RMSprop step size" },
    KeyDef { name: "rmsprop_decay", default: "0.99", help: "GAN RMSprop decay" },
    KeyDef { name: "rmsprop_epsilon", default: "1e-8", help: "GAN RMSprop epsilon" },
    KeyDef { name: "mode", default: "supervised", help: "supervised | semi-supervised (train only)" },
    KeyDef { name: "checkpoint_every", default: "5000", help: "iterations between checkpoints" },
    KeyDef { name: "split", default: "random", help: "random | spatial" },
    KeyDef { name: "split_fraction", default: "0.03", help: "labeled fraction used for training (random split)" },
    KeyDef { name: "split_axis", default: "col", help: "col | row (spatial split)" },
    KeyDef { name: "split_boundary", default: "half", help: "pixel index of the spatial cut, or half" },
    KeyDef { name: "strategies", default: "none,gan,ss-gan", help: "comma list of none | gan | ss-gan" },
    KeyDef { name: "fake_ratio", default: "0.5", help: "generated rows per real training row" },
    KeyDef { name: "ratio_sweep", default: "", help: "optional comma list of ratios evaluated per strategy" },
    KeyDef { name: "classifier_epochs", default: "200", help: "classifier training epochs" },
    KeyDef { name: "classifier_batch_size", default: "64", help: "classifier batch size" },
    KeyDef { name: "classifier_learning_rate", default: "5e-5", help: "classifier RMSprop step size" },
    KeyDef { name: "classifier_hidden_width", default: "512", help: "classifier hidden layer width" },
    KeyDef { name: "classifier_layers", default: "4", help: "affine layers in the classifier" },
];

/// Help text listing every key with its default.
pub fn keys_help() -> String {
    let mut s = String::from("Config keys (key = value; defaults shown):\n");
    for k in KEYS {
        let default = if k.default.is_empty() { "(unset)" } else { k.default };
        writeln!(s, "  {:<26} {:<18} {}", k.name, default, k.help).expect("string write");
    }
    s
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

impl RunConfig {
    pub fn defaults() -> Self {
        Self {
            values: KEYS.iter().map(|k| (k.name, k.default.to_string())).collect(),
        }
    }

    /// Defaults, then the file (if any), then each `key=value` override.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, Failure> {
        let mut cfg = Self::defaults();
        if let Some(path) = file {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Failure::config(format!("override {o:?} is not key=value")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), Failure> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::config(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        let def = KEYS
            .iter()
            .find(|k| k.name == key)
            .ok_or_else(|| Failure::config(format!("unknown config key {key:?}")))?;
        self.values.insert(def.name, value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, Failure>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|e| Failure::config(format!("config key {key}: cannot parse {raw:?}: {e}")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| Failure::config(format!("config key {key}: {s:?}: {e}"))))
            .collect()
    }

    pub fn data_path(&self) -> Result<PathBuf, Failure> {
        let raw = self.raw("data");
        if raw.is_empty() {
            return Err(Failure::config("config key data is required"));
        }
        let path = PathBuf::from(raw);
        if !path.is_file() {
            return Err(Failure::config(format!("data file {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn out_dir(&self) -> Result<PathBuf, Failure> {
        let dir = PathBuf::from(self.raw("out_dir"));
        fs::create_dir_all(&dir).map_err(|e| Failure::data(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }

    pub fn gan(&self) -> Result<GanConfig, Failure> {
        let cfg = GanConfig {
            latent_dim: self.get("latent_dim")?,
            hidden_width: self.get("hidden_width")?,
            n_layers: self.get("n_layers")?,
            gp_coefficient: self.get("gp_coefficient")?,
            class_loss_weight: self.get("class_loss_weight")?,
            iterations: self.get("iterations")?,
            inner_steps: self.get("inner_steps")?,
            batch_size: self.get("batch_size")?,
            learning_rate: self.get("learning_rate")?,
            rmsprop_decay: self.get("rmsprop_decay")?,
            rmsprop_epsilon: self.get("rmsprop_epsilon")?,
            mode: self.get::<TrainingMode>("mode")?,
            seed: self.get("seed")?,
            checkpoint_every: self.get("checkpoint_every")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn augment(&self) -> Result<AugmentConfig, Failure> {
        let cfg = AugmentConfig {
            strategy: AugmentStrategy::None,
            fake_ratio: self.get("fake_ratio")?,
            epochs: self.get("classifier_epochs")?,
            batch_size: self.get("classifier_batch_size")?,
            learning_rate: self.get("classifier_learning_rate")?,
            hidden_width: self.get("classifier_hidden_width")?,
            n_layers: self.get("classifier_layers")?,
            seed: self.get("seed")?,
            ..AugmentConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn strategies(&self) -> Result<Vec<AugmentStrategy>, Failure> {
        let s: Vec<AugmentStrategy> = self.list("strategies")?;
        if s.is_empty() {
            return Err(Failure::config("config key strategies lists nothing"));
        }
        Ok(s)
    }

    pub fn ratio_sweep(&self) -> Result<Vec<f64>, Failure> {
        self.list("ratio_sweep")
    }

    pub fn split_spec(&self, table: &SpectraTable) -> Result<SplitSpec, Failure> {
        match self.raw("split") {
            "random" => Ok(SplitSpec::RandomFraction {
                fraction: self.get("split_fraction")?,
                seed: 0,
            }),
            "spatial" => {
                let axis = match self.raw("split_axis") {
                    "col" | "column" => SplitAxis::Column,
                    "row" => SplitAxis::Row,
                    other => return Err(Failure::config(format!("split_axis must be col or row, got {other:?}"))),
                };
                match self.raw("split_boundary") {
                    "half" => Ok(SplitSpec::spatial_halves(table, axis)?),
                    _ => Ok(SplitSpec::SpatialHalves { axis, boundary: self.get("split_boundary")? }),
                }
            }
            other => Err(Failure::config(format!("split must be random or spatial, got {other:?}"))),
        }
    }
}

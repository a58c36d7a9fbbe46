//! Run configuration files: one `key = value` per line, `#` starts a comment,
//! blank lines are ignored. Unknown and repeated keys are errors. Lists are
//! comma-separated; optional values accept `none`.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use super::{IoError, Result};
use crate::nn::TrainConfig;

/// Ordered `key = value` pairs with the line each came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDocument {
    pub entries: Vec<(String, String, usize)>,
}

/// Every key a run configuration accepts, in file order.
pub const CONFIG_KEYS: &[&str] = &[
    "seed",
    "dataset",
    "data_dir",
    "synthetic.classes",
    "synthetic.per_class",
    "synthetic.test_per_class",
    "synthetic.dims",
    "synthetic.informative",
    "synthetic.noise",
    "hidden",
    "train.epochs",
    "train.batch_size",
    "train.learning_rate",
    "train.milestones",
    "train.lr_multiplier",
    "train.weight_decay",
    "train.momentum",
    "retrain.epochs",
    "retrain.batch_size",
    "retrain.learning_rate",
    "retrain.milestones",
    "retrain.lr_multiplier",
    "retrain.weight_decay",
    "retrain.momentum",
    "groups",
    "samples_per_class",
    "delta",
    "gamma",
    "target_sparsity",
    "skip_output",
    "skip_layers",
    "bins",
    "epsilons",
    "attack.steps",
    "attack.step_size",
    "attack.samples",
    "sweep.parameter",
    "sweep.values",
    "sweep.targets",
    "sweep.accuracy_floor",
];

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| IoError::Config {
                line: line_no,
                message: format!("expected key = value, found {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !CONFIG_KEYS.contains(&key) {
                return Err(IoError::Config { line: line_no, message: format!("unknown key {key:?}") });
            }
            if doc.get(key).is_some() {
                return Err(IoError::Config { line: line_no, message: format!("key {key:?} given twice") });
            }
            doc.entries.push((key.to_string(), value.to_string(), line_no));
        }
        Ok(doc)
    }

    pub fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v, _)| format!("{k} = {v}\n")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Blobs,
    Rings,
}

impl FromStr for DatasetKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mnist" => Ok(Self::Mnist),
            "blobs" => Ok(Self::Blobs),
            "rings" => Ok(Self::Rings),
            _ => Err(format!("unknown dataset {s:?} (mnist, blobs, rings)")),
        }
    }
}

impl Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mnist => "mnist",
            Self::Blobs => "blobs",
            Self::Rings => "rings",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Groups,
    SamplesPerClass,
}

impl FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "groups" => Ok(Self::Groups),
            "samples_per_class" => Ok(Self::SamplesPerClass),
            _ => Err(format!("unknown sweep parameter {s:?} (groups, samples_per_class)")),
        }
    }
}

impl Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Groups => "groups",
            Self::SamplesPerClass => "samples_per_class",
        })
    }
}

/// Fully resolved settings of a pipeline run.
///
/// Training and retraining defaults are the MLP setups: 30 epochs, batch 256,
/// learning rate 0.1 decayed by 0.1 at epochs 10 and 20, weight decay 1e-4 and
/// momentum 0.9. Grouping and sample-count defaults are sized for a desktop
/// run on MNIST.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub dataset: DatasetKind,
    /// Directory holding the MNIST IDX files; empty selects the environment
    /// variable or `data/mnist`.
    pub data_dir: String,
    pub synthetic_classes: usize,
    pub synthetic_per_class: usize,
    pub synthetic_test_per_class: usize,
    pub synthetic_dims: usize,
    pub synthetic_informative: usize,
    pub synthetic_noise: f64,
    /// Hidden layer widths; input and output widths come from the data.
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
    pub retrain: TrainConfig,
    /// Groups per activation layer, input first. A single value applies to
    /// every layer. Counts above a layer's width are capped at the width.
    pub groups: Vec<usize>,
    pub samples_per_class: usize,
    pub delta: f64,
    pub gamma: f64,
    /// When set, `delta` is solved so the pruned fraction approaches this value.
    pub target_sparsity: Option<f64>,
    /// Leave the output layer dense.
    pub skip_output: bool,
    /// Further weight-layer indices left dense.
    pub skip_layers: Vec<usize>,
    pub bins: usize,
    pub epsilons: Vec<f64>,
    pub attack_steps: usize,
    /// Defaults to epsilon / steps.
    pub attack_step_size: Option<f64>,
    pub attack_samples: usize,
    pub sweep_parameter: SweepParameter,
    pub sweep_values: Vec<usize>,
    pub sweep_targets: Vec<f64>,
    pub sweep_accuracy_floor: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            seed: 0,
            dataset: DatasetKind::Mnist,
            data_dir: String::new(),
            synthetic_classes: 2,
            synthetic_per_class: 500,
            synthetic_test_per_class: 250,
            synthetic_dims: 2,
            synthetic_informative: 2,
            synthetic_noise: 0.5,
            hidden: vec![500, 300],
            retrain: train.clone(),
            train,
            groups: vec![112, 20, 20, 10],
            samples_per_class: 50,
            delta: 0.645,
            gamma: 1.0,
            target_sparsity: None,
            skip_output: true,
            skip_layers: Vec::new(),
            bins: 10,
            epsilons: vec![0.02, 0.05, 0.1],
            attack_steps: 10,
            attack_step_size: None,
            attack_samples: 1000,
            sweep_parameter: SweepParameter::Groups,
            sweep_values: vec![2, 4, 8],
            sweep_targets: (1..=19).map(|k| k as f64 * 0.05).collect(),
            sweep_accuracy_floor: 0.95,
        }
    }
}

fn join<T: Display>(values: &[T]) -> String {
    if values.is_empty() {
        "none".to_string()
    } else {
        values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: Display,
{
    value.parse::<T>().map_err(|e| format!("invalid value {value:?}: {e}"))
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: Display,
{
    if value == "none" || value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| scalar(v.trim())).collect()
}

fn optional<T: FromStr>(value: &str) -> std::result::Result<Option<T>, String>
where
    T::Err: Display,
{
    if value == "none" || value.is_empty() { Ok(None) } else { scalar(value).map(Some) }
}

fn train_value(t: &TrainConfig, field: &str) -> String {
    match field {
        "epochs" => t.epochs.to_string(),
        "batch_size" => t.batch_size.to_string(),
        "learning_rate" => t.learning_rate.to_string(),
        "milestones" => join(&t.milestones),
        "lr_multiplier" => t.lr_multiplier.to_string(),
        "weight_decay" => t.weight_decay.to_string(),
        "momentum" => t.momentum.to_string(),
        _ => unreachable!("unknown training field {field}"),
    }
}

fn set_train(t: &mut TrainConfig, field: &str, value: &str) -> std::result::Result<(), String> {
    match field {
        "epochs" => t.epochs = scalar(value)?,
        "batch_size" => t.batch_size = scalar(value)?,
        "learning_rate" => t.learning_rate = scalar(value)?,
        "milestones" => t.milestones = list(value)?,
        "lr_multiplier" => t.lr_multiplier = scalar(value)?,
        "weight_decay" => t.weight_decay = scalar(value)?,
        "momentum" => t.momentum = scalar(value)?,
        _ => return Err(format!("unknown training field {field:?}")),
    }
    Ok(())
}

impl RunConfig {
    /// Value of `key` in file syntax.
    pub fn value(&self, key: &str) -> Option<String> {
        if let Some(field) = key.strip_prefix("train.") {
            return CONFIG_KEYS.contains(&key).then(|| train_value(&self.train, field));
        }
        if let Some(field) = key.strip_prefix("retrain.") {
            return CONFIG_KEYS.contains(&key).then(|| train_value(&self.retrain, field));
        }
        Some(match key {
            "seed" => self.seed.to_string(),
            "dataset" => self.dataset.to_string(),
            "data_dir" => self.data_dir.clone(),
            "synthetic.classes" => self.synthetic_classes.to_string(),
            "synthetic.per_class" => self.synthetic_per_class.to_string(),
            "synthetic.test_per_class" => self.synthetic_test_per_class.to_string(),
            "synthetic.dims" => self.synthetic_dims.to_string(),
            "synthetic.informative" => self.synthetic_informative.to_string(),
            "synthetic.noise" => self.synthetic_noise.to_string(),
            "hidden" => join(&self.hidden),
            "groups" => join(&self.groups),
            "samples_per_class" => self.samples_per_class.to_string(),
            "delta" => self.delta.to_string(),
            "gamma" => self.gamma.to_string(),
            "target_sparsity" => opt(&self.target_sparsity),
            "skip_output" => self.skip_output.to_string(),
            "skip_layers" => join(&self.skip_layers),
            "bins" => self.bins.to_string(),
            "epsilons" => join(&self.epsilons),
            "attack.steps" => self.attack_steps.to_string(),
            "attack.step_size" => opt(&self.attack_step_size),
            "attack.samples" => self.attack_samples.to_string(),
            "sweep.parameter" => self.sweep_parameter.to_string(),
            "sweep.values" => join(&self.sweep_values),
            "sweep.targets" => join(&self.sweep_targets),
            "sweep.accuracy_floor" => self.sweep_accuracy_floor.to_string(),
            _ => return None,
        })
    }

    /// Set `key` from its file syntax. Errors carry no line number.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if let Some(field) = key.strip_prefix("train.") {
            return set_train(&mut self.train, field, value);
        }
        if let Some(field) = key.strip_prefix("retrain.") {
            return set_train(&mut self.retrain, field, value);
        }
        match key {
            "seed" => self.seed = scalar(value)?,
            "dataset" => self.dataset = value.parse()?,
            "data_dir" => self.data_dir = value.to_string(),
            "synthetic.classes" => self.synthetic_classes = scalar(value)?,
            "synthetic.per_class" => self.synthetic_per_class = scalar(value)?,
            "synthetic.test_per_class" => self.synthetic_test_per_class = scalar(value)?,
            "synthetic.dims" => self.synthetic_dims = scalar(value)?,
            "synthetic.informative" => self.synthetic_informative = scalar(value)?,
            "synthetic.noise" => self.synthetic_noise = scalar(value)?,
            "hidden" => self.hidden = list(value)?,
            "groups" => self.groups = list(value)?,
            "samples_per_class" => self.samples_per_class = scalar(value)?,
            "delta" => self.delta = scalar(value)?,
            "gamma" => self.gamma = scalar(value)?,
            "target_sparsity" => self.target_sparsity = optional(value)?,
            "skip_output" => self.skip_output = scalar(value)?,
            "skip_layers" => self.skip_layers = list(value)?,
            "bins" => self.bins = scalar(value)?,
            "epsilons" => self.epsilons = list(value)?,
            "attack.steps" => self.attack_steps = scalar(value)?,
            "attack.step_size" => self.attack_step_size = optional(value)?,
            "attack.samples" => self.attack_samples = scalar(value)?,
            "sweep.parameter" => self.sweep_parameter = value.parse()?,
            "sweep.values" => self.sweep_values = list(value)?,
            "sweep.targets" => self.sweep_targets = list(value)?,
            "sweep.accuracy_floor" => self.sweep_accuracy_floor = scalar(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Defaults overridden by every entry of `doc`.
    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let mut c = Self::default();
        for (key, value, line) in &doc.entries {
            c.set(key, value).map_err(|message| IoError::Config { line: *line, message: format!("{key}: {message}") })?;
        }
        c.validate().map_err(|message| IoError::Config { line: 0, message })?;
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(&ConfigDocument::parse(text)?)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key with its value.
    pub fn to_document(&self) -> ConfigDocument {
        ConfigDocument {
            entries: CONFIG_KEYS
                .iter()
                .enumerate()
                .map(|(i, k)| (k.to_string(), self.value(k).unwrap(), i + 1))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_document().to_text()
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        self.train.validate().map_err(|e| format!("train: {e}"))?;
        self.retrain.validate().map_err(|e| format!("retrain: {e}"))?;
        if self.hidden.contains(&0) {
            return Err("hidden widths must be positive".into());
        }
        if self.groups.is_empty() || self.groups.contains(&0) {
            return Err("groups must be positive".into());
        }
        if self.groups.len() != 1 && self.groups.len() != self.hidden.len() + 2 {
            return Err(format!(
                "groups needs 1 or {} values (input, hidden layers, output), got {}",
                self.hidden.len() + 2,
                self.groups.len()
            ));
        }
        if self.samples_per_class == 0 {
            return Err("samples_per_class must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.delta) || !(0.0..=1.0).contains(&self.gamma) {
            return Err("delta and gamma must lie in [0, 1]".into());
        }
        if let Some(t) = self.target_sparsity {
            if !(0.0..1.0).contains(&t) {
                return Err("target_sparsity must lie in [0, 1)".into());
            }
        }
        if self.bins == 0 || self.attack_steps == 0 || self.attack_samples == 0 {
            return Err("bins, attack.steps and attack.samples must be at least 1".into());
        }
        if self.epsilons.iter().any(|e| !(*e >= 0.0)) {
            return Err("epsilons must be non-negative".into());
        }
        if self.attack_step_size.is_some_and(|s| !(s > 0.0)) {
            return Err("attack.step_size must be positive".into());
        }
        if self.synthetic_classes < 2 || self.synthetic_per_class == 0 || self.synthetic_test_per_class == 0 {
            return Err("synthetic data needs at least 2 classes and 1 sample per class".into());
        }
        if self.synthetic_informative == 0 || self.synthetic_informative > self.synthetic_dims {
            return Err("synthetic.informative must lie in 1..=synthetic.dims".into());
        }
        if !(self.synthetic_noise >= 0.0) {
            return Err("synthetic.noise must be non-negative".into());
        }
        if self.sweep_values.is_empty() || self.sweep_values.contains(&0) {
            return Err("sweep.values must be positive".into());
        }
        if self.sweep_targets.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err("sweep.targets must lie in [0, 1)".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
        assert_eq!(RunConfig::parse("").unwrap(), c);
    }

    #[test]
    fn comments_and_overrides() {
        let c = RunConfig::parse("# run\n\ndelta = 0.5 # tighter\ntarget_sparsity=0.8\nhidden = 16\ngroups = 4\n").unwrap();
        assert_eq!((c.delta, c.target_sparsity, c.hidden.clone(), c.groups.clone()), (0.5, Some(0.8), vec![16], vec![4]));
    }

    #[test]
    fn errors_carry_lines() {
        for (text, line) in [("seed = 1\nbogus = 2", 2), ("delta = 0.1\ndelta = 0.2", 2), ("seed 3", 1), ("seed = x", 1)] {
            match RunConfig::parse(text) {
                Err(IoError::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(RunConfig::parse("groups = 1,2").is_err());
    }
}

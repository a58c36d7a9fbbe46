//! Pipeline stages shared by the command-line tool and the end-to-end tests:
//! train, capture activations, estimate dependencies, prune, retrain, report,
//! characterize and sweep.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::characterize::{attack_curve, ece, AttackConfig, AttackMode, CharacterizeError, CurvePoint, ReliabilityProfile};
use crate::gmi::GmiError;
use crate::io::{read_mnist, split_checksum, DatasetKind, IoError, MnistSplit, RunConfig, SweepParameter};
use crate::nn::{
    activation_layer_name, capture_activations, concentric_rings, csr_footprint, evaluate, gaussian_blobs, layer_shapes,
    retrain_masked, train, ActivationDump, BlobSpec, Dataset, Footprint, MlpModel, NnError, TrainConfig, TrainTrace,
};
use crate::prune::{
    build_masks, compute_dependency_table, group_filters, solve_delta_for_sparsity, sparsity_report, DependencyTable,
    Grouping, PruneError, PruneMask, SparsityReport, ThresholdPolicy,
};
use crate::seed::derive_seed;

/// Environment variable naming the default MNIST directory.
pub const DATA_DIR_ENV: &str = "MINT_DATA_DIR";
pub const DEFAULT_DATA_DIR: &str = "data/mnist";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error(transparent)]
    Estimator(#[from] GmiError),
    #[error(transparent)]
    Characterize(#[from] CharacterizeError),
    #[error("{0}")]
    Invalid(String),
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(IoError::Io(e))
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Seeds of the individual stages, all derived from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Init = 1,
    Train = 2,
    Capture = 3,
    Dependencies = 4,
    Retrain = 5,
    AttackSubset = 6,
    Data = 7,
    Split = 8,
}

pub fn stage_seed(cfg: &RunConfig, stage: Stage) -> u64 {
    derive_seed(cfg.seed, &[stage as u64])
}

pub fn data_dir(cfg: &RunConfig) -> PathBuf {
    if cfg.data_dir.is_empty() {
        PathBuf::from(DEFAULT_DATA_DIR)
    } else {
        PathBuf::from(&cfg.data_dir)
    }
}

/// Training and test sets. Synthetic data is generated once and split
/// class-stratified so both halves share the feature scaling.
pub fn load_datasets(cfg: &RunConfig) -> Result<(Dataset, Dataset)> {
    if cfg.dataset == DatasetKind::Mnist {
        let dir = data_dir(cfg);
        return Ok((read_mnist(&dir, MnistSplit::Train)?, read_mnist(&dir, MnistSplit::Test)?));
    }
    let per_class = cfg.synthetic_per_class + cfg.synthetic_test_per_class;
    let seed = stage_seed(cfg, Stage::Data);
    let all = match cfg.dataset {
        DatasetKind::Blobs => gaussian_blobs(
            &BlobSpec {
                classes: cfg.synthetic_classes,
                per_class,
                dims: cfg.synthetic_dims,
                informative: cfg.synthetic_informative,
                radius: 2.0,
                noise: cfg.synthetic_noise,
            },
            seed,
        )?,
        _ => concentric_rings(cfg.synthetic_classes, per_class, cfg.synthetic_noise, cfg.synthetic_dims.saturating_sub(2), seed)?,
    };
    let test_idx = all.stratified_indices(cfg.synthetic_test_per_class, stage_seed(cfg, Stage::Split))?;
    let held: BTreeSet<usize> = test_idx.iter().copied().collect();
    let train_idx: Vec<usize> = (0..all.len()).filter(|i| !held.contains(i)).collect();
    Ok((all.subset(&train_idx)?, all.subset(&test_idx)?))
}

pub fn train_config(cfg: &RunConfig, retraining: bool) -> TrainConfig {
    if retraining {
        TrainConfig { seed: stage_seed(cfg, Stage::Retrain), ..cfg.retrain.clone() }
    } else {
        TrainConfig { seed: stage_seed(cfg, Stage::Train), ..cfg.train.clone() }
    }
}

pub fn initial_model(cfg: &RunConfig, data: &Dataset) -> Result<MlpModel> {
    let widths: Vec<usize> =
        std::iter::once(data.dims()).chain(cfg.hidden.iter().copied()).chain(std::iter::once(data.class_count)).collect();
    Ok(MlpModel::new(&widths, stage_seed(cfg, Stage::Init))?)
}

pub fn train_baseline(cfg: &RunConfig, data: &Dataset) -> Result<(MlpModel, TrainTrace)> {
    let model = initial_model(cfg, data)?;
    Ok(train(&model, data, &train_config(cfg, false))?)
}

pub fn capture(cfg: &RunConfig, model: &MlpModel, data: &Dataset) -> Result<ActivationDump> {
    Ok(capture_activations(model, data, cfg.samples_per_class, stage_seed(cfg, Stage::Capture))?)
}

/// One grouping per activation layer. A single configured count applies to
/// every layer; counts are capped at the layer width.
pub fn groupings(cfg: &RunConfig, widths: &[usize]) -> Result<Vec<Grouping>> {
    if cfg.groups.len() != 1 && cfg.groups.len() != widths.len() {
        return Err(PipelineError::Invalid(format!(
            "{} group counts for {} activation layers",
            cfg.groups.len(),
            widths.len()
        )));
    }
    widths
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let g = if cfg.groups.len() == 1 { cfg.groups[0] } else { cfg.groups[k] };
            Ok(group_filters(w, g.min(w))?)
        })
        .collect()
}

/// Weight-layer indices left dense.
pub fn skip_set(cfg: &RunConfig, weight_layers: usize) -> BTreeSet<usize> {
    let mut skip: BTreeSet<usize> = cfg.skip_layers.iter().copied().collect();
    if cfg.skip_output && weight_layers > 0 {
        skip.insert(weight_layers - 1);
    }
    skip
}

/// The dump layer whose name, without any checksum suffix, is `name`.
pub fn dump_layer<'a>(dump: &'a ActivationDump, name: &str) -> Result<&'a crate::nn::ActivationLayer> {
    dump.layers
        .iter()
        .find(|l| split_checksum(&l.name).0 == name)
        .ok_or_else(|| PipelineError::Invalid(format!("activation dump has no layer {name}")))
}

/// Dependency tables for every weight layer that is not skipped. `widths` are
/// the activation widths, input first.
pub fn dependency_tables(cfg: &RunConfig, dump: &ActivationDump, widths: &[usize]) -> Result<Vec<DependencyTable>> {
    let groups = groupings(cfg, widths)?;
    let skip = skip_set(cfg, widths.len() - 1);
    let master = stage_seed(cfg, Stage::Dependencies);
    let mut tables = Vec::new();
    for l in 0..widths.len() - 1 {
        if skip.contains(&l) {
            continue;
        }
        let producer = dump_layer(dump, &activation_layer_name(l))?.to_samples()?;
        let consumer = dump_layer(dump, &activation_layer_name(l + 1))?.to_samples()?;
        tables.push(compute_dependency_table(&producer, &consumer, &groups[l], &groups[l + 1], l, master)?);
    }
    Ok(tables)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneOutcome {
    pub mask: PruneMask,
    /// Global threshold: the configured one, or the solved one under a target.
    pub delta: f64,
    pub sparsity: SparsityReport,
    /// The target could not be met under the gamma caps.
    pub unreachable: bool,
}

pub fn prune(cfg: &RunConfig, model: &MlpModel, tables: &[DependencyTable]) -> Result<PruneOutcome> {
    let shapes = layer_shapes(model);
    let groups = groupings(cfg, &model.widths())?;
    let skip = skip_set(cfg, shapes.len());
    let (mask, delta, unreachable) = match cfg.target_sparsity {
        Some(target) => {
            let sol = solve_delta_for_sparsity(&shapes, &groups, tables, cfg.gamma, &skip, target)?;
            (sol.mask, sol.delta, sol.unreachable)
        }
        None => {
            let policy = ThresholdPolicy { delta: cfg.delta, gamma: cfg.gamma, skip_layers: skip };
            (build_masks(&shapes, &groups, tables, &policy)?, cfg.delta, false)
        }
    };
    let sparsity = sparsity_report(&mask, &shapes)?;
    Ok(PruneOutcome { mask, delta, sparsity, unreachable })
}

pub fn retrain(cfg: &RunConfig, model: &MlpModel, mask: &PruneMask, data: &Dataset) -> Result<(MlpModel, TrainTrace)> {
    Ok(retrain_masked(model, mask, data, &train_config(cfg, true))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub baseline_accuracy: f64,
    pub pruned_accuracy: f64,
    pub sparsity: SparsityReport,
    pub baseline_footprint: Footprint,
    pub pruned_footprint: Footprint,
}

pub fn report(baseline: &MlpModel, pruned: &MlpModel, mask: &PruneMask, test: &Dataset) -> Result<PipelineReport> {
    Ok(PipelineReport {
        baseline_accuracy: evaluate(baseline, test)?.accuracy,
        pruned_accuracy: evaluate(pruned, test)?.accuracy,
        sparsity: sparsity_report(mask, &layer_shapes(pruned))?,
        baseline_footprint: csr_footprint(baseline),
        pruned_footprint: csr_footprint(pruned),
    })
}

impl PipelineReport {
    /// Sparse footprint of the pruned model over the dense footprint.
    pub fn footprint_ratio(&self) -> f64 {
        self.pruned_footprint.sparse_bytes() as f64 / self.baseline_footprint.dense_bytes() as f64
    }

    pub fn to_text(&self) -> String {
        let mb = |b: usize| b as f64 / 1e6;
        let mut s = String::new();
        writeln!(s, "baseline accuracy      {:.2}%", 100.0 * self.baseline_accuracy).unwrap();
        writeln!(s, "pruned accuracy        {:.2}%", 100.0 * self.pruned_accuracy).unwrap();
        writeln!(s, "parameters pruned      {:.2}%", self.sparsity.total_pruned_pct).unwrap();
        writeln!(s, "dense footprint        {:.3} MB", mb(self.baseline_footprint.dense_bytes())).unwrap();
        writeln!(s, "pruned CSR footprint   {:.3} MB", mb(self.pruned_footprint.sparse_bytes())).unwrap();
        writeln!(s, "footprint ratio        {:.4}", self.footprint_ratio()).unwrap();
        writeln!(s, "\nlayer  pruned%  nnz  weights").unwrap();
        for (l, f) in self.sparsity.layers.iter().zip(&self.pruned_footprint.layers) {
            writeln!(s, "{:<6} {:>7.2}  {}  {}", l.name, l.pruned_pct, f.nnz, l.weights).unwrap();
        }
        s
    }

    pub fn layers_tsv(&self) -> String {
        let mut s = String::from("layer\tpruned_pct\tpruned_weights\tweights\tnnz\tdense_bytes\tsparse_bytes\n");
        for ((l, b), p) in self.sparsity.layers.iter().zip(&self.baseline_footprint.layers).zip(&self.pruned_footprint.layers) {
            writeln!(s, "{}\t{}\t{}\t{}\t{}\t{}\t{}", l.name, l.pruned_pct, l.pruned_weights, l.weights, p.nnz, b.dense_bytes, p.sparse_bytes())
                .unwrap();
        }
        s
    }
}

/// Tables as `layer_pair consumer_group producer_group rho` rows.
pub fn tables_tsv(tables: &[DependencyTable]) -> String {
    let mut s = String::from("layer_pair\tconsumer_group\tproducer_group\trho\n");
    for t in tables {
        for i in 0..t.consumer_groups() {
            for j in 0..t.producer_groups() {
                writeln!(s, "{}\t{i}\t{j}\t{}", t.layer_pair, t.rho(i, j)).unwrap();
            }
        }
    }
    s
}

pub fn parse_tables_tsv(text: &str) -> Result<Vec<DependencyTable>> {
    let bad = |n: usize, msg: &str| PipelineError::Invalid(format!("dependency table line {n}: {msg}"));
    let mut cells: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (k, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad(k + 1, "expected 4 fields"));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(k + 1, "invalid index"));
        let rho = f[3].parse::<f64>().map_err(|_| bad(k + 1, "invalid score"))?;
        cells.push((idx(f[0])?, idx(f[1])?, idx(f[2])?, rho));
    }
    let pairs: BTreeSet<usize> = cells.iter().map(|c| c.0).collect();
    pairs
        .into_iter()
        .map(|l| {
            let mine: Vec<_> = cells.iter().filter(|c| c.0 == l).collect();
            let rows = mine.iter().map(|c| c.1).max().unwrap() + 1;
            let cols = mine.iter().map(|c| c.2).max().unwrap() + 1;
            let mut values = vec![f64::NAN; rows * cols];
            for c in &mine {
                values[c.1 * cols + c.2] = c.3;
            }
            if mine.len() != rows * cols || values.iter().any(|v| v.is_nan()) {
                return Err(PipelineError::Invalid(format!("dependency table {l} is incomplete")));
            }
            Ok(DependencyTable::from_values(l, rows, cols, values)?)
        })
        .collect()
}

pub fn trace_tsv(trace: &TrainTrace) -> String {
    let mut s = String::from("epoch\tlearning_rate\tmean_loss\ttrain_accuracy\n");
    for e in &trace.epochs {
        writeln!(s, "{}\t{}\t{}\t{}", e.epoch, e.learning_rate, e.mean_loss, e.train_accuracy).unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct Characterization {
    pub accuracy: f64,
    pub calibration: ReliabilityProfile,
    pub untargeted: Vec<CurvePoint>,
    pub least_likely: Vec<CurvePoint>,
}

pub fn characterize(cfg: &RunConfig, model: &MlpModel, test: &Dataset) -> Result<Characterization> {
    let e = evaluate(model, test)?;
    let calibration = ece(&e.confidences, &e.correct, cfg.bins)?;
    let seed = stage_seed(cfg, Stage::AttackSubset);
    let curve = |mode| -> Result<Vec<CurvePoint>> {
        let attack = AttackConfig { epsilon: 0.0, steps: cfg.attack_steps, step_size: cfg.attack_step_size, mode };
        Ok(attack_curve(model, test, &cfg.epsilons, &attack, cfg.attack_samples, seed)?)
    };
    Ok(Characterization {
        accuracy: e.accuracy,
        calibration,
        untargeted: curve(AttackMode::Untargeted)?,
        least_likely: curve(AttackMode::LeastLikely)?,
    })
}

impl Characterization {
    pub fn calibration_tsv(&self) -> String {
        let mut s = String::from("bin_low\tbin_high\tcount\tmean_confidence\taccuracy\n");
        for (b, w) in self.calibration.bins.iter().zip(self.calibration.edges.windows(2)) {
            writeln!(s, "{}\t{}\t{}\t{}\t{}", w[0], w[1], b.count, b.mean_confidence, b.accuracy).unwrap();
        }
        s
    }

    pub fn attack_tsv(&self) -> String {
        let mut s = String::from("epsilon\tuntargeted_accuracy\tleast_likely_accuracy\n");
        for (u, l) in self.untargeted.iter().zip(&self.least_likely) {
            writeln!(s, "{}\t{}\t{}", u.epsilon, u.accuracy, l.accuracy).unwrap();
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub target: f64,
    pub pruned_fraction: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepRow {
    /// Largest pruned fraction whose retrained accuracy reaches `floor`.
    pub fn best_pruned(&self, floor: f64) -> Option<&SweepPoint> {
        self.points.iter().filter(|p| p.accuracy >= floor).max_by(|a, b| a.pruned_fraction.total_cmp(&b.pruned_fraction))
    }
}

/// For each value of the swept parameter, with every other setting fixed:
/// estimate dependencies, then prune to each target sparsity and retrain.
/// The baseline is trained once.
pub fn sweep(cfg: &RunConfig, train_set: &Dataset, test: &Dataset, baseline: &MlpModel) -> Result<Vec<SweepRow>> {
    if cfg.sweep_targets.is_empty() {
        return Err(PipelineError::Invalid("sweep needs at least one target sparsity".into()));
    }
    let widths = baseline.widths();
    let fixed_dump = capture(cfg, baseline, train_set)?;
    let mut rows = Vec::new();
    for &value in &cfg.sweep_values {
        let mut c = cfg.clone();
        let dump = match cfg.sweep_parameter {
            SweepParameter::Groups => {
                c.groups = vec![value];
                fixed_dump.clone()
            }
            SweepParameter::SamplesPerClass => {
                c.samples_per_class = value;
                capture(&c, baseline, train_set)?
            }
        };
        let tables = dependency_tables(&c, &dump, &widths)?;
        let mut points = Vec::new();
        for &target in &cfg.sweep_targets {
            c.target_sparsity = Some(target);
            let outcome = prune(&c, baseline, &tables)?;
            let (retrained, _) = retrain(&c, baseline, &outcome.mask, train_set)?;
            points.push(SweepPoint {
                target,
                pruned_fraction: outcome.sparsity.pruned_fraction(),
                accuracy: evaluate(&retrained, test)?.accuracy,
            });
        }
        rows.push(SweepRow { value, points });
    }
    Ok(rows)
}

pub fn sweep_tsv(cfg: &RunConfig, rows: &[SweepRow]) -> String {
    let mut s = format!("{}\ttarget\tpruned_fraction\taccuracy\n", cfg.sweep_parameter);
    for r in rows {
        for p in &r.points {
            writeln!(s, "{}\t{}\t{}\t{}", r.value, p.target, p.pruned_fraction, p.accuracy).unwrap();
        }
    }
    s
}

pub fn sweep_summary(cfg: &RunConfig, rows: &[SweepRow]) -> String {
    let mut s = format!(
        "{}\tmax_pruned_fraction\taccuracy   (floor {})\n",
        cfg.sweep_parameter, cfg.sweep_accuracy_floor
    );
    for r in rows {
        match r.best_pruned(cfg.sweep_accuracy_floor) {
            Some(p) => writeln!(s, "{}\t{}\t{}", r.value, p.pruned_fraction, p.accuracy).unwrap(),
            None => writeln!(s, "{}\tnone\t-", r.value).unwrap(),
        }
    }
    s
}

/// Write `contents` to `dir/name`, creating `dir` if needed.
pub fn write_artifact(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_round_trip_through_tsv() {
        let t = vec![
            DependencyTable::from_values(0, 2, 3, vec![0.1, 0.0, 1.0, 0.3333333333333333, 0.5, 0.25]).unwrap(),
            DependencyTable::from_values(2, 1, 1, vec![0.75]).unwrap(),
        ];
        assert_eq!(parse_tables_tsv(&tables_tsv(&t)).unwrap(), t);
        assert!(parse_tables_tsv("h\n0\t0\t0\t0.1\n0\t1\t1\t0.2\n").is_err());
    }

    #[test]
    fn broadcast_and_capped_groupings() {
        let cfg = RunConfig { groups: vec![8], ..Default::default() };
        let g = groupings(&cfg, &[2, 16, 3]).unwrap();
        assert_eq!(g.iter().map(Grouping::len).collect::<Vec<_>>(), vec![2, 8, 3]);
        let cfg = RunConfig { groups: vec![1, 2], ..Default::default() };
        assert!(groupings(&cfg, &[2, 16, 3]).is_err());
    }

    #[test]
    fn output_layer_skipped_by_default() {
        let cfg = RunConfig { skip_layers: vec![0], ..Default::default() };
        assert_eq!(skip_set(&cfg, 3), BTreeSet::from([0, 2]));
    }

    #[test]
    fn synthetic_split_is_stratified() {
        let cfg = RunConfig { dataset: DatasetKind::Blobs, synthetic_per_class: 30, synthetic_test_per_class: 10, ..Default::default() };
        let (tr, te) = load_datasets(&cfg).unwrap();
        assert_eq!((tr.len(), te.len()), (60, 20));
        assert!(te.class_indices().iter().all(|c| c.len() == 10));
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mint::gmi::{conditional_gmi, gmi, BlockSpec, SampleMatrix};
use mint::io::{
    read_activations_file, read_model_file, write_activations_file, write_model_file, RunConfig,
};
use mint::nn::MlpModel;
use mint::pipeline::{self, PipelineError, Result, DATA_DIR_ENV};
use mint::prune::{read_mask_file, write_mask_file};

/// Dependency-driven pruning of dense networks.
#[derive(Parser, Debug)]
#[command(name = "mint", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory with the MNIST IDX files.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Groups per activation layer, comma-separated, or one count for all.
    #[arg(long, global = true)]
    groups: Option<String>,
    #[arg(long, global = true)]
    samples_per_class: Option<usize>,
    #[arg(long, global = true)]
    target_sparsity: Option<f64>,
    /// Comma-separated attack budgets.
    #[arg(long, global = true)]
    epsilons: Option<String>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Override any configuration key, e.g. `--set train.epochs=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train the baseline model.
    Train,
    /// Capture class-stratified activations of a trained model.
    Activations {
        #[arg(long)]
        model: PathBuf,
    },
    /// Estimate dependency tables from an activation dump.
    Deps {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        activations: PathBuf,
    },
    /// Threshold dependency tables into a pruning mask.
    Prune {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        deps: PathBuf,
    },
    /// Retrain a model with a fixed mask.
    Retrain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        mask: PathBuf,
    },
    /// Compare baseline and pruned models: accuracy, sparsity and footprint.
    Report {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        pruned: PathBuf,
        #[arg(long)]
        mask: PathBuf,
    },
    /// Estimate GMI between column blocks of a text sample file.
    Estimate {
        /// Whitespace- or comma-separated numbers, one sample per line.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        x_dims: usize,
        #[arg(long, default_value_t = 1)]
        y_dims: usize,
        /// Conditioning columns after X and Y; 0 gives the unconditional estimate.
        #[arg(long, default_value_t = 0)]
        z_dims: usize,
    },
    /// Calibration and adversarial accuracy of one or two models.
    Characterize {
        #[arg(long)]
        model: PathBuf,
        /// Optional second model reported alongside.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Maximum pruned fraction per group count or sample count.
    Sweep {
        /// Baseline model; trained from scratch when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn resolve_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::read_file(path)?,
        None => RunConfig::default(),
    };
    let mut set = |key: &str, value: String| -> Result<()> {
        cfg.set(key, &value).map_err(|e| PipelineError::Invalid(format!("--{key}: {e}")))
    };
    if let Some(v) = c.seed {
        set("seed", v.to_string())?;
    }
    if let Some(v) = &c.data_dir {
        set("data_dir", v.clone())?;
    }
    if let Some(v) = c.delta {
        set("delta", v.to_string())?;
    }
    if let Some(v) = c.gamma {
        set("gamma", v.to_string())?;
    }
    if let Some(v) = &c.groups {
        set("groups", v.clone())?;
    }
    if let Some(v) = c.samples_per_class {
        set("samples_per_class", v.to_string())?;
    }
    if let Some(v) = c.target_sparsity {
        set("target_sparsity", v.to_string())?;
    }
    if let Some(v) = &c.epsilons {
        set("epsilons", v.clone())?;
    }
    if let Some(v) = c.bins {
        set("bins", v.to_string())?;
    }
    for o in &c.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| PipelineError::Invalid(format!("--set expects KEY=VALUE, got {o:?}")))?;
        set(k.trim(), v.trim().to_string())?;
    }
    cfg.validate().map_err(PipelineError::Invalid)?;
    Ok(cfg)
}

fn read_samples(path: &Path) -> Result<SampleMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| PipelineError::Invalid(format!("{}:{}: {e}", path.display(), k + 1)))?;
        rows.push(row);
    }
    Ok(SampleMatrix::from_rows(&rows)?)
}

fn load_model(path: &Path) -> Result<MlpModel> {
    Ok(read_model_file(path)?)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli.common)?;
    let out = cli.common.out.as_path();
    pipeline::write_artifact(out, "config.txt", cfg.to_text())?;

    match cli.command {
        Command::Train => {
            let (train_set, test) = pipeline::load_datasets(&cfg)?;
            let (model, trace) = pipeline::train_baseline(&cfg, &train_set)?;
            std::fs::create_dir_all(out)?;
            write_model_file(&model, &out.join("model.mintmdl"))?;
            pipeline::write_artifact(out, "train_trace.tsv", pipeline::trace_tsv(&trace))?;
            let acc = mint::nn::evaluate(&model, &test)?.accuracy;
            println!("test accuracy {:.4}", acc);
        }
        Command::Activations { model } => {
            let (train_set, _) = pipeline::load_datasets(&cfg)?;
            let dump = pipeline::capture(&cfg, &load_model(&model)?, &train_set)?;
            std::fs::create_dir_all(out)?;
            write_activations_file(&dump, &out.join("activations.mintact"))?;
            println!("{} rows, {} layers", dump.rows(), dump.layers.len());
        }
        Command::Deps { model, activations } => {
            let model = load_model(&model)?;
            let dump = read_activations_file(&activations)?;
            let tables = pipeline::dependency_tables(&cfg, &dump, &model.widths())?;
            pipeline::write_artifact(out, "dependencies.tsv", pipeline::tables_tsv(&tables))?;
            println!("{} dependency tables", tables.len());
        }
        Command::Prune { model, deps } => {
            let model = load_model(&model)?;
            let tables = pipeline::parse_tables_tsv(&std::fs::read_to_string(&deps)?)?;
            let outcome = pipeline::prune(&cfg, &model, &tables)?;
            std::fs::create_dir_all(out)?;
            write_mask_file(&outcome.mask, &out.join("mask.txt"))?;
            let mut summary = format!("delta {}\n", outcome.delta);
            if outcome.unreachable {
                summary.push_str("target sparsity unreachable under the gamma cap\n");
            }
            for l in &outcome.sparsity.layers {
                summary.push_str(&format!("{} pruned {:.2}%\n", l.name, l.pruned_pct));
            }
            summary.push_str(&format!("total pruned {:.2}%\n", outcome.sparsity.total_pruned_pct));
            pipeline::write_artifact(out, "prune_summary.txt", &summary)?;
            print!("{summary}");
        }
        Command::Retrain { model, mask } => {
            let (train_set, test) = pipeline::load_datasets(&cfg)?;
            let model = load_model(&model)?;
            let mask = read_mask_file(&mask)?;
            let (retrained, trace) = pipeline::retrain(&cfg, &model, &mask, &train_set)?;
            std::fs::create_dir_all(out)?;
            write_model_file(&retrained, &out.join("retrained.mintmdl"))?;
            pipeline::write_artifact(out, "retrain_trace.tsv", pipeline::trace_tsv(&trace))?;
            println!("test accuracy {:.4}", mint::nn::evaluate(&retrained, &test)?.accuracy);
        }
        Command::Report { baseline, pruned, mask } => {
            let (_, test) = pipeline::load_datasets(&cfg)?;
            let r = pipeline::report(&load_model(&baseline)?, &load_model(&pruned)?, &read_mask_file(&mask)?, &test)?;
            pipeline::write_artifact(out, "report.txt", r.to_text())?;
            pipeline::write_artifact(out, "layers.tsv", r.layers_tsv())?;
            print!("{}", r.to_text());
        }
        Command::Estimate { input, x_dims, y_dims, z_dims } => {
            let samples = read_samples(&input)?;
            let spec = BlockSpec::contiguous(x_dims, y_dims, z_dims);
            let score = if z_dims == 0 { gmi(&samples, &spec, cfg.seed)? } else { conditional_gmi(&samples, &spec, cfg.seed)? };
            let text = format!("estimate {}\nfr_count {}\nsubset_size {}\n", score.value, score.raw_fr_count, score.subset_size);
            pipeline::write_artifact(out, "estimate.txt", &text)?;
            print!("{text}");
        }
        Command::Characterize { model, baseline } => {
            let (_, test) = pipeline::load_datasets(&cfg)?;
            let mut runs = vec![("model", load_model(&model)?)];
            if let Some(b) = baseline {
                runs.push(("baseline", load_model(&b)?));
            }
            for (tag, m) in &runs {
                let c = pipeline::characterize(&cfg, m, &test)?;
                pipeline::write_artifact(out, &format!("{tag}_calibration.tsv"), c.calibration_tsv())?;
                pipeline::write_artifact(out, &format!("{tag}_attack.tsv"), c.attack_tsv())?;
                println!("{tag}: accuracy {:.4}, ECE {:.4}", c.accuracy, c.calibration.ece);
                for (u, l) in c.untargeted.iter().zip(&c.least_likely) {
                    println!("  eps {}: untargeted {:.4}, least-likely {:.4}", u.epsilon, u.accuracy, l.accuracy);
                }
            }
            println!("attack steps {}, step size {}", cfg.attack_steps, cfg.attack_step_size.map_or("eps/steps".to_string(), |s| s.to_string()));
        }
        Command::Sweep { model } => {
            let (train_set, test) = pipeline::load_datasets(&cfg)?;
            let baseline = match model {
                Some(p) => load_model(&p)?,
                None => pipeline::train_baseline(&cfg, &train_set)?.0,
            };
            let rows = pipeline::sweep(&cfg, &train_set, &test, &baseline)?;
            pipeline::write_artifact(out, "sweep.tsv", pipeline::sweep_tsv(&cfg, &rows))?;
            let summary = pipeline::sweep_summary(&cfg, &rows);
            pipeline::write_artifact(out, "sweep_summary.tsv", &summary)?;
            print!("{summary}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

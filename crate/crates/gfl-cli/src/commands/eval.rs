//! `gfl eval`: score a checkpoint on datasets, or train the pooled
//! single-site model that federated runs are compared against.

use std::path::{Path, PathBuf};

use gfl_core::data::{load_csv, FeatureSchema, ScaledDataset};
use gfl_core::GruClassifier;
use gfl_runtime::{evaluate, local_train};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::artifacts::{self, MetricsRow, RunDirs};
use crate::config::RunConfig;
use crate::error::{classify_run, CliError, Result, Stage};

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Checkpoint to score.
    #[arg(long, required_unless_present = "pooled_from", conflicts_with = "pooled_from")]
    pub model: Option<PathBuf>,
    /// Dataset CSVs to score on; each gets a report row named after its
    /// file stem.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    /// Partition directory (shard_<k>.csv plus test.csv): train one model
    /// on all shards pooled together and score it on the test set.
    #[arg(long)]
    pub pooled_from: Option<PathBuf>,
    /// Total epochs for the pooled model; defaults to rounds × local-epochs
    /// so it spends the same optimization effort as a federated run.
    #[arg(long)]
    pub epochs: Option<u32>,
}

pub fn run(config: RunConfig, args: &EvalArgs, dirs: &RunDirs) -> Result<()> {
    if let Some(dir) = &args.pooled_from {
        pooled(&config, dir, args.epochs, dirs)
    } else {
        score(args, dirs)
    }
}

fn score(args: &EvalArgs, dirs: &RunDirs) -> Result<()> {
    let model_path = args.model.as_ref().expect("clap requires --model here");
    if args.data.is_empty() {
        return Err(CliError::validation("give at least one --data file to score"));
    }
    let weights = artifacts::read_checkpoint(model_path)?;
    let hidden = artifacts::hidden_size_of(&weights)?;

    let schema = FeatureSchema::heart();
    let mut rows = Vec::new();
    let mut confusions = Vec::new();
    for path in &args.data {
        let dataset =
            load_csv(path, &schema).validation(&format!("loading {}", path.display()))?;
        let scaled = super::scale(&dataset)?;
        let input = scaled
            .rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| CliError::validation(format!("{} has no rows", path.display())))?;
        let model = GruClassifier::from_weights(input, hidden, weights.clone())
            .validation("matching the checkpoint to the data")?;
        let eval = evaluate(&model, &scaled).map_err(|e| classify_run(e, "evaluating"))?;
        let label = dataset_label(path);
        println!(
            "{label}: accuracy {:.4}, mean loss {:.4}",
            eval.metrics.accuracy, eval.mean_loss
        );
        rows.push(MetricsRow {
            label: label.clone(),
            metrics: eval.metrics,
            mean_loss: Some(eval.mean_loss),
        });
        confusions.push((label, eval.confusion));
    }
    write_reports(dirs, &rows, &confusions)
}

/// Train one model on every shard pooled together — the single-site
/// yardstick a federated run is measured against. Scaling is bound to the
/// schema, so pooling scaled shards equals scaling the pooled table.
fn pooled(config: &RunConfig, dir: &Path, epochs: Option<u32>, dirs: &RunDirs) -> Result<()> {
    let schema = FeatureSchema::heart();
    let test_path = dir.join("test.csv");
    let test = load_csv(&test_path, &schema)
        .validation(&format!("loading {}", test_path.display()))?;

    let mut train = ScaledDataset { rows: Vec::new(), labels: Vec::new() };
    let mut k = 0;
    loop {
        let path = dir.join(format!("shard_{k}.csv"));
        if !path.exists() {
            break;
        }
        let shard =
            load_csv(&path, &schema).validation(&format!("loading {}", path.display()))?;
        let scaled = super::scale(&shard)?;
        train.rows.extend(scaled.rows);
        train.labels.extend(scaled.labels);
        k += 1;
    }
    if train.rows.is_empty() {
        return Err(CliError::validation(format!(
            "{} holds no shard_<k>.csv files with rows",
            dir.display()
        )));
    }

    let input = train.rows[0].len();
    let epochs = epochs.unwrap_or(config.rounds * config.local_epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(config.stage_seed("baseline-init"));
    let model = GruClassifier::init(input, config.hidden_size, &mut rng)
        .runtime("building the pooled model")?;
    let outcome = local_train(
        model,
        &train,
        epochs,
        config.batch_size,
        config.learning_rate,
        config.stage_seed("baseline-train"),
    )
    .map_err(|e| classify_run(e, "training the pooled model"))?;

    let checkpoint = dirs.checkpoints.join("pooled.gflw");
    artifacts::write_checkpoint(&checkpoint, outcome.model.weights())?;

    let scaled_test = super::scale(&test)?;
    let eval =
        evaluate(&outcome.model, &scaled_test).map_err(|e| classify_run(e, "evaluating"))?;
    println!(
        "pooled model: {} rows, {epochs} epochs, test accuracy {:.4}",
        train.rows.len(),
        eval.metrics.accuracy
    );
    println!("wrote {}", checkpoint.display());

    let rows = vec![MetricsRow {
        label: "pooled".into(),
        metrics: eval.metrics,
        mean_loss: Some(eval.mean_loss),
    }];
    let confusions = vec![("pooled".to_string(), eval.confusion)];
    write_reports(dirs, &rows, &confusions)
}

fn write_reports(
    dirs: &RunDirs,
    rows: &[MetricsRow],
    confusions: &[(String, gfl_core::metrics::ConfusionMatrix)],
) -> Result<()> {
    artifacts::write_metrics(&dirs.reports.join("eval_metrics.csv"), rows)?;
    artifacts::write_confusions(&dirs.reports.join("eval_confusion.csv"), confusions)
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

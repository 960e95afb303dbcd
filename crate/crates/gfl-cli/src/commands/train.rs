//! `gfl cfl` / `gfl dfl`: run a full federated training session and write
//! checkpoints, logs, metric bundles, and the energy report.

use std::path::{Path, PathBuf};

use gfl_core::data::{load_csv, save_csv, FeatureSchema, ScaledDataset, TabularDataset};
use gfl_core::GruClassifier;
use gfl_runtime::{
    energy_cfl, energy_dfl, evaluate, predict_complexity, run_cfl, run_dfl, CostModel, FlConfig,
    Protocol, RunOutcome,
};
use gfl_transport::{SimNet, TcpMesh, Transport};

use crate::artifacts::{self, MetricsRow, RunDirs};
use crate::config::{Backend, RunConfig, TopologyKind};
use crate::error::{classify_run, CliError, Result, Stage};

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Directory with shard_<k>.csv and test.csv from `gfl partition`.
    #[arg(long, conflicts_with = "input")]
    pub shards: Option<PathBuf>,
    /// Corpus CSV to split inline; defaults to the built-in surrogate.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Clients in the cohort.
    #[arg(long)]
    pub clients: Option<u32>,
    /// Global training rounds.
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Local epochs per round.
    #[arg(long)]
    pub local_epochs: Option<u32>,
    /// Rows per local mini-batch.
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// GRU hidden width.
    #[arg(long)]
    pub hidden_size: Option<usize>,
    /// Fraction of clients drawn each round.
    #[arg(long)]
    pub participation: Option<f64>,
    /// Mesh shape for decentralized runs.
    #[arg(long, value_enum)]
    pub topology: Option<TopologyKind>,
    /// Merge the node's own update along with its neighbors' (decentralized).
    #[arg(long)]
    pub self_inclusive: bool,
    /// Weight the average by shard row counts.
    #[arg(long)]
    pub size_weighted: bool,
    /// Score each round's global on the shared test set (centralized).
    #[arg(long)]
    pub track_holdout: bool,
}

fn apply(config: &mut RunConfig, args: &TrainArgs) {
    if let Some(v) = args.clients {
        config.clients = v;
    }
    if let Some(v) = args.rounds {
        config.rounds = v;
    }
    if let Some(v) = args.local_epochs {
        config.local_epochs = v;
    }
    if let Some(v) = args.batch_size {
        config.batch_size = v;
    }
    if let Some(v) = args.learning_rate {
        config.learning_rate = v;
    }
    if let Some(v) = args.hidden_size {
        config.hidden_size = v;
    }
    if let Some(v) = args.participation {
        config.participation = v;
    }
    if let Some(v) = args.topology {
        config.topology = v;
    }
    config.self_inclusive |= args.self_inclusive;
    config.size_weighted |= args.size_weighted;
}

pub fn run(
    mut config: RunConfig,
    args: &TrainArgs,
    dirs: &RunDirs,
    protocol: Protocol,
) -> Result<()> {
    apply(&mut config, args);
    let fl = config.fl_config();
    fl.validate().validation("checking the training configuration")?;

    let (shards, test) = resolve_datasets(&config, args, dirs)?;
    let scaled_shards: Vec<ScaledDataset> =
        shards.iter().map(super::scale).collect::<Result<_>>()?;
    let scaled_test = super::scale(&test)?;

    let stage = match protocol {
        Protocol::Centralized => "running centralized training",
        Protocol::Decentralized => "running decentralized training",
    };
    let outcome = match config.backend {
        Backend::Sim => {
            let net = SimNet::new(fl.clients + 1, config.sim_config());
            let endpoints = (0..=fl.clients)
                .map(|i| net.endpoint(i))
                .collect::<gfl_transport::WireResult<Vec<_>>>()
                .runtime("setting up the simulated network")?;
            execute(protocol, &fl, &scaled_shards, &scaled_test, args, endpoints)
                .map_err(|e| classify_run(e, stage))?
        }
        Backend::Tcp => {
            let endpoints = TcpMesh::establish_local(fl.clients + 1)
                .runtime("establishing the TCP mesh")?;
            execute(protocol, &fl, &scaled_shards, &scaled_test, args, endpoints)
                .map_err(|e| classify_run(e, stage))?
        }
    };

    write_artifacts(&config, &fl, &outcome, &scaled_shards, &scaled_test, dirs)
}

fn execute<T: Transport + 'static>(
    protocol: Protocol,
    fl: &FlConfig,
    shards: &[ScaledDataset],
    test: &ScaledDataset,
    args: &TrainArgs,
    endpoints: Vec<T>,
) -> gfl_runtime::Result<RunOutcome> {
    match protocol {
        Protocol::Centralized => {
            let holdout = args.track_holdout.then_some(test);
            run_cfl(fl, shards, holdout, Some(test), endpoints)
        }
        Protocol::Decentralized => run_dfl(fl, shards, Some(test), endpoints),
    }
}

/// Either load previously written shards or split the corpus right here.
/// Inline splits are also written out, so every run names its exact data.
fn resolve_datasets(
    config: &RunConfig,
    args: &TrainArgs,
    dirs: &RunDirs,
) -> Result<(Vec<TabularDataset>, TabularDataset)> {
    let schema = FeatureSchema::heart();
    if let Some(dir) = &args.shards {
        let test = load_shard_file(&dir.join("test.csv"), &schema)?;
        let shards = (0..config.clients)
            .map(|k| load_shard_file(&dir.join(format!("shard_{k}.csv")), &schema))
            .collect::<Result<Vec<_>>>()?;
        return Ok((shards, test));
    }
    let corpus = super::load_corpus(config, args.input.as_deref())?;
    let pieces = super::partition::split(config, &corpus)?;
    save_csv(&pieces.test, &dirs.data.join("test.csv")).runtime("writing the test set")?;
    for (k, shard) in pieces.shards.iter().enumerate() {
        save_csv(shard, &dirs.data.join(format!("shard_{k}.csv")))
            .runtime("writing a shard")?;
    }
    Ok((pieces.shards, pieces.test))
}

fn load_shard_file(path: &Path, schema: &FeatureSchema) -> Result<TabularDataset> {
    let dataset =
        load_csv(path, schema).validation(&format!("loading {}", path.display()))?;
    if dataset.is_empty() {
        return Err(CliError::validation(format!("{} is empty", path.display())));
    }
    Ok(dataset)
}

fn write_artifacts(
    config: &RunConfig,
    fl: &FlConfig,
    outcome: &RunOutcome,
    shards: &[ScaledDataset],
    test: &ScaledDataset,
    dirs: &RunDirs,
) -> Result<()> {
    let global_path = dirs.checkpoints.join("global.gflw");
    artifacts::write_checkpoint(&global_path, &outcome.global.weights)?;
    for personalized in &outcome.personalized {
        let path = dirs
            .checkpoints
            .join(format!("client_{}.gflw", personalized.node));
        artifacts::write_checkpoint(&path, &personalized.weights)?;
    }

    artifacts::write_round_log(&dirs.logs.join("rounds.csv"), outcome)?;
    artifacts::write_loss_curve(&dirs.logs.join("loss_curve.csv"), outcome)?;
    artifacts::write_ledger(&dirs.logs.join("ledger.csv"), &outcome.ledger)?;

    let mut metric_rows = Vec::new();
    let mut confusions = Vec::new();
    let global_eval = outcome
        .test_eval
        .as_ref()
        .ok_or_else(|| CliError::validation("run produced no test evaluation"))?;
    metric_rows.push(MetricsRow {
        label: "global".into(),
        metrics: global_eval.metrics,
        mean_loss: Some(global_eval.mean_loss),
    });
    confusions.push(("global".into(), global_eval.confusion));

    let mut accuracy_sum = 0.0;
    for personalized in &outcome.personalized {
        let model = GruClassifier::from_weights(
            outcome.input_size,
            outcome.hidden_size,
            personalized.weights.clone(),
        )
        .runtime("rebuilding a personalized model")?;
        let eval = evaluate(&model, test).map_err(|e| classify_run(e, "evaluating"))?;
        accuracy_sum += eval.metrics.accuracy;
        metric_rows.push(MetricsRow {
            label: format!("client_{}", personalized.node),
            metrics: eval.metrics,
            mean_loss: Some(eval.mean_loss),
        });
        confusions.push((format!("client_{}", personalized.node), eval.confusion));
    }
    let mean_personalized = accuracy_sum / outcome.personalized.len() as f64;
    artifacts::write_metrics(&dirs.reports.join("metrics.csv"), &metric_rows)?;
    artifacts::write_confusions(&dirs.reports.join("confusion.csv"), &confusions)?;

    let rates = config.power_rates()?;
    let energy = match outcome.protocol {
        Protocol::Centralized => energy_cfl(&outcome.ledger, &rates),
        Protocol::Decentralized => energy_dfl(&outcome.ledger, &rates),
    }
    .runtime("computing the energy report")?;
    let t_fl = outcome.ledger.total_fl_secs();
    artifacts::write_energy(&dirs.reports.join("energy.csv"), &energy, &rates, t_fl)?;

    let params = GruClassifier::param_count(outcome.input_size, outcome.hidden_size) as u64;
    let cost_model = CostModel {
        protocol: outcome.protocol,
        params,
        rounds: u64::from(fl.rounds),
        local_epochs: u64::from(fl.local_epochs),
        batch_size: fl.batch_size as u64,
        shard_rows: shards.iter().map(|s| s.len() as u64).collect(),
        neighbor_counts: (0..fl.clients)
            .map(|k| fl.topology.neighbors(k, fl.clients).len() as u64)
            .collect(),
        gan_epochs: 0,
        gan_rows: 0,
        gan_batch: 0,
        gan_params: 0,
    };
    let predicted = predict_complexity(&cost_model)
        .map_err(|e| classify_run(e, "predicting complexity"))?;
    artifacts::write_counters(&dirs.reports.join("counters.csv"), &outcome.counters, &predicted)?;

    println!(
        "{} run: {} clients, {} rounds, {} local epochs",
        match outcome.protocol {
            Protocol::Centralized => "centralized",
            Protocol::Decentralized => "decentralized",
        },
        fl.clients,
        fl.rounds,
        fl.local_epochs
    );
    println!("global test accuracy: {:.4}", global_eval.metrics.accuracy);
    println!("mean personalized test accuracy: {mean_personalized:.4}");
    println!(
        "t_fl: {t_fl:.3} s, energy: {:.3} J (edge {:.3} J, cloud {:.3} J)",
        energy.total_joules, energy.edge_joules, energy.cloud_joules
    );
    println!("wrote {}", dirs.root.display());
    Ok(())
}

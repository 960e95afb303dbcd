//! `gfl partition`: hold out a shared test set, split the rest across
//! clients, and write every piece as its own CSV.

use std::path::PathBuf;

use gfl_core::data::{holdout_split, partition, save_csv, PartitionPlan};

use crate::artifacts::RunDirs;
use crate::config::{RunConfig, StrategyKind};
use crate::error::{CliError, Result, Stage};

#[derive(Debug, clap::Args)]
pub struct PartitionArgs {
    /// Corpus CSV to split; defaults to the built-in surrogate.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Client shards to produce.
    #[arg(long)]
    pub clients: Option<u32>,
    /// Row assignment strategy.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyKind>,
    /// Dirichlet concentration for the skewed strategies.
    #[arg(long)]
    pub concentration: Option<f64>,
    /// Rows held out as the shared test set.
    #[arg(long)]
    pub test_rows: Option<usize>,
}

pub fn apply(config: &mut RunConfig, args: &PartitionArgs) {
    if let Some(clients) = args.clients {
        config.clients = clients;
    }
    if let Some(strategy) = args.strategy {
        config.strategy = strategy;
    }
    if let Some(concentration) = args.concentration {
        config.concentration = concentration;
    }
    if let Some(test_rows) = args.test_rows {
        config.test_rows = test_rows;
    }
}

pub fn run(mut config: RunConfig, args: &PartitionArgs, dirs: &RunDirs) -> Result<()> {
    apply(&mut config, args);
    let corpus = super::load_corpus(&config, args.input.as_deref())?;
    let pieces = split(&config, &corpus)?;

    let test_path = dirs.data.join("test.csv");
    save_csv(&pieces.test, &test_path).runtime("writing the test set")?;
    println!(
        "test.csv: {} rows ({} positive)",
        pieces.test.len(),
        pieces.test.class_counts().1
    );
    for (k, shard) in pieces.shards.iter().enumerate() {
        let path = dirs.data.join(format!("shard_{k}.csv"));
        save_csv(shard, &path).runtime("writing a shard")?;
        println!(
            "shard_{k}.csv: {} rows ({} positive)",
            shard.len(),
            shard.class_counts().1
        );
    }
    println!("wrote {}", dirs.data.display());
    Ok(())
}

pub struct SplitCorpus {
    pub test: gfl_core::data::TabularDataset,
    pub shards: Vec<gfl_core::data::TabularDataset>,
}

/// The shared splitting recipe: the holdout draw and the client assignment
/// both derive from the partition stage seed, so `partition` followed by
/// `cfl --shards` equals `cfl` with inline splitting.
pub fn split(config: &RunConfig, corpus: &gfl_core::data::TabularDataset) -> Result<SplitCorpus> {
    let stage_seed = config.stage_seed("partition");
    let (test, train) =
        holdout_split(corpus, config.test_rows, stage_seed).validation("holding out the test set")?;
    let plan = PartitionPlan::new(config.clients as usize, config.split_strategy(), stage_seed)
        .validation("checking the partition plan")?;
    let shards = partition(&train, &plan).validation("partitioning the corpus")?;
    for (k, shard) in shards.iter().enumerate() {
        if shard.is_empty() {
            return Err(CliError::validation(format!(
                "shard {k} came out empty; use more rows or a milder skew"
            )));
        }
    }
    Ok(SplitCorpus { test, shards })
}

//! One module per subcommand, plus the data-loading helpers they share.

pub mod eval;
pub mod partition;
pub mod report;
pub mod respond;
pub mod synth;
pub mod train;

use std::path::Path;

use gfl_core::data::{
    load_csv, preprocess, synthesize_heart_corpus, FeatureSchema, ScaledDataset, TabularDataset,
};

use crate::config::RunConfig;
use crate::error::{Result, Stage};

/// Load the working corpus: an explicit CSV if one was named (flag wins
/// over config), otherwise the built-in surrogate corpus.
pub fn load_corpus(config: &RunConfig, flag_path: Option<&Path>) -> Result<TabularDataset> {
    let schema = FeatureSchema::heart();
    match flag_path.or(config.real_csv.as_deref()) {
        Some(path) => {
            load_csv(path, &schema).validation(&format!("loading corpus {}", path.display()))
        }
        None => synthesize_heart_corpus(config.surrogate_rows, config.stage_seed("surrogate"))
            .validation("synthesizing the surrogate corpus"),
    }
}

/// Schema-driven scaling into the unit interval the classifier trains on.
pub fn scale(dataset: &TabularDataset) -> Result<ScaledDataset> {
    Ok(preprocess(dataset).validation("scaling dataset")?.0)
}

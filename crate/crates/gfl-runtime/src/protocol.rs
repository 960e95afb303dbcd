//! Pieces shared by both protocol runners: input validation, endpoint
//! ordering, and the run outcome types.

use gfl_core::data::ScaledDataset;
use gfl_core::ModelWeights;
use gfl_transport::{NodeId, Transport};

use crate::accounting::{ComplexityCounters, Protocol, TimeLedger};
use crate::config::FlConfig;
use crate::error::{Result, RuntimeError};
use crate::eval::EvalOutcome;
use crate::logs::RoundLog;

/// Aggregated weights with the round that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalModel {
    pub weights: ModelWeights,
    /// The round whose aggregation produced these weights.
    pub round: u32,
}

/// One node's locally trained weights, kept alongside the global model.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonalizedModel {
    pub node: NodeId,
    /// The node's post-training weights from its last trained round,
    /// before any aggregation touched them. A node that never trained
    /// keeps the initial model.
    pub weights: ModelWeights,
    /// The round those weights came out of; 0 means "never trained".
    pub last_round: u32,
}

/// Everything a finished run hands back.
#[derive(Debug)]
pub struct RunOutcome {
    pub protocol: Protocol,
    /// Feature width the models consume.
    pub input_size: usize,
    /// Hidden width of the classifier.
    pub hidden_size: usize,
    /// The final global model.
    pub global: GlobalModel,
    /// The global weights after every round; index `r-1` holds round `r`.
    pub globals_per_round: Vec<ModelWeights>,
    /// Per-node personalized models, ascending by node id.
    pub personalized: Vec<PersonalizedModel>,
    /// Per-round records, ascending by round.
    pub round_logs: Vec<RoundLog>,
    /// Raw timing of the whole run.
    pub ledger: TimeLedger,
    /// Abstract work performed.
    pub counters: ComplexityCounters,
    /// Final-model score on the shared test set, when the run was given
    /// one.
    pub test_eval: Option<EvalOutcome>,
}

/// Check the cohort inputs and return the feature width shared by every
/// shard.
pub(crate) fn validate_run_inputs(cfg: &FlConfig, shards: &[ScaledDataset]) -> Result<usize> {
    cfg.validate()?;
    if shards.len() != cfg.clients as usize {
        return Err(RuntimeError::Setup(format!(
            "{} shards for {} clients",
            shards.len(),
            cfg.clients
        )));
    }
    let width = shards
        .first()
        .and_then(|s| s.rows.first())
        .map(Vec::len)
        .ok_or_else(|| RuntimeError::Setup("shard 0 is empty".into()))?;
    if width == 0 {
        return Err(RuntimeError::Setup("rows must have at least one feature".into()));
    }
    for (k, shard) in shards.iter().enumerate() {
        if shard.is_empty() {
            return Err(RuntimeError::Setup(format!("shard {k} is empty")));
        }
        if shard.rows.len() != shard.labels.len() {
            return Err(RuntimeError::Setup(format!(
                "shard {k} has {} rows but {} labels",
                shard.rows.len(),
                shard.labels.len()
            )));
        }
        if let Some(row) = shard.rows.iter().find(|r| r.len() != width) {
            return Err(RuntimeError::Setup(format!(
                "shard {k} mixes row widths: found {} against {width}",
                row.len()
            )));
        }
        if shard.labels.iter().any(|&l| l > 1) {
            return Err(RuntimeError::Setup(format!("shard {k} has a non-binary label")));
        }
    }
    Ok(width)
}

/// Check that `endpoints` covers node ids `0..count` exactly, and return
/// them sorted by id.
pub(crate) fn order_endpoints<T: Transport>(endpoints: Vec<T>, count: u32) -> Result<Vec<T>> {
    if endpoints.len() != count as usize {
        return Err(RuntimeError::Setup(format!(
            "{} endpoints for a deployment of {count} nodes",
            endpoints.len()
        )));
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    for endpoint in endpoints {
        let id = endpoint.node_id();
        if id >= count {
            return Err(RuntimeError::Setup(format!(
                "endpoint id {id} outside the deployment's 0..{count}"
            )));
        }
        if slots[id as usize].replace(endpoint).is_some() {
            return Err(RuntimeError::Setup(format!("two endpoints claim node id {id}")));
        }
    }
    Ok(slots.into_iter().map(|s| s.expect("all slots filled")).collect())
}

pub(crate) fn ns_to_secs(ns: u64) -> f64 {
    ns as f64 / 1e9
}

#[cfg(test)]
mod tests {
    use gfl_transport::{SimNet, SimNetConfig};

    use super::*;

    fn shard(rows: usize, width: usize) -> ScaledDataset {
        ScaledDataset {
            rows: vec![vec![0.5; width]; rows],
            labels: vec![0; rows],
        }
    }

    #[test]
    fn input_validation_returns_the_shared_width() {
        let cfg = FlConfig { clients: 2, ..FlConfig::default() };
        let shards = vec![shard(3, 7), shard(2, 7)];
        assert_eq!(validate_run_inputs(&cfg, &shards).unwrap(), 7);
    }

    #[test]
    fn input_validation_catches_shape_problems() {
        let cfg = FlConfig { clients: 2, ..FlConfig::default() };
        assert!(validate_run_inputs(&cfg, &[shard(3, 7)]).is_err(), "shard count");
        assert!(
            validate_run_inputs(&cfg, &[shard(3, 7), shard(0, 7)]).is_err(),
            "empty shard"
        );
        assert!(
            validate_run_inputs(&cfg, &[shard(3, 7), shard(3, 6)]).is_err(),
            "width mismatch"
        );
        let mut bad_label = shard(2, 7);
        bad_label.labels[1] = 2;
        assert!(
            validate_run_inputs(&cfg, &[shard(3, 7), bad_label]).is_err(),
            "non-binary label"
        );
    }

    #[test]
    fn endpoints_are_counted_and_sorted_by_id() {
        let net = SimNet::new(3, SimNetConfig::default());
        let eps = vec![
            net.endpoint(2).unwrap(),
            net.endpoint(0).unwrap(),
            net.endpoint(1).unwrap(),
        ];
        let ordered = order_endpoints(eps, 3).unwrap();
        let ids: Vec<u32> = ordered.iter().map(Transport::node_id).collect();
        assert_eq!(ids, vec![0, 1, 2]);

        let too_few = vec![net.endpoint(0).unwrap()];
        assert!(order_endpoints(too_few, 3).is_err());

        let duplicate = vec![net.endpoint(1).unwrap(), net.endpoint(1).unwrap()];
        assert!(order_endpoints(duplicate, 2).is_err());
    }
}

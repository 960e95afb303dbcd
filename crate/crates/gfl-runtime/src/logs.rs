//! Per-round run records: who trained, how the loss moved, where the time
//! went, and a fingerprint of the resulting global weights.

use gfl_transport::NodeId;

/// One node's slice of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRoundStat {
    pub node: NodeId,
    /// Rows in this node's shard.
    pub rows: usize,
    /// Mini-batches per local epoch.
    pub batches_per_epoch: u64,
    /// Row-weighted mean training loss per local epoch.
    pub epoch_losses: Vec<f64>,
    /// Seconds spent training locally.
    pub t_loc_secs: f64,
    /// Seconds spent receiving model payloads.
    pub t_exc_secs: f64,
    /// Seconds spent averaging neighbor models. Zero in centralized runs,
    /// where aggregation happens on the server.
    pub t_agg_secs: f64,
}

impl NodeRoundStat {
    /// Training loss after the last local epoch, if any epochs ran.
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }
}

/// Everything recorded about one global round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    /// 1-based round number.
    pub round: u32,
    /// Nodes drawn into this round, ascending.
    pub participants: Vec<NodeId>,
    /// Per-participant records, ascending by node id.
    pub node_stats: Vec<NodeRoundStat>,
    /// Total aggregation seconds this round: the server's in centralized
    /// runs, the sum over nodes in decentralized runs.
    pub t_agg_secs: f64,
    /// Fingerprint of the post-aggregation global weights on the wire.
    pub global_hash: u64,
    /// Accuracy of the post-aggregation global on the held-out set, when
    /// the run was given one.
    pub holdout_accuracy: Option<f64>,
}

/// Global training-loss series: for each round, the mean final-epoch loss
/// across that round's participants. `None` for a round in which no
/// participant ran any epochs.
pub fn loss_curve(logs: &[RoundLog]) -> Vec<Option<f64>> {
    logs.iter()
        .map(|log| {
            let finals: Vec<f64> = log
                .node_stats
                .iter()
                .filter_map(NodeRoundStat::final_loss)
                .collect();
            if finals.is_empty() {
                None
            } else {
                Some(finals.iter().sum::<f64>() / finals.len() as f64)
            }
        })
        .collect()
}

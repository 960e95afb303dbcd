//! Decentralized federated training: after a one-time initialization from
//! the server, nodes train locally and exchange weights directly with
//! their mesh neighbors each round. Nobody holds a global model; the
//! cohort-wide mean is computed afterwards for reporting.

use std::collections::BTreeMap;
use std::thread;
use std::time::{Duration, Instant};

use gfl_core::data::ScaledDataset;
use gfl_core::{GruClassifier, ModelWeights};
use gfl_transport::{
    quantize_to_wire, weights_hash, MessageKind, NodeClass, NodeId, Transport, TransportError,
    WireMessage,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::accounting::{ComplexityCounters, LedgerEntry, LedgerRole, Protocol, TimeLedger};
use crate::config::FlConfig;
use crate::error::{Result, RuntimeError};
use crate::eval::evaluate;
use crate::fedavg::fedavg;
use crate::logs::{NodeRoundStat, RoundLog};
use crate::protocol::{
    ns_to_secs, order_endpoints, validate_run_inputs, GlobalModel, PersonalizedModel, RunOutcome,
};
use crate::train::local_train;

/// One node's record of one round.
struct NodeRoundReport {
    round: u32,
    batches_per_epoch: u64,
    epoch_losses: Vec<f64>,
    t_loc_ns: u64,
    t_exc_ns: u64,
    t_agg_ns: u64,
    local_ops: u64,
    aggregate_ops: u64,
    sent_units: u64,
    /// The node's weights after merging this round's neighborhood.
    post_state: ModelWeights,
}

/// What a node thread hands back once all rounds are done.
struct NodeResult {
    node: NodeId,
    init_ns: u64,
    rows: usize,
    personalized: ModelWeights,
    reports: Vec<NodeRoundReport>,
}

/// Run the full decentralized protocol.
///
/// `endpoints` must cover node ids `0..=K`; id `K` acts as the
/// initializer that seeds every node with the same starting weights and
/// then leaves the conversation. When `test_set` is given, the final
/// cohort mean is evaluated on it.
pub fn run_dfl<T: Transport + 'static>(
    cfg: &FlConfig,
    shards: &[ScaledDataset],
    test_set: Option<&ScaledDataset>,
    endpoints: Vec<T>,
) -> Result<RunOutcome> {
    let input_size = validate_run_inputs(cfg, shards)?;
    let hidden_size = cfg.hidden_size;
    let mut endpoints = order_endpoints(endpoints, cfg.clients + 1)?;

    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.model_init_seed());
    let init_model = GruClassifier::init(input_size, hidden_size, &mut init_rng)?;
    let init_weights = init_model.into_weights();

    let server_endpoint = endpoints.pop().expect("initializer endpoint present");
    let clients = cfg.clients;
    let timeout = Duration::from_secs(cfg.round_timeout_secs);
    let server_handle = thread::spawn(move || {
        initializer_loop(server_endpoint, clients, timeout, init_weights)
    });

    let mut node_handles = Vec::new();
    for (endpoint, shard) in endpoints.into_iter().zip(shards.iter().cloned()) {
        let cfg = cfg.clone();
        node_handles.push(thread::spawn(move || {
            node_loop(endpoint, cfg, shard, input_size, hidden_size)
        }));
    }

    let mut node_results = Vec::new();
    for (node, handle) in node_handles.into_iter().enumerate() {
        let joined = handle
            .join()
            .map_err(|_| RuntimeError::WorkerPanicked { node: node as u32 })?;
        node_results.push(joined);
    }
    let server_result = server_handle
        .join()
        .map_err(|_| RuntimeError::WorkerPanicked { node: cfg.clients })?;

    let mut nodes = Vec::with_capacity(node_results.len());
    let mut node_error = None;
    for result in node_results {
        match result {
            Ok(r) => nodes.push(r),
            Err(e) => node_error = Some(node_error.unwrap_or(e)),
        }
    }
    if let Some(err) = node_error {
        return Err(err);
    }
    server_result?;

    assemble_outcome(cfg, input_size, hidden_size, nodes, test_set)
}

fn assemble_outcome(
    cfg: &FlConfig,
    input_size: usize,
    hidden_size: usize,
    mut nodes: Vec<NodeResult>,
    test_set: Option<&ScaledDataset>,
) -> Result<RunOutcome> {
    nodes.sort_by_key(|n| n.node);

    let mut ledger = TimeLedger::new();
    let mut counters = ComplexityCounters::new();
    for node in &nodes {
        ledger.add_init_secs(ns_to_secs(node.init_ns))?;
    }

    let mut round_logs = Vec::with_capacity(cfg.rounds as usize);
    let mut globals_per_round = Vec::with_capacity(cfg.rounds as usize);
    for round in 1..=cfg.rounds {
        let mut node_stats = Vec::new();
        let mut states = Vec::new();
        let mut round_t_agg_ns = 0;
        for node in &nodes {
            let report = node
                .reports
                .iter()
                .find(|r| r.round == round)
                .ok_or_else(|| RuntimeError::Accounting(format!(
                    "node {} has no record of round {round}",
                    node.node
                )))?;
            node_stats.push(NodeRoundStat {
                node: node.node,
                rows: node.rows,
                batches_per_epoch: report.batches_per_epoch,
                epoch_losses: report.epoch_losses.clone(),
                t_loc_secs: ns_to_secs(report.t_loc_ns),
                t_exc_secs: ns_to_secs(report.t_exc_ns),
                t_agg_secs: ns_to_secs(report.t_agg_ns),
            });
            ledger.record(LedgerEntry {
                node: node.node,
                round,
                role: LedgerRole::Edge,
                t_loc_secs: ns_to_secs(report.t_loc_ns),
                t_exc_secs: ns_to_secs(report.t_exc_ns),
                t_agg_secs: ns_to_secs(report.t_agg_ns),
            })?;
            round_t_agg_ns += report.t_agg_ns;
            counters.local_train_ops += report.local_ops;
            counters.transmit_units += report.sent_units;
            counters.aggregate_ops += report.aggregate_ops;
            states.push(report.post_state.clone());
        }
        // The cohort mean is a reporting artifact, not a model anyone
        // holds, so it stays in full precision.
        let cohort_mean = fedavg(&states)?;
        round_logs.push(RoundLog {
            round,
            participants: (0..cfg.clients).collect(),
            node_stats,
            t_agg_secs: ns_to_secs(round_t_agg_ns),
            global_hash: weights_hash(&cohort_mean)?,
            holdout_accuracy: None,
        });
        globals_per_round.push(cohort_mean);
    }

    let final_mean = globals_per_round.last().expect("at least one round").clone();
    let global = GlobalModel {
        weights: final_mean,
        round: cfg.rounds,
    };
    let test_eval = match test_set {
        Some(data) => {
            let model =
                GruClassifier::from_weights(input_size, hidden_size, global.weights.clone())?;
            Some(evaluate(&model, data)?)
        }
        None => None,
    };

    let personalized = nodes
        .into_iter()
        .map(|n| PersonalizedModel {
            node: n.node,
            weights: n.personalized,
            last_round: cfg.rounds,
        })
        .collect();

    Ok(RunOutcome {
        protocol: Protocol::Decentralized,
        input_size,
        hidden_size,
        global,
        globals_per_round,
        personalized,
        round_logs,
        ledger,
        counters,
        test_eval,
    })
}

/// Seed every node with the same starting weights, then step aside.
fn initializer_loop<T: Transport>(
    mut endpoint: T,
    clients: u32,
    timeout: Duration,
    init_weights: ModelWeights,
) -> Result<()> {
    let mut seen = vec![false; clients as usize];
    for _ in 0..clients {
        let (message, _) = endpoint.recv_timeout(timeout).map_err(|e| match e {
            TransportError::Timeout { .. } => RuntimeError::Setup(format!(
                "not all {clients} nodes checked in: {e}"
            )),
            other => RuntimeError::Transport(other),
        })?;
        let sender = message.sender();
        if message.kind() != MessageKind::Hello || sender >= clients || seen[sender as usize] {
            return Err(RuntimeError::Setup(format!(
                "bad or duplicate check-in: {:?} from node {sender}",
                message.kind()
            )));
        }
        seen[sender as usize] = true;
    }
    let init_message =
        WireMessage::model(MessageKind::InitModel, 0, endpoint.node_id(), &init_weights)?;
    for k in 0..clients {
        endpoint.send(k, init_message.clone())?;
    }
    Ok(())
}

fn node_loop<T: Transport>(
    mut endpoint: T,
    cfg: FlConfig,
    shard: ScaledDataset,
    input_size: usize,
    hidden_size: usize,
) -> Result<NodeResult> {
    let node = endpoint.node_id();
    let server = cfg.server_id();
    let neighbors = cfg.topology.neighbors(node, cfg.clients);
    let timeout = Duration::from_secs(cfg.round_timeout_secs);

    endpoint.send(server, WireMessage::control(MessageKind::Hello, 0, node)?)?;

    // Receive charges are attributed to the round stamped on the message,
    // not the round the node happens to be in, so a fast neighbor's
    // early delivery lands in the right row.
    let mut t_exc_by_round: BTreeMap<u32, u64> = BTreeMap::new();
    let mut pending: Vec<WireMessage> = Vec::new();

    // The initializer broadcasts one node at a time, so a neighbor that
    // already has its starting weights can legally get its first update
    // here before this node's own copy arrives. Park such updates; only
    // non-update traffic in this phase is a protocol violation.
    let (init_message, init_ns) = loop {
        let (message, charged) = endpoint.recv_timeout(timeout)?;
        if message.kind() == MessageKind::NeighborUpdate {
            *t_exc_by_round.entry(message.round()).or_insert(0) += charged;
            pending.push(message);
            continue;
        }
        break (message, charged);
    };
    if init_message.kind() != MessageKind::InitModel {
        return Err(RuntimeError::Setup(format!(
            "node {node} expected initial weights, got {:?}",
            init_message.kind()
        )));
    }
    let mut state: ModelWeights = init_message.decode_payload()?;
    let mut personalized = state.clone();
    let mut reports = Vec::with_capacity(cfg.rounds as usize);

    for round in 1..=cfg.rounds {
        let model = GruClassifier::from_weights(input_size, hidden_size, state)?;
        let started = Instant::now();
        let out = local_train(
            model,
            &shard,
            cfg.local_epochs,
            cfg.batch_size,
            cfg.learning_rate,
            cfg.train_seed(node, round),
        )?;
        let wall_ns = started.elapsed().as_nanos() as u64;
        let t_loc_ns = endpoint.charge_compute(out.ops, NodeClass::Edge, wall_ns);
        let trained = out.model.into_weights();

        let params = trained.param_count() as u64;
        let mut sent_units = 0;
        if !neighbors.is_empty() {
            let update =
                WireMessage::model(MessageKind::NeighborUpdate, round, node, &trained)?;
            for &peer in &neighbors {
                endpoint.send(peer, update.clone())?;
                sent_units += params;
            }
        }

        let mut received: BTreeMap<NodeId, ModelWeights> = BTreeMap::new();
        let mut i = 0;
        while i < pending.len() {
            if pending[i].round() == round {
                let message = pending.swap_remove(i);
                accept_update(node, round, &neighbors, &mut received, message)?;
            } else {
                i += 1;
            }
        }
        while received.len() < neighbors.len() {
            let (message, charged) = endpoint.recv_timeout(timeout).map_err(|e| match e {
                TransportError::Timeout { .. } => RuntimeError::RoundAborted {
                    round,
                    detail: format!(
                        "node {node} got {} of {} neighbor updates: {e}",
                        received.len(),
                        neighbors.len()
                    ),
                },
                other => RuntimeError::Transport(other),
            })?;
            if message.round() == round + 1 {
                // A neighbor that already finished this round may run
                // ahead by exactly one; park its update for the next.
                *t_exc_by_round.entry(round + 1).or_insert(0) += charged;
                pending.push(message);
                continue;
            }
            if message.round() != round {
                return Err(RuntimeError::RoundAborted {
                    round,
                    detail: format!(
                        "node {node} got a round-{} message while in round {round}",
                        message.round()
                    ),
                });
            }
            *t_exc_by_round.entry(round).or_insert(0) += charged;
            accept_update(node, round, &neighbors, &mut received, message)?;
        }

        let mut sources = received;
        if cfg.self_inclusive {
            // The node's own contribution enters the merge in the same
            // value domain its peers received it in.
            sources.insert(node, quantize_to_wire(&trained));
        }
        let (next, t_agg_ns, aggregate_ops) = if sources.is_empty() {
            (quantize_to_wire(&trained), 0, 0)
        } else {
            let inputs: Vec<ModelWeights> = sources.into_values().collect();
            let started = Instant::now();
            let merged = quantize_to_wire(&fedavg(&inputs)?);
            let wall_ns = started.elapsed().as_nanos() as u64;
            let ops = params * inputs.len() as u64;
            (merged, endpoint.charge_compute(ops, NodeClass::Edge, wall_ns), ops)
        };

        personalized = trained;
        reports.push(NodeRoundReport {
            round,
            batches_per_epoch: out.batches_per_epoch,
            epoch_losses: out.epoch_losses,
            t_loc_ns,
            t_exc_ns: 0,
            t_agg_ns,
            local_ops: out.ops,
            aggregate_ops,
            sent_units,
            post_state: next.clone(),
        });
        state = next;
    }

    for report in &mut reports {
        report.t_exc_ns = t_exc_by_round.get(&report.round).copied().unwrap_or(0);
    }

    Ok(NodeResult {
        node,
        init_ns,
        rows: shard.len(),
        personalized,
        reports,
    })
}

fn accept_update(
    node: NodeId,
    round: u32,
    neighbors: &[NodeId],
    received: &mut BTreeMap<NodeId, ModelWeights>,
    message: WireMessage,
) -> Result<()> {
    if message.kind() != MessageKind::NeighborUpdate {
        return Err(RuntimeError::RoundAborted {
            round,
            detail: format!(
                "node {node} expected neighbor updates, got {:?}",
                message.kind()
            ),
        });
    }
    let sender = message.sender();
    if !neighbors.contains(&sender) || received.contains_key(&sender) {
        return Err(RuntimeError::RoundAborted {
            round,
            detail: format!(
                "node {node} got an unexpected or duplicate update from node {sender}"
            ),
        });
    }
    received.insert(sender, message.decode_payload()?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use gfl_transport::{SimNet, SimNetConfig};

    use crate::config::Topology;

    use super::*;

    fn shard(labels: &[u8]) -> ScaledDataset {
        ScaledDataset {
            rows: labels
                .iter()
                .map(|&l| vec![if l == 1 { 0.7 } else { 0.3 }; 3])
                .collect(),
            labels: labels.to_vec(),
        }
    }

    fn run(cfg: &FlConfig, shards: &[ScaledDataset]) -> RunOutcome {
        let net = SimNet::new(cfg.clients + 1, SimNetConfig::default());
        let endpoints: Vec<_> = (0..=cfg.clients).map(|i| net.endpoint(i).unwrap()).collect();
        run_dfl(cfg, shards, None, endpoints).unwrap()
    }

    #[test]
    fn a_small_mesh_run_completes_with_coherent_logs() {
        let cfg = FlConfig {
            clients: 3,
            rounds: 2,
            local_epochs: 2,
            batch_size: 2,
            hidden_size: 4,
            seed: 11,
            ..FlConfig::default()
        };
        let shards = vec![shard(&[0, 1, 0]), shard(&[1, 0]), shard(&[1, 1, 0, 0])];
        let outcome = run(&cfg, &shards);
        assert_eq!(outcome.round_logs.len(), 2);
        assert_eq!(outcome.personalized.len(), 3);
        assert_eq!(outcome.global.round, 2);
        for log in &outcome.round_logs {
            assert_eq!(log.participants, vec![0, 1, 2]);
            assert_eq!(log.node_stats.len(), 3);
            for stat in &log.node_stats {
                // Full mesh of three: everyone merges two neighbors.
                assert!(stat.t_agg_secs > 0.0);
            }
        }
        // Only edge rows: nothing aggregates on the initializer.
        assert!(outcome
            .ledger
            .entries
            .iter()
            .all(|e| e.role == LedgerRole::Edge));
        assert_eq!(outcome.ledger.entries.len(), 2 * 3);
        assert!(outcome.ledger.t_in_secs > 0.0);
    }

    #[test]
    fn a_single_node_trains_alone() {
        let cfg = FlConfig {
            clients: 1,
            rounds: 2,
            local_epochs: 1,
            batch_size: 2,
            hidden_size: 4,
            topology: Topology::FullMesh,
            seed: 3,
            ..FlConfig::default()
        };
        let shards = vec![shard(&[0, 1, 1, 0])];
        let outcome = run(&cfg, &shards);
        assert_eq!(outcome.personalized.len(), 1);
        // With nobody to talk to, the cohort mean is the node itself.
        assert_eq!(
            outcome
                .global
                .weights
                .max_abs_diff(&quantize_to_wire(&outcome.personalized[0].weights))
                .unwrap(),
            0.0
        );
        assert_eq!(outcome.counters.transmit_units, 0);
    }
}

//! Centralized federated training: every round, a subset of clients pulls
//! the current global weights, trains locally, and pushes updates back to
//! one server, which averages them into the next global model.

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
use crate::fedavg::{fedavg, fedavg_weighted};
use crate::logs::{NodeRoundStat, RoundLog};
use crate::protocol::{
    ns_to_secs, order_endpoints, validate_run_inputs, GlobalModel, PersonalizedModel, RunOutcome,
};
use crate::train::local_train;

/// One client's record of one round it participated in.
struct ClientRoundReport {
    round: u32,
    batches_per_epoch: u64,
    epoch_losses: Vec<f64>,
    t_loc_ns: u64,
    t_exc_ns: u64,
    local_ops: u64,
}

/// What a client thread hands back after release.
struct ClientResult {
    node: NodeId,
    init_ns: u64,
    personalized: ModelWeights,
    last_round: u32,
    rows: usize,
    reports: Vec<ClientRoundReport>,
}

/// The server's record of one completed round.
struct ServerRoundReport {
    round: u32,
    participants: Vec<NodeId>,
    t_excs_ns: u64,
    t_agg_ns: u64,
    global: ModelWeights,
    global_hash: u64,
    holdout_accuracy: Option<f64>,
    aggregate_ops: u64,
    broadcast_units: u64,
}

struct ServerCtx {
    cfg: FlConfig,
    input_size: usize,
    hidden_size: usize,
    init_weights: ModelWeights,
    shard_rows: Vec<usize>,
    params: u64,
}

/// Run the full centralized protocol.
///
/// `shards[k]` is client `k`'s training data; `endpoints` must cover node
/// ids `0..=K` (clients then server), in any order. When `holdout` is
/// given, each round's fresh global is scored on it; when `test_set` is
/// given, the final global's evaluation lands in the outcome.
pub fn run_cfl<T: Transport + 'static>(
    cfg: &FlConfig,
    shards: &[ScaledDataset],
    holdout: Option<&ScaledDataset>,
    test_set: Option<&ScaledDataset>,
    endpoints: Vec<T>,
) -> Result<RunOutcome> {
    let input_size = validate_run_inputs(cfg, shards)?;
    let hidden_size = cfg.hidden_size;
    let mut endpoints = order_endpoints(endpoints, cfg.clients + 1)?;

    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.model_init_seed());
    let init_model = GruClassifier::init(input_size, hidden_size, &mut init_rng)?;
    let params = init_model.weights().param_count() as u64;

    let server_endpoint = endpoints.pop().expect("server endpoint present");
    let ctx = ServerCtx {
        cfg: cfg.clone(),
        input_size,
        hidden_size,
        init_weights: init_model.into_weights(),
        shard_rows: shards.iter().map(ScaledDataset::len).collect(),
        params,
    };
    let holdout_owned = holdout.cloned();
    let server_handle = thread::spawn(move || server_loop(server_endpoint, ctx, holdout_owned));

    let mut client_handles = Vec::new();
    for (endpoint, shard) in endpoints.into_iter().zip(shards.iter().cloned()) {
        let cfg = cfg.clone();
        client_handles.push(thread::spawn(move || {
            client_loop(endpoint, cfg, shard, input_size, hidden_size)
        }));
    }

    let mut client_results = Vec::new();
    for (node, handle) in client_handles.into_iter().enumerate() {
        let joined = handle
            .join()
            .map_err(|_| RuntimeError::WorkerPanicked { node: node as u32 })?;
        client_results.push(joined);
    }
    let server_result = server_handle
        .join()
        .map_err(|_| RuntimeError::WorkerPanicked { node: cfg.clients })?;

    // Surface the most informative failure: a client's own error explains
    // a server-side timeout, so it wins — except that a client timing out
    // while the server was already aborting the round is a symptom of the
    // abort, not a story of its own.
    let mut clients = Vec::with_capacity(client_results.len());
    let mut client_error = None;
    for result in client_results {
        match result {
            Ok(r) => clients.push(r),
            Err(e) => client_error = Some(client_error.unwrap_or(e)),
        }
    }
    let rounds = match (server_result, client_error) {
        (Err(server_err), Some(client_err)) => {
            let client_timed_out = matches!(
                client_err,
                RuntimeError::Transport(gfl_transport::TransportError::Timeout { .. })
            );
            return Err(match server_err {
                abort @ RuntimeError::RoundAborted { .. } if client_timed_out => abort,
                RuntimeError::RoundAborted { .. } => client_err,
                other => other,
            });
        }
        (_, Some(client_err)) => return Err(client_err),
        (Err(server_err), None) => return Err(server_err),
        (Ok(rounds), None) => rounds,
    };

    assemble_outcome(cfg, input_size, hidden_size, clients, rounds, test_set)
}

fn assemble_outcome(
    cfg: &FlConfig,
    input_size: usize,
    hidden_size: usize,
    mut clients: Vec<ClientResult>,
    rounds: Vec<ServerRoundReport>,
    test_set: Option<&ScaledDataset>,
) -> Result<RunOutcome> {
    clients.sort_by_key(|c| c.node);

    let mut ledger = TimeLedger::new();
    let mut counters = ComplexityCounters::new();
    for client in &clients {
        ledger.add_init_secs(ns_to_secs(client.init_ns))?;
    }

    let mut round_logs = Vec::with_capacity(rounds.len());
    let mut globals_per_round = Vec::with_capacity(rounds.len());
    for report in &rounds {
        let mut node_stats = Vec::new();
        for client in &clients {
            let Some(cr) = client.reports.iter().find(|r| r.round == report.round) else {
                continue;
            };
            node_stats.push(NodeRoundStat {
                node: client.node,
                rows: client.rows,
                batches_per_epoch: cr.batches_per_epoch,
                epoch_losses: cr.epoch_losses.clone(),
                t_loc_secs: ns_to_secs(cr.t_loc_ns),
                t_exc_secs: ns_to_secs(cr.t_exc_ns),
                t_agg_secs: 0.0,
            });
            ledger.record(LedgerEntry {
                node: client.node,
                round: report.round,
                role: LedgerRole::Edge,
                t_loc_secs: ns_to_secs(cr.t_loc_ns),
                t_exc_secs: ns_to_secs(cr.t_exc_ns),
                t_agg_secs: 0.0,
            })?;
            counters.local_train_ops += cr.local_ops;
        }
        ledger.record(LedgerEntry {
            node: cfg.server_id(),
            round: report.round,
            role: LedgerRole::Server,
            t_loc_secs: 0.0,
            t_exc_secs: ns_to_secs(report.t_excs_ns),
            t_agg_secs: ns_to_secs(report.t_agg_ns),
        })?;
        // Each participant uploads one copy of the weights; the refreshed
        // global goes out once per round.
        counters.transmit_units +=
            (report.participants.len() as u64 + 1) * report.broadcast_units;
        counters.aggregate_ops += report.aggregate_ops;

        round_logs.push(RoundLog {
            round: report.round,
            participants: report.participants.clone(),
            node_stats,
            t_agg_secs: ns_to_secs(report.t_agg_ns),
            global_hash: report.global_hash,
            holdout_accuracy: report.holdout_accuracy,
        });
        globals_per_round.push(report.global.clone());
    }

    let final_report = rounds.last().expect("at least one round");
    let global = GlobalModel {
        weights: final_report.global.clone(),
        round: final_report.round,
    };
    let test_eval = match test_set {
        Some(data) => {
            let model =
                GruClassifier::from_weights(input_size, hidden_size, global.weights.clone())?;
            Some(evaluate(&model, data)?)
        }
        None => None,
    };

    let personalized = clients
        .into_iter()
        .map(|c| PersonalizedModel {
            node: c.node,
            weights: c.personalized,
            last_round: c.last_round,
        })
        .collect();

    Ok(RunOutcome {
        protocol: Protocol::Centralized,
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

fn client_loop<T: Transport>(
    mut endpoint: T,
    cfg: FlConfig,
    shard: ScaledDataset,
    input_size: usize,
    hidden_size: usize,
) -> Result<ClientResult> {
    let node = endpoint.node_id();
    let server = cfg.server_id();
    let timeout = Duration::from_secs(cfg.round_timeout_secs);

    endpoint.send(server, WireMessage::control(MessageKind::Hello, 0, node)?)?;

    let mut init_ns = 0;
    let mut initial: Option<ModelWeights> = None;
    let mut personalized: Option<(ModelWeights, u32)> = None;
    let mut reports = Vec::new();

    loop {
        let (message, charged) = endpoint.recv_timeout(timeout)?;
        match message.kind() {
            MessageKind::InitModel => {
                init_ns += charged;
                initial = Some(message.decode_payload()?);
            }
            MessageKind::GlobalModel => {
                let round = message.round();
                let weights = message.decode_payload()?;
                let model = GruClassifier::from_weights(input_size, hidden_size, weights)?;
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
                endpoint.send(
                    server,
                    WireMessage::model(MessageKind::ClientUpdate, round, node, &trained)?,
                )?;
                personalized = Some((trained, round));
                reports.push(ClientRoundReport {
                    round,
                    batches_per_epoch: out.batches_per_epoch,
                    epoch_losses: out.epoch_losses,
                    t_loc_ns,
                    t_exc_ns: charged,
                    local_ops: out.ops,
                });
            }
            MessageKind::Release => break,
            other => {
                return Err(RuntimeError::Setup(format!(
                    "client {node} received unexpected {other:?}"
                )))
            }
        }
    }

    let initial = initial
        .ok_or_else(|| RuntimeError::Setup(format!("client {node} was never initialized")))?;
    let (personalized, last_round) = personalized.unwrap_or((initial, 0));
    Ok(ClientResult {
        node,
        init_ns,
        personalized,
        last_round,
        rows: shard.len(),
        reports,
    })
}

fn server_loop<T: Transport>(
    mut endpoint: T,
    ctx: ServerCtx,
    holdout: Option<ScaledDataset>,
) -> Result<Vec<ServerRoundReport>> {
    let result = server_protocol(&mut endpoint, &ctx, holdout.as_ref());
    if result.is_err() {
        // Free any clients still waiting so the run can shut down.
        for k in 0..ctx.cfg.clients {
            if let Ok(message) =
                WireMessage::control(MessageKind::Release, ctx.cfg.rounds, ctx.cfg.server_id())
            {
                let _ = endpoint.send(k, message);
            }
        }
    }
    result
}

fn server_protocol<T: Transport>(
    endpoint: &mut T,
    ctx: &ServerCtx,
    holdout: Option<&ScaledDataset>,
) -> Result<Vec<ServerRoundReport>> {
    let cfg = &ctx.cfg;
    let timeout = Duration::from_secs(cfg.round_timeout_secs);
    let server = cfg.server_id();

    collect_hellos(endpoint, cfg.clients, timeout)?;

    let init_message =
        WireMessage::model(MessageKind::InitModel, 0, server, &ctx.init_weights)?;
    for k in 0..cfg.clients {
        endpoint.send(k, init_message.clone())?;
    }
    // The stored global always lives in the wire's value domain, so what
    // the server keeps is exactly what every client decodes.
    let mut stored = quantize_to_wire(&ctx.init_weights);

    let mut reports = Vec::with_capacity(cfg.rounds as usize);
    for round in 1..=cfg.rounds {
        let participants = cfg.select_participants(round);
        let broadcast = WireMessage::model(MessageKind::GlobalModel, round, server, &stored)?;
        for &k in &participants {
            endpoint.send(k, broadcast.clone())?;
        }

        let (updates, t_excs_ns) =
            collect_updates(endpoint, round, &participants, timeout)?;

        let update_weights: Vec<ModelWeights> =
            updates.iter().map(|(_, w)| w.clone()).collect();
        let started = Instant::now();
        let mean = if cfg.size_weighted {
            let rows: Vec<usize> = updates
                .iter()
                .map(|&(sender, _)| ctx.shard_rows[sender as usize])
                .collect();
            fedavg_weighted(&update_weights, &rows)?
        } else {
            fedavg(&update_weights)?
        };
        let next = quantize_to_wire(&mean);
        let wall_ns = started.elapsed().as_nanos() as u64;
        let aggregate_ops = ctx.params * updates.len() as u64;
        let t_agg_ns = endpoint.charge_compute(aggregate_ops, NodeClass::Cloud, wall_ns);

        let holdout_accuracy = match holdout {
            Some(data) => {
                let model =
                    GruClassifier::from_weights(ctx.input_size, ctx.hidden_size, next.clone())?;
                Some(evaluate(&model, data)?.metrics.accuracy)
            }
            None => None,
        };

        reports.push(ServerRoundReport {
            round,
            participants,
            t_excs_ns,
            t_agg_ns,
            global_hash: weights_hash(&next)?,
            global: next.clone(),
            holdout_accuracy,
            aggregate_ops,
            broadcast_units: ctx.params,
        });
        stored = next;
    }

    let release = WireMessage::control(MessageKind::Release, cfg.rounds, server)?;
    for k in 0..cfg.clients {
        endpoint.send(k, release.clone())?;
    }
    Ok(reports)
}

/// Wait for every expected client to check in.
fn collect_hellos<T: Transport>(endpoint: &mut T, clients: u32, timeout: Duration) -> Result<()> {
    let mut seen = vec![false; clients as usize];
    for _ in 0..clients {
        let (message, _) = endpoint.recv_timeout(timeout).map_err(|e| match e {
            TransportError::Timeout { .. } => RuntimeError::Setup(format!(
                "not all {clients} clients checked in: {e}"
            )),
            other => RuntimeError::Transport(other),
        })?;
        if message.kind() != MessageKind::Hello {
            return Err(RuntimeError::Setup(format!(
                "expected a check-in, got {:?} from node {}",
                message.kind(),
                message.sender()
            )));
        }
        let sender = message.sender();
        if sender >= clients || seen[sender as usize] {
            return Err(RuntimeError::Setup(format!(
                "bad or duplicate check-in from node {sender}"
            )));
        }
        seen[sender as usize] = true;
    }
    Ok(())
}

/// Gather one update from each participant of `round`, in any arrival
/// order. Returns them sorted by sender, with the total receive time.
fn collect_updates<T: Transport>(
    endpoint: &mut T,
    round: u32,
    participants: &[NodeId],
    timeout: Duration,
) -> Result<(Vec<(NodeId, ModelWeights)>, u64)> {
    let mut pending: Vec<NodeId> = participants.to_vec();
    let mut updates: BTreeMap<NodeId, ModelWeights> = BTreeMap::new();
    let mut t_excs_ns = 0;
    while !pending.is_empty() {
        let (message, charged) = endpoint.recv_timeout(timeout).map_err(|e| match e {
            TransportError::Timeout { .. } => RuntimeError::RoundAborted {
                round,
                detail: format!("still waiting for updates from clients {pending:?}: {e}"),
            },
            other => RuntimeError::Transport(other),
        })?;
        if message.kind() != MessageKind::ClientUpdate || message.round() != round {
            return Err(RuntimeError::RoundAborted {
                round,
                detail: format!(
                    "expected round-{round} updates, got {:?} for round {} from node {}",
                    message.kind(),
                    message.round(),
                    message.sender()
                ),
            });
        }
        let sender = message.sender();
        let Some(slot) = pending.iter().position(|&p| p == sender) else {
            return Err(RuntimeError::RoundAborted {
                round,
                detail: format!("unexpected or duplicate update from node {sender}"),
            });
        };
        pending.swap_remove(slot);
        t_excs_ns += charged;
        updates.insert(sender, message.decode_payload()?);
    }
    Ok((updates.into_iter().collect(), t_excs_ns))
}

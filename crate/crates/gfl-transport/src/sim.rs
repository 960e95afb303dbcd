//! Deterministic in-process network simulation.
//!
//! All endpoints share one virtual clock, a plain nanosecond counter.
//! Nothing ever sleeps on it: consuming a model-bearing message adds the
//! link latency, and compute is charged explicitly through the per-class op
//! cost model. Because every charge is a single atomic addition, the final
//! clock reading equals the exact sum of all charged durations no matter
//! how participant threads interleave — which is what makes simulated
//! wall-time and energy results reproducible bit for bit.

use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use crate::wire::{MessageKind, WireMessage};
use crate::{NodeClass, NodeId, Transport, TransportError, WireResult};

/// Timing parameters of the simulated deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimNetConfig {
    /// Latency charged when a model-bearing message is consumed.
    pub link_latency_ns: u64,
    /// Latency charged for control messages (`Hello`, `Release`).
    pub control_latency_ns: u64,
    /// Seconds one abstract parameter-op costs on an edge node.
    pub edge_sec_per_op: f64,
    /// Seconds one abstract parameter-op costs on the cloud node.
    pub cloud_sec_per_op: f64,
}

impl Default for SimNetConfig {
    fn default() -> Self {
        SimNetConfig {
            link_latency_ns: 5_000_000, // 5 ms per model hop
            control_latency_ns: 0,
            edge_sec_per_op: 1e-8,
            cloud_sec_per_op: 1e-9,
        }
    }
}

/// One send, as seen by the network. Traces let tests audit exactly what
/// crossed each link (kinds, sizes, payload fingerprints) without touching
/// the payloads themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    /// Global send order (drained snapshots stay sorted by this).
    pub seq: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub kind: MessageKind,
    pub round: u32,
    pub payload_len: usize,
    pub payload_hash: u64,
}

struct Mailbox {
    queue: Mutex<VecDeque<WireMessage>>,
    arrived: Condvar,
}

struct Shared {
    clock_ns: Mutex<u64>,
    mailboxes: Vec<Mailbox>,
    trace: Mutex<Vec<TraceRecord>>,
    seq: Mutex<u64>,
    config: SimNetConfig,
}

/// A simulated network of `nodes` endpoints, ids `0..nodes`.
pub struct SimNet {
    shared: Arc<Shared>,
    nodes: u32,
}

impl SimNet {
    pub fn new(nodes: u32, config: SimNetConfig) -> Self {
        let mailboxes = (0..nodes)
            .map(|_| Mailbox {
                queue: Mutex::new(VecDeque::new()),
                arrived: Condvar::new(),
            })
            .collect();
        SimNet {
            shared: Arc::new(Shared {
                clock_ns: Mutex::new(0),
                mailboxes,
                trace: Mutex::new(Vec::new()),
                seq: Mutex::new(0),
                config,
            }),
            nodes,
        }
    }

    pub fn nodes(&self) -> u32 {
        self.nodes
    }

    pub fn config(&self) -> SimNetConfig {
        self.shared.config
    }

    /// Handle for node `id`. Endpoints are independent: each can move to
    /// its own thread.
    pub fn endpoint(&self, id: NodeId) -> WireResult<SimEndpoint> {
        if id >= self.nodes {
            return Err(TransportError::UnknownNode { node: id });
        }
        Ok(SimEndpoint {
            shared: Arc::clone(&self.shared),
            id,
            nodes: self.nodes,
        })
    }

    /// Current virtual time.
    pub fn now_ns(&self) -> u64 {
        *self.shared.clock_ns.lock().expect("clock poisoned")
    }

    /// Snapshot of every send so far, in global send order.
    pub fn trace(&self) -> Vec<TraceRecord> {
        self.shared.trace.lock().expect("trace poisoned").clone()
    }
}

/// One node's handle onto a [`SimNet`].
pub struct SimEndpoint {
    shared: Arc<Shared>,
    id: NodeId,
    nodes: u32,
}

impl SimEndpoint {
    fn advance_clock(&self, ns: u64) {
        let mut clock = self.shared.clock_ns.lock().expect("clock poisoned");
        *clock += ns;
    }

    fn latency_for(&self, kind: MessageKind) -> u64 {
        if kind.is_control() {
            self.shared.config.control_latency_ns
        } else {
            self.shared.config.link_latency_ns
        }
    }
}

impl Transport for SimEndpoint {
    fn node_id(&self) -> NodeId {
        self.id
    }

    fn send(&mut self, to: NodeId, message: WireMessage) -> WireResult<()> {
        if to >= self.nodes {
            return Err(TransportError::UnknownNode { node: to });
        }
        {
            let mut trace = self.shared.trace.lock().expect("trace poisoned");
            let mut seq = self.shared.seq.lock().expect("seq poisoned");
            trace.push(TraceRecord {
                seq: *seq,
                from: self.id,
                to,
                kind: message.kind(),
                round: message.round(),
                payload_len: message.payload().len(),
                payload_hash: message.payload_hash(),
            });
            *seq += 1;
        }
        let mailbox = &self.shared.mailboxes[to as usize];
        mailbox
            .queue
            .lock()
            .expect("mailbox poisoned")
            .push_back(message);
        mailbox.arrived.notify_all();
        Ok(())
    }

    fn recv_timeout(&mut self, timeout: Duration) -> WireResult<(WireMessage, u64)> {
        let mailbox = &self.shared.mailboxes[self.id as usize];
        let deadline = Instant::now() + timeout;
        let mut queue = mailbox.queue.lock().expect("mailbox poisoned");
        loop {
            if let Some(message) = queue.pop_front() {
                drop(queue);
                // The delivery is charged to the receiver at consume time;
                // one hop, one latency.
                let latency = self.latency_for(message.kind());
                self.advance_clock(latency);
                return Ok((message, latency));
            }
            let now = Instant::now();
            if now >= deadline {
                return Err(TransportError::Timeout { waited: timeout });
            }
            let (q, wait) = mailbox
                .arrived
                .wait_timeout(queue, deadline - now)
                .expect("mailbox poisoned");
            queue = q;
            if wait.timed_out() && queue.is_empty() {
                return Err(TransportError::Timeout { waited: timeout });
            }
        }
    }

    fn charge_compute(&mut self, ops: u64, class: NodeClass, _wall_ns: u64) -> u64 {
        let sec_per_op = match class {
            NodeClass::Edge => self.shared.config.edge_sec_per_op,
            NodeClass::Cloud => self.shared.config.cloud_sec_per_op,
        };
        let ns = (ops as f64 * sec_per_op * 1e9).round() as u64;
        self.advance_clock(ns);
        ns
    }

    fn pass_time(&mut self, ns: u64) {
        self.advance_clock(ns);
    }

    fn now_ns(&self) -> u64 {
        *self.shared.clock_ns.lock().expect("clock poisoned")
    }
}

#[cfg(test)]
mod tests {
    use gfl_core::{ModelWeights, Tensor};

    use super::*;
    use crate::wire::{MessageKind, WireMessage};

    fn weights(v: f64) -> ModelWeights {
        ModelWeights::from_layers(vec![("w".into(), Tensor::vector(vec![v]))]).unwrap()
    }

    fn model_msg(round: u32, sender: u32, v: f64) -> WireMessage {
        WireMessage::model(MessageKind::GlobalModel, round, sender, &weights(v)).unwrap()
    }

    #[test]
    fn messages_arrive_fifo_per_link() {
        let net = SimNet::new(2, SimNetConfig::default());
        let mut a = net.endpoint(0).unwrap();
        let mut b = net.endpoint(1).unwrap();
        for i in 0..5 {
            a.send(1, model_msg(i, 0, f64::from(i))).unwrap();
        }
        for i in 0..5 {
            let (got, _) = b.recv_timeout(Duration::from_secs(1)).unwrap();
            assert_eq!(got.round(), i);
        }
    }

    #[test]
    fn model_hops_charge_latency_and_control_hops_do_not() {
        let config = SimNetConfig {
            link_latency_ns: 1_000_000,
            ..SimNetConfig::default()
        };
        let net = SimNet::new(2, config);
        let mut a = net.endpoint(0).unwrap();
        let mut b = net.endpoint(1).unwrap();

        a.send(1, WireMessage::control(MessageKind::Hello, 0, 0).unwrap())
            .unwrap();
        let (_, charged) = b.recv_timeout(Duration::from_secs(1)).unwrap();
        assert_eq!(charged, 0, "control messages are free by default");
        assert_eq!(net.now_ns(), 0);

        a.send(1, model_msg(0, 0, 1.0)).unwrap();
        assert_eq!(net.now_ns(), 0, "sending is instant; cost lands on delivery");
        let (_, charged) = b.recv_timeout(Duration::from_secs(1)).unwrap();
        assert_eq!(charged, 1_000_000);
        assert_eq!(net.now_ns(), 1_000_000);
    }

    #[test]
    fn op_charges_follow_the_class_rates_exactly() {
        let config = SimNetConfig {
            edge_sec_per_op: 1e-8,
            cloud_sec_per_op: 1e-9,
            ..SimNetConfig::default()
        };
        let net = SimNet::new(1, config);
        let mut e = net.endpoint(0).unwrap();
        let ns = e.charge_compute(1_000, NodeClass::Edge, 999);
        assert_eq!(ns, 10_000); // 1000 ops * 10 ns; wall time is ignored
        let ns = e.charge_compute(1_000, NodeClass::Cloud, 999);
        assert_eq!(ns, 1_000); // 1000 ops * 1 ns
        assert_eq!(net.now_ns(), 11_000);
    }

    #[test]
    fn recv_times_out_when_nothing_is_coming() {
        let net = SimNet::new(1, SimNetConfig::default());
        let mut e = net.endpoint(0).unwrap();
        let before = net.now_ns();
        let err = e.recv_timeout(Duration::from_millis(20)).unwrap_err();
        assert!(matches!(err, TransportError::Timeout { .. }));
        assert_eq!(net.now_ns(), before, "a timeout charges no virtual time");
    }

    #[test]
    fn unknown_nodes_are_rejected() {
        let net = SimNet::new(2, SimNetConfig::default());
        assert!(net.endpoint(2).is_err());
        let mut a = net.endpoint(0).unwrap();
        assert!(matches!(
            a.send(5, model_msg(0, 0, 1.0)).unwrap_err(),
            TransportError::UnknownNode { node: 5 }
        ));
    }

    #[test]
    fn trace_records_every_send_with_fingerprints() {
        let net = SimNet::new(3, SimNetConfig::default());
        let mut a = net.endpoint(0).unwrap();
        let mut b = net.endpoint(1).unwrap();
        a.send(2, model_msg(1, 0, 1.5)).unwrap();
        b.send(2, WireMessage::control(MessageKind::Hello, 0, 1).unwrap())
            .unwrap();
        let trace = net.trace();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].from, 0);
        assert_eq!(trace[0].to, 2);
        assert_eq!(trace[0].kind, MessageKind::GlobalModel);
        assert!(trace[0].payload_len > 0);
        assert_eq!(trace[1].kind, MessageKind::Hello);
        assert_eq!(trace[1].payload_len, 0);
        assert!(trace[0].seq < trace[1].seq);
    }

    #[test]
    fn clock_total_is_interleaving_proof_across_threads() {
        // Two peers exchange 50 model messages each from separate threads.
        // Whatever the interleaving, the total charged time must be exactly
        // 100 deliveries' worth of latency plus both compute charges.
        let config = SimNetConfig {
            link_latency_ns: 7,
            ..SimNetConfig::default()
        };
        let net = SimNet::new(2, config);
        let mut a = net.endpoint(0).unwrap();
        let mut b = net.endpoint(1).unwrap();
        let ta = std::thread::spawn(move || {
            a.pass_time(1_000);
            for i in 0..50 {
                a.send(1, model_msg(i, 0, 0.5)).unwrap();
                a.recv_timeout(Duration::from_secs(5)).unwrap();
            }
        });
        let tb = std::thread::spawn(move || {
            b.pass_time(2_000);
            for i in 0..50 {
                b.send(0, model_msg(i, 1, 0.25)).unwrap();
                b.recv_timeout(Duration::from_secs(5)).unwrap();
            }
        });
        ta.join().unwrap();
        tb.join().unwrap();
        assert_eq!(net.now_ns(), 1_000 + 2_000 + 100 * 7);
    }
}

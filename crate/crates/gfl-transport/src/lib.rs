//! Message transports for federated training.
//!
//! Two interchangeable backends implement [`Transport`]:
//!
//! * [`sim::SimNet`] — an in-process network with a shared virtual clock.
//!   Message latency and compute time are *accounted*, not awaited: the
//!   clock is a counter that participants advance, so timing results are
//!   deterministic down to the nanosecond regardless of host load.
//! * [`tcp::TcpMesh`] — real length-prefixed frames over TCP sockets, for
//!   running the same protocols across processes or machines.
//!
//! Both move [`wire::WireMessage`] values; the byte format is identical, so
//! a protocol run behaves the same over either backend.

pub mod sim;
pub mod tcp;
pub mod wire;

use std::time::Duration;

use thiserror::Error;

pub use sim::{SimEndpoint, SimNet, SimNetConfig, TraceRecord};
pub use tcp::{TcpEndpoint, TcpMesh};
pub use wire::{
    decode_weights, encode_weights, quantize_to_wire, weights_hash, MessageKind, WireMessage,
    MAX_FRAME_BYTES, WIRE_MAGIC, WIRE_VERSION,
};

/// Node identifier within one deployment. Clients count up from 0; the
/// aggregation server, where present, conventionally takes the largest id.
pub type NodeId = u32;

/// Where a node runs, for cost accounting: edge machines hold data shards,
/// the cloud node initializes and (in the centralized protocol) aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Edge,
    Cloud,
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("wire decode failed at byte {offset}: {detail}")]
    Decode { offset: usize, detail: String },

    #[error("wire encode failed: {0}")]
    Encode(String),

    #[error("unknown message kind {value}")]
    BadKind { value: u8 },

    #[error("kind {kind:?} and payload disagree: {detail}")]
    PayloadMismatch { kind: MessageKind, detail: String },

    #[error("frame of {bytes} bytes exceeds the {limit} byte limit")]
    TooLarge { bytes: usize, limit: usize },

    #[error("no message arrived within {waited:?}")]
    Timeout { waited: Duration },

    #[error("unknown node {node}")]
    UnknownNode { node: NodeId },

    #[error("node {node} is no longer reachable: {detail}")]
    Disconnected { node: NodeId, detail: String },

    #[error("io error talking to node {node}: {source}")]
    Io {
        node: NodeId,
        #[source]
        source: std::io::Error,
    },

    #[error("transport setup failed: {0}")]
    Setup(String),
}

pub type WireResult<T> = Result<T, TransportError>;

/// A node's handle onto some network of peers.
///
/// Every timed action reports the nanoseconds the backend attributes to it,
/// so callers can keep per-event ledgers without reading a shared clock
/// (which concurrent peers would pollute). On the simulator the clock is
/// virtual and charges are exact; over TCP the attributed time is measured
/// wall time.
pub trait Transport: Send {
    fn node_id(&self) -> NodeId;

    /// Queue a message to a peer. Sending never blocks on the receiver.
    fn send(&mut self, to: NodeId, message: WireMessage) -> WireResult<()>;

    /// Next inbound message, in per-sender FIFO order, waiting up to
    /// `timeout` of wall time. Returns the message and the nanoseconds of
    /// delivery time attributed to this node.
    fn recv_timeout(&mut self, timeout: Duration) -> WireResult<(WireMessage, u64)>;

    /// Meter a block of compute: `ops` abstract parameter-ops on a node of
    /// `class`, which took `wall_ns` of real time. Returns the nanoseconds
    /// the backend attributes to the work (modeled time on the simulator,
    /// `wall_ns` itself over TCP).
    fn charge_compute(&mut self, ops: u64, class: NodeClass, wall_ns: u64) -> u64;

    /// Let `ns` nanoseconds pass on this node: a clock advance on the
    /// simulator, a real sleep over TCP.
    fn pass_time(&mut self, ns: u64);

    /// Current clock reading in nanoseconds.
    fn now_ns(&self) -> u64;
}

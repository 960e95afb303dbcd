//! TCP transport: the wire format over real sockets.
//!
//! Every message travels as one length-prefixed frame (`u32` little-endian
//! byte count, then the encoded [`WireMessage`]), capped at
//! [`MAX_FRAME_BYTES`] on both sides. A mesh holds one full-duplex socket
//! per node pair; each endpoint runs one reader thread per link that decodes
//! frames and feeds a single inbox channel, so [`Transport::recv_timeout`]
//! sees messages from all peers in arrival order.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use crate::wire::{WireMessage, MAX_FRAME_BYTES};
use crate::{NodeClass, NodeId, Transport, TransportError, WireResult};

/// Builder for fully connected loopback meshes.
pub struct TcpMesh;

impl TcpMesh {
    /// Create `nodes` endpoints wired all-to-all over 127.0.0.1 sockets.
    ///
    /// Endpoints come back in id order and each can move to its own thread.
    /// Dropping an endpoint shuts its links down, which unblocks its peers'
    /// readers.
    pub fn establish_local(nodes: u32) -> WireResult<Vec<TcpEndpoint>> {
        if nodes == 0 {
            return Err(TransportError::Setup("a mesh needs at least one node".into()));
        }
        let mut listeners = Vec::with_capacity(nodes as usize);
        let mut addrs: Vec<SocketAddr> = Vec::with_capacity(nodes as usize);
        for node in 0..nodes {
            let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| TransportError::Io {
                node,
                source: e,
            })?;
            addrs.push(listener.local_addr().map_err(|e| TransportError::Io {
                node,
                source: e,
            })?);
            listeners.push(listener);
        }

        // Higher id dials lower id and announces itself; the TCP backlog
        // lets all dials complete before any accept runs, so this whole
        // handshake is single-threaded.
        let mut links: Vec<HashMap<NodeId, TcpStream>> =
            (0..nodes).map(|_| HashMap::new()).collect();
        for dialer in 0..nodes {
            for target in 0..dialer {
                let mut stream =
                    TcpStream::connect(addrs[target as usize]).map_err(|e| TransportError::Io {
                        node: target,
                        source: e,
                    })?;
                stream
                    .write_all(&dialer.to_le_bytes())
                    .map_err(|e| TransportError::Io {
                        node: target,
                        source: e,
                    })?;
                stream.set_nodelay(true).ok();
                links[dialer as usize].insert(target, stream);
            }
        }
        for (node, listener) in listeners.iter().enumerate() {
            for _ in 0..(nodes as usize - 1 - node) {
                let (mut stream, _) = listener.accept().map_err(|e| TransportError::Io {
                    node: node as NodeId,
                    source: e,
                })?;
                let mut id_bytes = [0u8; 4];
                stream
                    .read_exact(&mut id_bytes)
                    .map_err(|e| TransportError::Io {
                        node: node as NodeId,
                        source: e,
                    })?;
                let peer = NodeId::from_le_bytes(id_bytes);
                if peer >= nodes || links[node].contains_key(&peer) {
                    return Err(TransportError::Setup(format!(
                        "node {node} received a bogus hello from '{peer}'"
                    )));
                }
                stream.set_nodelay(true).ok();
                links[node].insert(peer, stream);
            }
        }

        let epoch = Instant::now();
        let mut endpoints = Vec::with_capacity(nodes as usize);
        for (node, peers) in links.into_iter().enumerate() {
            let (tx, rx) = mpsc::channel();
            let mut writers = HashMap::new();
            for (peer, stream) in peers {
                let reader = stream.try_clone().map_err(|e| TransportError::Io {
                    node: peer,
                    source: e,
                })?;
                spawn_reader(peer, reader, tx.clone());
                writers.insert(peer, stream);
            }
            drop(tx); // only reader threads hold senders
            endpoints.push(TcpEndpoint {
                id: node as NodeId,
                writers,
                inbox: rx,
                epoch,
            });
        }
        Ok(endpoints)
    }
}

fn spawn_reader(peer: NodeId, mut stream: TcpStream, tx: mpsc::Sender<WireResult<WireMessage>>) {
    std::thread::spawn(move || loop {
        let mut len_bytes = [0u8; 4];
        match stream.read_exact(&mut len_bytes) {
            Ok(()) => {}
            // Peer closed the link: clean end of stream.
            Err(_) => return,
        }
        let len = u32::from_le_bytes(len_bytes) as usize;
        if len > MAX_FRAME_BYTES {
            let _ = tx.send(Err(TransportError::TooLarge {
                bytes: len,
                limit: MAX_FRAME_BYTES,
            }));
            let _ = stream.shutdown(Shutdown::Both);
            return;
        }
        let mut frame = vec![0u8; len];
        if let Err(e) = stream.read_exact(&mut frame) {
            let _ = tx.send(Err(TransportError::Disconnected {
                node: peer,
                detail: format!("link died mid-frame: {e}"),
            }));
            return;
        }
        if tx.send(WireMessage::decode(&frame)).is_err() {
            return; // endpoint dropped
        }
    });
}

/// One node's handle onto a TCP mesh.
pub struct TcpEndpoint {
    id: NodeId,
    writers: HashMap<NodeId, TcpStream>,
    inbox: mpsc::Receiver<WireResult<WireMessage>>,
    epoch: Instant,
}

impl Transport for TcpEndpoint {
    fn node_id(&self) -> NodeId {
        self.id
    }

    fn send(&mut self, to: NodeId, message: WireMessage) -> WireResult<()> {
        let bytes = message.encode();
        if bytes.len() > MAX_FRAME_BYTES {
            return Err(TransportError::TooLarge {
                bytes: bytes.len(),
                limit: MAX_FRAME_BYTES,
            });
        }
        let stream = self
            .writers
            .get_mut(&to)
            .ok_or(TransportError::UnknownNode { node: to })?;
        stream
            .write_all(&(bytes.len() as u32).to_le_bytes())
            .and_then(|_| stream.write_all(&bytes))
            .map_err(|e| TransportError::Io {
                node: to,
                source: e,
            })
    }

    fn recv_timeout(&mut self, timeout: Duration) -> WireResult<(WireMessage, u64)> {
        let started = Instant::now();
        match self.inbox.recv_timeout(timeout) {
            Ok(result) => result.map(|message| {
                // Over real sockets the delivery time is simply how long
                // this call blocked, wait and transfer together.
                (message, started.elapsed().as_nanos() as u64)
            }),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                Err(TransportError::Timeout { waited: timeout })
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(TransportError::Disconnected {
                node: self.id,
                detail: "every link to this node has closed".into(),
            }),
        }
    }

    /// No cost model on real hardware: the work took as long as it took.
    fn charge_compute(&mut self, _ops: u64, _class: NodeClass, wall_ns: u64) -> u64 {
        wall_ns
    }

    /// Real time only passes by actually waiting.
    fn pass_time(&mut self, ns: u64) {
        std::thread::sleep(Duration::from_nanos(ns));
    }

    fn now_ns(&self) -> u64 {
        self.epoch.elapsed().as_nanos() as u64
    }
}

impl Drop for TcpEndpoint {
    fn drop(&mut self) {
        for stream in self.writers.values() {
            let _ = stream.shutdown(Shutdown::Both);
        }
    }
}

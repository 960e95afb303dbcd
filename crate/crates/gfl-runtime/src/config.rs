//! Run configuration: cohort shape, optimization hyperparameters, exchange
//! topology, and the seed-derivation scheme that makes runs reproducible.

use gfl_core::seed::{mix_seed, mix_seed_n};
use gfl_transport::NodeId;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RuntimeError};

/// Who exchanges weights with whom in the decentralized protocol.
///
/// Neighbor sets must be symmetric (every edge is known to both ends) and
/// the graph connected, otherwise parts of the cohort could never mix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    /// Every node exchanges with every other node.
    FullMesh,
    /// Node `k` exchanges with `k−1` and `k+1`, wrapping around.
    Ring,
    /// Explicit adjacency: `lists[k]` holds the neighbors of node `k`.
    Custom(Vec<Vec<NodeId>>),
}

impl Topology {
    /// The neighbor set of `node` in a cohort of `clients` nodes, sorted
    /// ascending and never containing `node` itself.
    pub fn neighbors(&self, node: NodeId, clients: u32) -> Vec<NodeId> {
        match self {
            Topology::FullMesh => (0..clients).filter(|&p| p != node).collect(),
            Topology::Ring => {
                if clients <= 1 {
                    return Vec::new();
                }
                let prev = (node + clients - 1) % clients;
                let next = (node + 1) % clients;
                let mut out = vec![prev, next];
                out.sort_unstable();
                out.dedup(); // clients == 2 makes prev == next
                out
            }
            Topology::Custom(lists) => {
                let mut out = lists
                    .get(node as usize)
                    .cloned()
                    .unwrap_or_default();
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }

    /// Check symmetry, connectivity, and id ranges for a cohort of
    /// `clients` nodes.
    pub fn validate(&self, clients: u32) -> Result<()> {
        if let Topology::Custom(lists) = self {
            if lists.len() != clients as usize {
                return Err(RuntimeError::Config(format!(
                    "topology lists {} nodes but the cohort has {clients}",
                    lists.len()
                )));
            }
        }
        let sets: Vec<Vec<NodeId>> = (0..clients).map(|k| self.neighbors(k, clients)).collect();
        for (k, set) in sets.iter().enumerate() {
            for &peer in set {
                if peer >= clients {
                    return Err(RuntimeError::Config(format!(
                        "node {k} lists neighbor {peer}, outside 0..{clients}"
                    )));
                }
                if peer as usize == k {
                    return Err(RuntimeError::Config(format!(
                        "node {k} lists itself as a neighbor"
                    )));
                }
                if !sets[peer as usize].contains(&(k as NodeId)) {
                    return Err(RuntimeError::Config(format!(
                        "asymmetric topology: {k} lists {peer} but not vice versa"
                    )));
                }
            }
        }
        // Connectivity by breadth-first sweep from node 0.
        if clients > 1 {
            let mut seen = vec![false; clients as usize];
            let mut frontier = vec![0u32];
            seen[0] = true;
            while let Some(node) = frontier.pop() {
                for &peer in &sets[node as usize] {
                    if !seen[peer as usize] {
                        seen[peer as usize] = true;
                        frontier.push(peer);
                    }
                }
            }
            if let Some(stranded) = seen.iter().position(|&s| !s) {
                return Err(RuntimeError::Config(format!(
                    "topology is disconnected: node {stranded} is unreachable from node 0"
                )));
            }
        }
        Ok(())
    }
}

/// Everything a federated run needs to know.
///
/// The same configuration drives both protocols; decentralized runs consult
/// `topology` and the self-inclusion flag, centralized runs the
/// participation fraction and the size-weighting flag.
#[derive(Debug, Clone, PartialEq)]
pub struct FlConfig {
    /// Number of data-holding client nodes, `K`. The coordination server
    /// takes id `K` on the wire.
    pub clients: u32,
    /// Global training rounds, `R`.
    pub rounds: u32,
    /// Local passes over each shard per round.
    pub local_epochs: u32,
    /// SGD step size for local training.
    pub learning_rate: f64,
    /// Mini-batch size for local training.
    pub batch_size: usize,
    /// Fraction of clients drawn into each round, in (0, 1]. The drawn
    /// subset has size `max(⌈fraction·K⌉, 1)`.
    pub participation: f64,
    /// Hidden width of the recurrent classifier.
    pub hidden_size: usize,
    /// Exchange graph for the decentralized protocol.
    pub topology: Topology,
    /// Decentralized averaging: when true a node averages its own update
    /// alongside its neighbors'; when false (the default) it averages
    /// neighbors only, which is the literal gossip rule.
    pub self_inclusive: bool,
    /// Centralized averaging: when true the server weights each update by
    /// its shard's row count instead of averaging uniformly.
    pub size_weighted: bool,
    /// How long any single protocol receive may block before the round is
    /// declared dead.
    pub round_timeout_secs: u64,
    /// Master seed; every stream of randomness in the run is derived from
    /// it by tagged hashing.
    pub seed: u64,
}

impl Default for FlConfig {
    /// The reference cohort shape: four clients, five rounds, fifty local
    /// epochs, everyone participating, full-mesh exchange.
    fn default() -> Self {
        FlConfig {
            clients: 4,
            rounds: 5,
            local_epochs: 50,
            learning_rate: 0.3,
            batch_size: 16,
            participation: 1.0,
            hidden_size: 16,
            topology: Topology::FullMesh,
            self_inclusive: false,
            size_weighted: false,
            round_timeout_secs: 120,
            seed: 0,
        }
    }
}

impl FlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clients == 0 {
            return Err(RuntimeError::Config("at least one client is required".into()));
        }
        if self.rounds == 0 {
            return Err(RuntimeError::Config("at least one round is required".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(RuntimeError::Config(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(RuntimeError::Config("batch size must be at least 1".into()));
        }
        if !(self.participation > 0.0 && self.participation <= 1.0) {
            return Err(RuntimeError::Config(format!(
                "participation fraction must lie in (0, 1], got {}",
                self.participation
            )));
        }
        if self.hidden_size == 0 {
            return Err(RuntimeError::Config("hidden size must be at least 1".into()));
        }
        if self.round_timeout_secs == 0 {
            return Err(RuntimeError::Config("round timeout must be positive".into()));
        }
        self.topology.validate(self.clients)
    }

    /// The server's wire id: one past the last client.
    pub fn server_id(&self) -> NodeId {
        self.clients
    }

    /// Size of each round's participant subset: `max(⌈fraction·K⌉, 1)`.
    pub fn participants_per_round(&self) -> u32 {
        let raw = (self.participation * f64::from(self.clients)).ceil() as u32;
        raw.clamp(1, self.clients)
    }

    /// The participant subset for `round` (1-based), sorted ascending.
    /// Deterministic in the master seed; a fresh draw every round.
    pub fn select_participants(&self, round: u32) -> Vec<NodeId> {
        let take = self.participants_per_round() as usize;
        let mut ids: Vec<NodeId> = (0..self.clients).collect();
        if take < ids.len() {
            let mut rng =
                ChaCha8Rng::seed_from_u64(mix_seed_n(self.seed, "round-participants", u64::from(round)));
            ids.shuffle(&mut rng);
            ids.truncate(take);
            ids.sort_unstable();
        }
        ids
    }

    /// Seed for the classifier's initial weights.
    pub fn model_init_seed(&self) -> u64 {
        mix_seed(self.seed, "model-init")
    }

    /// Seed for node `node`'s local pass in `round`. Shared by both
    /// protocols so that runs over the same shards follow identical
    /// optimization paths.
    pub fn train_seed(&self, node: NodeId, round: u32) -> u64 {
        train_seed(self.seed, node, round)
    }
}

/// Tagged derivation of a local-training seed from the master seed.
pub fn train_seed(master: u64, node: NodeId, round: u32) -> u64 {
    let packed = (u64::from(node) << 32) | u64::from(round);
    mix_seed_n(master, "local-train", packed)
}

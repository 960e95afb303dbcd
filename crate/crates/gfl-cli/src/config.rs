//! Run configuration: defaults, the flat `key = value` config file, and
//! the derivation of per-stage seeds from the master seed.

use std::fmt;
use std::path::PathBuf;

use gfl_core::gan::GanConfig;
use gfl_core::data::SplitStrategy;
use gfl_core::seed::mix_seed;
use gfl_runtime::{FlConfig, PowerRates, Topology};
use gfl_transport::SimNetConfig;

use crate::error::{CliError, Result};

/// Which transport carries the training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    /// Deterministic in-process network with a virtual clock.
    Sim,
    /// Real sockets over localhost.
    Tcp,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Sim => write!(f, "sim"),
            Backend::Tcp => write!(f, "tcp"),
        }
    }
}

/// Everything a run needs, resolvable from defaults, a config file, and
/// flag overrides, in that order.
///
/// Every stage derives its own random stream from the master seed as
/// `hash(master, stage-name)`, so one seed pins the whole pipeline while
/// stages stay independent.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Master seed.
    pub seed: u64,
    /// Output root; each run writes under `<out>/<run-id>/`.
    pub out: PathBuf,
    /// Fixed run directory name; defaults to `<unix-seconds>-s<seed>`.
    pub run_id: Option<String>,
    pub backend: Backend,
    /// Latency per model-bearing hop (training) or per full round trip
    /// (respond), in seconds.
    pub latency_secs: f64,
    /// Edge node draw, watts.
    pub edge_watts: f64,
    /// Cloud node draw, watts.
    pub cloud_watts: f64,
    /// Simulated cost of one parameter-op on an edge node, seconds.
    pub edge_sec_per_op: f64,
    /// Simulated cost of one parameter-op on the cloud node, seconds.
    pub cloud_sec_per_op: f64,

    /// Real corpus CSV; when absent, stages use the built-in surrogate.
    pub real_csv: Option<PathBuf>,
    /// Rows in the built-in surrogate corpus.
    pub surrogate_rows: usize,
    /// Rows `synth` writes.
    pub synth_rows: usize,

    pub gan_latent_dim: usize,
    pub gan_epochs: usize,
    pub gan_batch: usize,
    pub gan_learning_rate: f64,

    pub strategy: StrategyKind,
    pub concentration: f64,
    /// Rows held out as the shared test set.
    pub test_rows: usize,

    pub clients: u32,
    pub rounds: u32,
    pub local_epochs: u32,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub participation: f64,
    pub hidden_size: usize,
    pub topology: TopologyKind,
    pub self_inclusive: bool,
    pub size_weighted: bool,
    pub timeout_secs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyKind {
    Iid,
    LabelSkew,
    SizeSkew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TopologyKind {
    FullMesh,
    Ring,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: PathBuf::from("out"),
            run_id: None,
            backend: Backend::Sim,
            latency_secs: 0.005,
            edge_watts: 5.0,
            cloud_watts: 50.0,
            edge_sec_per_op: 1e-8,
            cloud_sec_per_op: 1e-9,
            real_csv: None,
            surrogate_rows: 1000,
            synth_rows: 10_000,
            gan_latent_dim: 16,
            gan_epochs: 200,
            gan_batch: 32,
            gan_learning_rate: 0.05,
            strategy: StrategyKind::Iid,
            concentration: 0.5,
            test_rows: 500,
            clients: 4,
            rounds: 5,
            local_epochs: 50,
            batch_size: 16,
            learning_rate: 0.3,
            participation: 1.0,
            hidden_size: 16,
            topology: TopologyKind::FullMesh,
            self_inclusive: false,
            size_weighted: false,
            timeout_secs: 120,
        }
    }
}

impl RunConfig {
    /// Parse a flat `key = value` file over the defaults. Blank lines and
    /// `#` comments are skipped; unknown keys are rejected.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config = RunConfig::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::validation(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    index + 1
                )));
            };
            config.set(key.trim(), value.trim()).map_err(|message| {
                CliError::validation(format!("{}:{}: {message}", path.display(), index + 1))
            })?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value.parse().map_err(|e| format!("bad value for {key}: {e}"))
        }

        match key {
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "run-id" => self.run_id = Some(value.to_string()),
            "backend" => {
                self.backend = match value {
                    "sim" => Backend::Sim,
                    "tcp" => Backend::Tcp,
                    other => return Err(format!("backend must be sim or tcp, got {other}")),
                }
            }
            "latency-secs" => self.latency_secs = parse(key, value)?,
            "edge-watts" => self.edge_watts = parse(key, value)?,
            "cloud-watts" => self.cloud_watts = parse(key, value)?,
            "edge-sec-per-op" => self.edge_sec_per_op = parse(key, value)?,
            "cloud-sec-per-op" => self.cloud_sec_per_op = parse(key, value)?,
            "data.real-csv" => self.real_csv = Some(PathBuf::from(value)),
            "data.surrogate-rows" => self.surrogate_rows = parse(key, value)?,
            "data.synth-rows" => self.synth_rows = parse(key, value)?,
            "gan.latent-dim" => self.gan_latent_dim = parse(key, value)?,
            "gan.epochs" => self.gan_epochs = parse(key, value)?,
            "gan.batch" => self.gan_batch = parse(key, value)?,
            "gan.learning-rate" => self.gan_learning_rate = parse(key, value)?,
            "partition.strategy" => {
                self.strategy = match value {
                    "iid" => StrategyKind::Iid,
                    "label-skew" => StrategyKind::LabelSkew,
                    "size-skew" => StrategyKind::SizeSkew,
                    other => {
                        return Err(format!(
                            "partition.strategy must be iid, label-skew, or size-skew, got {other}"
                        ))
                    }
                }
            }
            "partition.concentration" => self.concentration = parse(key, value)?,
            "partition.test-rows" => self.test_rows = parse(key, value)?,
            "fl.clients" => self.clients = parse(key, value)?,
            "fl.rounds" => self.rounds = parse(key, value)?,
            "fl.local-epochs" => self.local_epochs = parse(key, value)?,
            "fl.batch-size" => self.batch_size = parse(key, value)?,
            "fl.learning-rate" => self.learning_rate = parse(key, value)?,
            "fl.participation" => self.participation = parse(key, value)?,
            "fl.hidden-size" => self.hidden_size = parse(key, value)?,
            "fl.topology" => {
                self.topology = match value {
                    "full-mesh" => TopologyKind::FullMesh,
                    "ring" => TopologyKind::Ring,
                    other => return Err(format!("fl.topology must be full-mesh or ring, got {other}")),
                }
            }
            "fl.self-inclusive" => self.self_inclusive = parse(key, value)?,
            "fl.size-weighted" => self.size_weighted = parse(key, value)?,
            "fl.timeout-secs" => self.timeout_secs = parse(key, value)?,
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    /// The seed a named stage trains/draws with.
    pub fn stage_seed(&self, stage: &str) -> u64 {
        mix_seed(self.seed, stage)
    }

    pub fn fl_config(&self) -> FlConfig {
        FlConfig {
            clients: self.clients,
            rounds: self.rounds,
            local_epochs: self.local_epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            participation: self.participation,
            hidden_size: self.hidden_size,
            topology: match self.topology {
                TopologyKind::FullMesh => Topology::FullMesh,
                TopologyKind::Ring => Topology::Ring,
            },
            self_inclusive: self.self_inclusive,
            size_weighted: self.size_weighted,
            round_timeout_secs: self.timeout_secs,
            seed: self.stage_seed("fl"),
        }
    }

    pub fn gan_config(&self) -> GanConfig {
        GanConfig {
            latent_dim: self.gan_latent_dim,
            epochs: self.gan_epochs,
            batch_size: self.gan_batch,
            noise_batch: self.gan_batch,
            learning_rate: self.gan_learning_rate,
            seed: self.stage_seed("gan"),
        }
    }

    pub fn split_strategy(&self) -> SplitStrategy {
        match self.strategy {
            StrategyKind::Iid => SplitStrategy::Iid,
            StrategyKind::LabelSkew => SplitStrategy::LabelSkew {
                concentration: self.concentration,
            },
            StrategyKind::SizeSkew => SplitStrategy::SizeSkew {
                concentration: self.concentration,
            },
        }
    }

    pub fn sim_config(&self) -> SimNetConfig {
        SimNetConfig {
            link_latency_ns: (self.latency_secs * 1e9).round() as u64,
            control_latency_ns: 0,
            edge_sec_per_op: self.edge_sec_per_op,
            cloud_sec_per_op: self.cloud_sec_per_op,
        }
    }

    pub fn power_rates(&self) -> Result<PowerRates> {
        PowerRates::new(self.edge_watts, self.cloud_watts)
            .map_err(|e| CliError::validation(format!("bad power rates: {e}")))
    }
}

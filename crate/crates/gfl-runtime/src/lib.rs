//! Federated training runtime.
//!
//! This crate turns the model, data, and transport layers into complete
//! training runs. It provides:
//!
//! - [`run_cfl`]: the centralized protocol, where clients train locally
//!   and a server averages their updates into a global model each round;
//! - [`run_dfl`]: the decentralized protocol, where nodes exchange
//!   weights directly over a mesh after a one-time initialization;
//! - weight averaging ([`fedavg`], [`fedavg_weighted`], [`mesh_average`])
//!   and local mini-batch training ([`local_train`]);
//! - time and energy accounting ([`TimeLedger`], [`energy_cfl`],
//!   [`energy_dfl`]) plus closed-form cost prediction
//!   ([`predict_complexity`]);
//! - model evaluation ([`evaluate`]) and single-request response timing
//!   ([`respond`]).
//!
//! Both protocols run each party on its own thread over any
//! [`gfl_transport::Transport`], so the same code drives the virtual-time
//! simulator and real TCP sockets.

mod accounting;
mod cfl;
mod config;
mod dfl;
mod error;
mod eval;
mod fedavg;
mod logs;
mod protocol;
mod train;

pub use accounting::{
    energy_cfl, energy_dfl, predict_complexity, response_time, ComplexityCounters, CostModel,
    EnergyReport, LedgerEntry, LedgerRole, PowerRates, Protocol, TimeLedger,
};
pub use cfl::run_cfl;
pub use config::{FlConfig, Topology};
pub use dfl::run_dfl;
pub use error::{Result, RuntimeError};
pub use eval::{
    evaluate, respond, EvalOutcome, ResponseProfile, ResponseReport, CLOUD_ROUND_TRIP_SECS,
    DECISION_THRESHOLD, EDGE_ROUND_TRIP_SECS,
};
pub use fedavg::{fedavg, fedavg_weighted, mesh_average};
pub use logs::{loss_curve, NodeRoundStat, RoundLog};
pub use protocol::{GlobalModel, PersonalizedModel, RunOutcome};
pub use train::{local_train, LocalTrainOutcome};

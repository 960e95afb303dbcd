//! Time, energy, and work bookkeeping for federated runs.
//!
//! A run produces a [`TimeLedger`] of per-node, per-round durations; this
//! module turns ledgers into wall-time totals and energy figures under
//! configurable power rates, and predicts the abstract operation counts a
//! run should incur from its shape alone.

use gfl_transport::NodeId;

use crate::error::{Result, RuntimeError};

/// Which protocol a ledger or report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Clients train, one server averages.
    Centralized,
    /// Nodes train and average neighbor updates themselves.
    Decentralized,
}

/// Whose meter a ledger row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LedgerRole {
    /// A data-holding client node.
    Edge,
    /// The coordination server.
    Server,
}

/// One node's timed activity in one round, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub node: NodeId,
    pub round: u32,
    pub role: LedgerRole,
    /// Local training time.
    pub t_loc_secs: f64,
    /// Model-payload receive time.
    pub t_exc_secs: f64,
    /// Aggregation time.
    pub t_agg_secs: f64,
}

impl LedgerEntry {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_loc", self.t_loc_secs),
            ("t_exc", self.t_exc_secs),
            ("t_agg", self.t_agg_secs),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(RuntimeError::Accounting(format!(
                    "{name} must be finite and non-negative, got {v} (node {}, round {})",
                    self.node, self.round
                )));
            }
        }
        Ok(())
    }

    fn total_secs(&self) -> f64 {
        self.t_loc_secs + self.t_exc_secs + self.t_agg_secs
    }
}

/// The raw event log of a run: initialization time, every node's per-round
/// durations, and optionally one request/response stamp pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeLedger {
    /// Seconds spent distributing the initial model.
    pub t_in_secs: f64,
    /// One row per (node, round) that did any timed work.
    pub entries: Vec<LedgerEntry>,
    /// Clock reading when a prediction request left, if one was served.
    pub t_req_secs: Option<f64>,
    /// Clock reading when its response arrived.
    pub t_res_secs: Option<f64>,
}

impl TimeLedger {
    pub fn new() -> Self {
        TimeLedger::default()
    }

    /// Append one validated row.
    pub fn record(&mut self, entry: LedgerEntry) -> Result<()> {
        entry.validate()?;
        self.entries.push(entry);
        Ok(())
    }

    /// Add initialization time (accumulates across calls).
    pub fn add_init_secs(&mut self, secs: f64) -> Result<()> {
        if !secs.is_finite() || secs < 0.0 {
            return Err(RuntimeError::Accounting(format!(
                "initialization time must be finite and non-negative, got {secs}"
            )));
        }
        self.t_in_secs += secs;
        Ok(())
    }

    /// Fold another ledger into this one. Entries concatenate; the
    /// initialization times add; request stamps must not collide.
    pub fn merge(&mut self, other: TimeLedger) -> Result<()> {
        if (self.t_req_secs.is_some() && other.t_req_secs.is_some())
            || (self.t_res_secs.is_some() && other.t_res_secs.is_some())
        {
            return Err(RuntimeError::Accounting(
                "both ledgers carry request/response stamps; merging would drop one".into(),
            ));
        }
        self.t_in_secs += other.t_in_secs;
        self.entries.extend(other.entries);
        self.t_req_secs = self.t_req_secs.or(other.t_req_secs);
        self.t_res_secs = self.t_res_secs.or(other.t_res_secs);
        Ok(())
    }

    /// Total run time: initialization plus every node's training, exchange,
    /// and aggregation time across all rounds.
    pub fn total_fl_secs(&self) -> f64 {
        self.t_in_secs + self.entries.iter().map(LedgerEntry::total_secs).sum::<f64>()
    }

    fn entries_with_role(&self, role: LedgerRole) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(move |e| e.role == role)
    }
}

/// Draw of the two machine classes, in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRates {
    pub edge_watts: f64,
    pub cloud_watts: f64,
}

impl PowerRates {
    pub fn new(edge_watts: f64, cloud_watts: f64) -> Result<Self> {
        for (name, v) in [("edge", edge_watts), ("cloud", cloud_watts)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(RuntimeError::Accounting(format!(
                    "{name} power must be finite and positive, got {v}"
                )));
            }
        }
        Ok(PowerRates { edge_watts, cloud_watts })
    }
}

impl Default for PowerRates {
    /// Toolkit defaults, not measured values: a small edge board against a
    /// cloud server.
    fn default() -> Self {
        PowerRates { edge_watts: 5.0, cloud_watts: 50.0 }
    }
}

/// Energy attributed to each machine class over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub protocol: Protocol,
    pub edge_joules: f64,
    pub cloud_joules: f64,
    /// Always `edge_joules + cloud_joules`.
    pub total_joules: f64,
}

/// Energy of a centralized run.
///
/// Edge side: every client's training and receive time, at edge power.
/// Cloud side: initialization plus the server's receive and aggregation
/// time, at cloud power. The ledger must look centralized: clients never
/// aggregate and the server never trains.
pub fn energy_cfl(ledger: &TimeLedger, rates: &PowerRates) -> Result<EnergyReport> {
    for entry in ledger.entries_with_role(LedgerRole::Edge) {
        if entry.t_agg_secs != 0.0 {
            return Err(RuntimeError::Accounting(format!(
                "not a centralized ledger: edge node {} aggregated in round {}",
                entry.node, entry.round
            )));
        }
    }
    for entry in ledger.entries_with_role(LedgerRole::Server) {
        if entry.t_loc_secs != 0.0 {
            return Err(RuntimeError::Accounting(format!(
                "not a centralized ledger: the server trained in round {}",
                entry.round
            )));
        }
    }
    let edge_secs: f64 = ledger
        .entries_with_role(LedgerRole::Edge)
        .map(|e| e.t_loc_secs + e.t_exc_secs)
        .sum();
    let server_secs: f64 = ledger
        .entries_with_role(LedgerRole::Server)
        .map(|e| e.t_exc_secs + e.t_agg_secs)
        .sum();
    let edge_joules = edge_secs * rates.edge_watts;
    let cloud_joules = (ledger.t_in_secs + server_secs) * rates.cloud_watts;
    Ok(EnergyReport {
        protocol: Protocol::Centralized,
        edge_joules,
        cloud_joules,
        total_joules: edge_joules + cloud_joules,
    })
}

/// Energy of a decentralized run.
///
/// The cloud only pays for initialization; everything else — training,
/// exchange, and per-node aggregation — happens on the edge. A ledger with
/// server activity rows is not decentralized.
pub fn energy_dfl(ledger: &TimeLedger, rates: &PowerRates) -> Result<EnergyReport> {
    if let Some(entry) = ledger.entries_with_role(LedgerRole::Server).next() {
        return Err(RuntimeError::Accounting(format!(
            "not a decentralized ledger: the server shows activity in round {}",
            entry.round
        )));
    }
    let edge_secs: f64 = ledger.entries.iter().map(LedgerEntry::total_secs).sum();
    let edge_joules = edge_secs * rates.edge_watts;
    let cloud_joules = ledger.t_in_secs * rates.cloud_watts;
    Ok(EnergyReport {
        protocol: Protocol::Decentralized,
        edge_joules,
        cloud_joules,
        total_joules: edge_joules + cloud_joules,
    })
}

/// Time between a prediction request and its response, in seconds.
pub fn response_time(t_req_secs: f64, t_res_secs: f64) -> Result<f64> {
    if !t_req_secs.is_finite() || !t_res_secs.is_finite() {
        return Err(RuntimeError::Accounting(format!(
            "timestamps must be finite, got request {t_req_secs} / response {t_res_secs}"
        )));
    }
    if t_res_secs < t_req_secs {
        return Err(RuntimeError::Accounting(format!(
            "response stamp {t_res_secs} precedes request stamp {t_req_secs}"
        )));
    }
    Ok(t_res_secs - t_req_secs)
}

/// Abstract work performed during a run. One transmit unit is one
/// serialized weight scalar put on a link; one op is one parameter touched
/// by training, generation, or averaging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComplexityCounters {
    pub gan_ops: u64,
    pub local_train_ops: u64,
    pub transmit_units: u64,
    pub aggregate_ops: u64,
}

impl ComplexityCounters {
    pub fn new() -> Self {
        ComplexityCounters::default()
    }

    pub fn merge(&mut self, other: &ComplexityCounters) {
        self.gan_ops += other.gan_ops;
        self.local_train_ops += other.local_train_ops;
        self.transmit_units += other.transmit_units;
        self.aggregate_ops += other.aggregate_ops;
    }
}

/// The shape of a run, for closed-form work prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    pub protocol: Protocol,
    /// Parameters in the exchanged model, `|ω|`.
    pub params: u64,
    /// Global rounds.
    pub rounds: u64,
    /// Local epochs per round.
    pub local_epochs: u64,
    /// Mini-batch size for local training.
    pub batch_size: u64,
    /// Rows per client shard; the length is the client count.
    pub shard_rows: Vec<u64>,
    /// Neighbor count per node; consulted for decentralized runs only and
    /// must then match `shard_rows` in length.
    pub neighbor_counts: Vec<u64>,
    /// Generator-training shape, all zero when no synthesis ran: epochs,
    /// rows, batch size, and combined generator+discriminator parameters.
    pub gan_epochs: u64,
    pub gan_rows: u64,
    pub gan_batch: u64,
    pub gan_params: u64,
}

/// Predict the counter values a run of this shape incurs.
///
/// Synthesis: `epochs · ⌈rows/batch⌉ · params`. Local training:
/// `params · ⌈rows_k/batch⌉ · epochs · rounds` summed over clients.
/// Centralized exchange: every round moves one update per client up and
/// one global back, so `(K+1) · params · rounds` transmit units and
/// `K · params · rounds` aggregation ops. Decentralized exchange: node `k`
/// sends its update to each of its `N_k` neighbors and averages the `N_k`
/// it receives, so both counters sum `N_k · params · rounds` over nodes.
pub fn predict_complexity(model: &CostModel) -> Result<ComplexityCounters> {
    if model.shard_rows.is_empty() {
        return Err(RuntimeError::Usage("a run needs at least one client shard".into()));
    }
    if model.batch_size == 0 && model.shard_rows.iter().any(|&r| r > 0) {
        return Err(RuntimeError::Usage("batch size must be at least 1".into()));
    }
    if model.gan_rows > 0 && model.gan_batch == 0 {
        return Err(RuntimeError::Usage("synthesis batch size must be at least 1".into()));
    }

    let gan_ops = if model.gan_rows > 0 {
        model.gan_epochs * model.gan_rows.div_ceil(model.gan_batch) * model.gan_params
    } else {
        0
    };

    let local_train_ops: u64 = model
        .shard_rows
        .iter()
        .map(|&rows| {
            let batches = if rows == 0 { 0 } else { rows.div_ceil(model.batch_size) };
            model.params * batches * model.local_epochs * model.rounds
        })
        .sum();

    let clients = model.shard_rows.len() as u64;
    let (transmit_units, aggregate_ops) = match model.protocol {
        Protocol::Centralized => (
            (clients * model.params + model.params) * model.rounds,
            model.params * model.rounds * clients,
        ),
        Protocol::Decentralized => {
            if model.neighbor_counts.len() != model.shard_rows.len() {
                return Err(RuntimeError::Usage(format!(
                    "{} neighbor counts for {} shards",
                    model.neighbor_counts.len(),
                    model.shard_rows.len()
                )));
            }
            let per_node: u64 = model
                .neighbor_counts
                .iter()
                .map(|&n| n * model.params * model.rounds)
                .sum();
            (per_node, per_node)
        }
    };

    Ok(ComplexityCounters {
        gan_ops,
        local_train_ops,
        transmit_units,
        aggregate_ops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(node: NodeId, round: u32, role: LedgerRole, loc: f64, exc: f64, agg: f64) -> LedgerEntry {
        LedgerEntry {
            node,
            round,
            role,
            t_loc_secs: loc,
            t_exc_secs: exc,
            t_agg_secs: agg,
        }
    }

    #[test]
    fn empty_ledger_has_zero_total_time() {
        assert_eq!(TimeLedger::new().total_fl_secs(), 0.0);
    }

    #[test]
    fn total_time_sums_all_four_phases() {
        let mut ledger = TimeLedger::new();
        ledger.add_init_secs(1.0).unwrap();
        ledger.record(entry(0, 1, LedgerRole::Edge, 2.0, 3.0, 0.0)).unwrap();
        ledger.record(entry(4, 1, LedgerRole::Server, 0.0, 0.0, 4.0)).unwrap();
        assert_eq!(ledger.total_fl_secs(), 10.0);
    }

    #[test]
    fn ledger_rejects_negative_and_nonfinite_durations() {
        let mut ledger = TimeLedger::new();
        assert!(ledger.record(entry(0, 1, LedgerRole::Edge, -1.0, 0.0, 0.0)).is_err());
        assert!(ledger.record(entry(0, 1, LedgerRole::Edge, 0.0, f64::NAN, 0.0)).is_err());
        assert!(ledger.add_init_secs(-0.5).is_err());
        assert!(ledger.entries.is_empty());
    }

    #[test]
    fn centralized_energy_matches_the_hand_fixture() {
        // One edge node, one round, 3 s of work at 1 W; 1 s of
        // initialization and 1 s of server work at 2 W → 3 + 4 = 7 J.
        let mut ledger = TimeLedger::new();
        ledger.add_init_secs(1.0).unwrap();
        ledger.record(entry(0, 1, LedgerRole::Edge, 2.0, 1.0, 0.0)).unwrap();
        ledger.record(entry(1, 1, LedgerRole::Server, 0.0, 0.5, 0.5)).unwrap();
        let report = energy_cfl(&ledger, &PowerRates::new(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(report.edge_joules, 3.0);
        assert_eq!(report.cloud_joules, 4.0);
        assert_eq!(report.total_joules, 7.0);
        assert_eq!(report.protocol, Protocol::Centralized);
    }

    #[test]
    fn decentralized_energy_matches_the_hand_fixture() {
        // 2 s of initialization at 1 W, one node with 5 s of total work at
        // 2 W → 2 + 10 = 12 J.
        let mut ledger = TimeLedger::new();
        ledger.add_init_secs(2.0).unwrap();
        ledger.record(entry(0, 1, LedgerRole::Edge, 3.0, 1.5, 0.5)).unwrap();
        let report = energy_dfl(&ledger, &PowerRates::new(2.0, 1.0).unwrap()).unwrap();
        assert_eq!(report.edge_joules, 10.0);
        assert_eq!(report.cloud_joules, 2.0);
        assert_eq!(report.total_joules, 12.0);
        assert_eq!(report.protocol, Protocol::Decentralized);
    }

    #[test]
    fn zero_ledgers_give_zero_energy() {
        let ledger = TimeLedger::new();
        let rates = PowerRates::default();
        assert_eq!(energy_cfl(&ledger, &rates).unwrap().total_joules, 0.0);
        assert_eq!(energy_dfl(&ledger, &rates).unwrap().total_joules, 0.0);
    }

    #[test]
    fn energy_is_linear_in_the_rates() {
        let mut ledger = TimeLedger::new();
        ledger.add_init_secs(0.25).unwrap();
        ledger.record(entry(0, 1, LedgerRole::Edge, 1.5, 0.5, 0.0)).unwrap();
        ledger.record(entry(2, 1, LedgerRole::Server, 0.0, 0.75, 0.125)).unwrap();
        let base = energy_cfl(&ledger, &PowerRates::new(3.0, 7.0).unwrap()).unwrap();
        for scale in [2.0, 5.0, 0.5] {
            let scaled =
                energy_cfl(&ledger, &PowerRates::new(3.0 * scale, 7.0 * scale).unwrap()).unwrap();
            assert!((scaled.total_joules - scale * base.total_joules).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_sums_agree_with_a_naive_recomputation() {
        // An independent pass over the raw rows, summed in a different
        // association order, lands within float-sum noise.
        let mut ledger = TimeLedger::new();
        ledger.add_init_secs(0.125).unwrap();
        for round in 1..=5u32 {
            for node in 0..4u32 {
                ledger
                    .record(entry(
                        node,
                        round,
                        LedgerRole::Edge,
                        0.1 * f64::from(node + round),
                        0.01 * f64::from(round),
                        0.0,
                    ))
                    .unwrap();
            }
            ledger
                .record(entry(4, round, LedgerRole::Server, 0.0, 0.04, 0.002))
                .unwrap();
        }
        let rates = PowerRates::new(5.0, 50.0).unwrap();
        let report = energy_cfl(&ledger, &rates).unwrap();

        let mut edge = 0.0;
        let mut cloud = ledger.t_in_secs * rates.cloud_watts;
        for e in &ledger.entries {
            match e.role {
                LedgerRole::Edge => edge += (e.t_loc_secs + e.t_exc_secs) * rates.edge_watts,
                LedgerRole::Server => cloud += (e.t_exc_secs + e.t_agg_secs) * rates.cloud_watts,
            }
        }
        assert!((report.edge_joules - edge).abs() < 1e-12);
        assert!((report.cloud_joules - cloud).abs() < 1e-12);

        let naive_total: f64 = ledger.t_in_secs
            + ledger
                .entries
                .iter()
                .map(|e| e.t_loc_secs + e.t_exc_secs + e.t_agg_secs)
                .sum::<f64>();
        assert!((ledger.total_fl_secs() - naive_total).abs() < 1e-12);
    }

    #[test]
    fn ledger_shape_mismatches_are_caught() {
        // An "edge node that aggregates" is not a centralized run…
        let mut ledger = TimeLedger::new();
        ledger.record(entry(0, 1, LedgerRole::Edge, 1.0, 0.0, 0.5)).unwrap();
        assert!(energy_cfl(&ledger, &PowerRates::default()).is_err());
        // …but is a perfectly fine decentralized one.
        assert!(energy_dfl(&ledger, &PowerRates::default()).is_ok());

        // A server row poisons a decentralized ledger.
        let mut ledger = TimeLedger::new();
        ledger.record(entry(4, 1, LedgerRole::Server, 0.0, 1.0, 1.0)).unwrap();
        assert!(energy_dfl(&ledger, &PowerRates::default()).is_err());
        // A training server poisons a centralized one.
        let mut ledger = TimeLedger::new();
        ledger.record(entry(4, 1, LedgerRole::Server, 1.0, 0.0, 0.0)).unwrap();
        assert!(energy_cfl(&ledger, &PowerRates::default()).is_err());
    }

    #[test]
    fn merged_ledgers_add_their_energy_contributions() {
        let rates = PowerRates::new(2.0, 3.0).unwrap();
        let mut a = TimeLedger::new();
        a.add_init_secs(1.0).unwrap();
        a.record(entry(0, 1, LedgerRole::Edge, 1.0, 0.5, 0.0)).unwrap();
        let mut b = TimeLedger::new();
        b.record(entry(1, 2, LedgerRole::Edge, 2.0, 0.25, 0.0)).unwrap();

        let ea = energy_cfl(&a, &rates).unwrap();
        let eb = energy_cfl(&b, &rates).unwrap();
        let mut merged = a.clone();
        merged.merge(b).unwrap();
        let em = energy_cfl(&merged, &rates).unwrap();
        assert!((em.edge_joules - (ea.edge_joules + eb.edge_joules)).abs() < 1e-12);
        assert!((em.cloud_joules - (ea.cloud_joules + eb.cloud_joules)).abs() < 1e-12);
    }

    #[test]
    fn power_rates_must_be_positive() {
        assert!(PowerRates::new(0.0, 1.0).is_err());
        assert!(PowerRates::new(1.0, -2.0).is_err());
        assert!(PowerRates::new(f64::INFINITY, 1.0).is_err());
        PowerRates::new(5.0, 50.0).unwrap();
    }

    #[test]
    fn response_time_is_the_stamp_difference() {
        assert_eq!(response_time(1.0, 1.0).unwrap(), 0.0);
        assert!((response_time(1.0, 1.67).unwrap() - 0.67).abs() < 1e-15);
        assert!(response_time(2.0, 1.0).is_err());
        assert!(response_time(f64::NAN, 1.0).is_err());
    }

    fn base_model() -> CostModel {
        CostModel {
            protocol: Protocol::Centralized,
            params: 10,
            rounds: 3,
            local_epochs: 2,
            batch_size: 4,
            shard_rows: vec![8, 8],
            neighbor_counts: vec![],
            gan_epochs: 0,
            gan_rows: 0,
            gan_batch: 0,
            gan_params: 0,
        }
    }

    #[test]
    fn zero_rounds_predict_zero_exchange_work() {
        let model = CostModel { rounds: 0, ..base_model() };
        let counts = predict_complexity(&model).unwrap();
        assert_eq!(counts.local_train_ops, 0);
        assert_eq!(counts.transmit_units, 0);
        assert_eq!(counts.aggregate_ops, 0);
    }

    #[test]
    fn centralized_aggregate_count_matches_the_hand_example() {
        // 2 clients · 3 rounds · 10 parameters = 60 averaged parameters.
        let counts = predict_complexity(&base_model()).unwrap();
        assert_eq!(counts.aggregate_ops, 60);
        // Exchange: 2 uploads + 1 broadcast per round: (2+1)·10·3 = 90.
        assert_eq!(counts.transmit_units, 90);
        // Local: 10 params · ⌈8/4⌉ batches · 2 epochs · 3 rounds per client.
        assert_eq!(counts.local_train_ops, 2 * (10 * 2 * 2 * 3));
    }

    #[test]
    fn decentralized_counts_sum_over_neighbor_degrees() {
        let model = CostModel {
            protocol: Protocol::Decentralized,
            neighbor_counts: vec![1, 1],
            ..base_model()
        };
        let counts = predict_complexity(&model).unwrap();
        // Each node sends to 1 neighbor and averages 1 update per round.
        assert_eq!(counts.transmit_units, 2 * 10 * 3);
        assert_eq!(counts.aggregate_ops, 2 * 10 * 3);

        let mismatched = CostModel {
            protocol: Protocol::Decentralized,
            neighbor_counts: vec![1],
            ..base_model()
        };
        assert!(predict_complexity(&mismatched).is_err());
    }

    #[test]
    fn synthesis_work_counts_batches_times_parameters() {
        let model = CostModel {
            gan_epochs: 5,
            gan_rows: 60,
            gan_batch: 16,
            gan_params: 100,
            ..base_model()
        };
        // ⌈60/16⌉ = 4 batches per epoch.
        assert_eq!(predict_complexity(&model).unwrap().gan_ops, 5 * 4 * 100);
    }

    #[test]
    fn predictions_scale_linearly_in_rounds() {
        let r1 = predict_complexity(&CostModel { rounds: 1, ..base_model() }).unwrap();
        let r2 = predict_complexity(&CostModel { rounds: 2, ..base_model() }).unwrap();
        let r4 = predict_complexity(&CostModel { rounds: 4, ..base_model() }).unwrap();
        for (a, b, factor) in [(&r1, &r2, 2), (&r1, &r4, 4)] {
            assert_eq!(b.local_train_ops, factor * a.local_train_ops);
            assert_eq!(b.transmit_units, factor * a.transmit_units);
            assert_eq!(b.aggregate_ops, factor * a.aggregate_ops);
        }
    }

    #[test]
    fn counter_merge_accumulates_every_field() {
        let mut total = ComplexityCounters::new();
        total.merge(&ComplexityCounters {
            gan_ops: 1,
            local_train_ops: 2,
            transmit_units: 3,
            aggregate_ops: 4,
        });
        total.merge(&ComplexityCounters {
            gan_ops: 10,
            local_train_ops: 20,
            transmit_units: 30,
            aggregate_ops: 40,
        });
        assert_eq!(
            total,
            ComplexityCounters {
                gan_ops: 11,
                local_train_ops: 22,
                transmit_units: 33,
                aggregate_ops: 44,
            }
        );
    }
}

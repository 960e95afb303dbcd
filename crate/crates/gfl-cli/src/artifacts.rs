//! Run directory layout and every file the toolkit writes or reads back:
//! checkpoints, round logs, ledgers, metric and energy reports.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use gfl_core::metrics::{ConfusionMatrix, MetricBundle};
use gfl_core::ModelWeights;
use gfl_runtime::{
    loss_curve, ComplexityCounters, EnergyReport, LedgerEntry, LedgerRole, PowerRates, RunOutcome,
    TimeLedger,
};
use gfl_transport::{decode_weights, encode_weights};

use crate::error::{CliError, Result, Stage};

/// One run's output tree: `<out>/<run-id>/{data,checkpoints,logs,reports}`.
pub struct RunDirs {
    pub root: PathBuf,
    pub data: PathBuf,
    pub checkpoints: PathBuf,
    pub logs: PathBuf,
    pub reports: PathBuf,
}

impl RunDirs {
    pub fn prepare(out: &Path, run_id: &str) -> Result<Self> {
        let root = out.join(run_id);
        let dirs = RunDirs {
            data: root.join("data"),
            checkpoints: root.join("checkpoints"),
            logs: root.join("logs"),
            reports: root.join("reports"),
            root,
        };
        for dir in [&dirs.data, &dirs.checkpoints, &dirs.logs, &dirs.reports] {
            std::fs::create_dir_all(dir).runtime("creating the run directory")?;
        }
        Ok(dirs)
    }
}

/// Default run id: wall-clock seconds and the master seed, so runs sort
/// chronologically and name their own reproduction recipe.
pub fn default_run_id(seed: u64) -> String {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{now}-s{seed}")
}

pub fn write_checkpoint(path: &Path, weights: &ModelWeights) -> Result<()> {
    let bytes = encode_weights(weights).runtime("encoding checkpoint")?;
    std::fs::write(path, bytes)
        .runtime(&format!("writing checkpoint {}", path.display()))
}

/// Read a checkpoint back. A corrupt file is the caller's problem, and
/// the error names the byte offset where decoding gave up.
pub fn read_checkpoint(path: &Path) -> Result<ModelWeights> {
    let bytes = std::fs::read(path)
        .validation(&format!("reading checkpoint {}", path.display()))?;
    decode_weights(&bytes).validation(&format!("decoding checkpoint {}", path.display()))
}

/// The hidden width implied by a classifier checkpoint.
pub fn hidden_size_of(weights: &ModelWeights) -> Result<usize> {
    let gate = weights.get("gru.uz").ok_or_else(|| {
        CliError::validation("checkpoint is not a classifier: no recurrent gate layer")
    })?;
    match gate.shape() {
        [h, w] if h == w => Ok(*h),
        other => Err(CliError::validation(format!(
            "checkpoint is not a classifier: recurrent gate has shape {other:?}"
        ))),
    }
}

fn open_csv(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).runtime(&format!("creating {}", path.display()))
}

fn finish_csv(mut writer: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    writer
        .flush()
        .runtime(&format!("writing {}", path.display()))
}

fn float(value: f64) -> String {
    format!("{value}")
}

fn option_float(value: Option<f64>) -> String {
    value.map(float).unwrap_or_default()
}

/// Optional metric: absent means the quantity is undefined for this
/// confusion matrix (a zero denominator), which is worth distinguishing
/// from a genuine zero.
fn metric(value: Option<f64>) -> String {
    value.map(float).unwrap_or_else(|| "undefined".into())
}

/// Per-round, per-node log: every duration the run charged, plus each
/// round's resulting global weight hash. Server rows carry no loss.
pub fn write_round_log(path: &Path, outcome: &RunOutcome) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record([
        "round",
        "node",
        "loss",
        "t_loc_secs",
        "t_exc_secs",
        "t_agg_secs",
        "weight_hash",
    ])
    .runtime("writing round log")?;
    for log in &outcome.round_logs {
        let hash = format!("{:016x}", log.global_hash);
        for stat in &log.node_stats {
            w.write_record([
                log.round.to_string(),
                stat.node.to_string(),
                option_float(stat.final_loss()),
                float(stat.t_loc_secs),
                float(stat.t_exc_secs),
                float(stat.t_agg_secs),
                hash.clone(),
            ])
            .runtime("writing round log")?;
        }
        for entry in &outcome.ledger.entries {
            if entry.role == LedgerRole::Server && entry.round == log.round {
                w.write_record([
                    log.round.to_string(),
                    entry.node.to_string(),
                    String::new(),
                    float(entry.t_loc_secs),
                    float(entry.t_exc_secs),
                    float(entry.t_agg_secs),
                    hash.clone(),
                ])
                .runtime("writing round log")?;
            }
        }
    }
    finish_csv(w, path)
}

pub fn write_loss_curve(path: &Path, outcome: &RunOutcome) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["round", "mean_final_loss"]).runtime("writing loss curve")?;
    for (index, loss) in loss_curve(&outcome.round_logs).iter().enumerate() {
        w.write_record([(index + 1).to_string(), option_float(*loss)])
            .runtime("writing loss curve")?;
    }
    finish_csv(w, path)
}

const LEDGER_HEADER: [&str; 8] = [
    "kind",
    "node",
    "round",
    "role",
    "t_loc_secs",
    "t_exc_secs",
    "t_agg_secs",
    "t_in_secs",
];

/// The full time ledger, re-loadable by `gfl report` for re-rating energy
/// under different power draws.
pub fn write_ledger(path: &Path, ledger: &TimeLedger) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(LEDGER_HEADER).runtime("writing ledger")?;
    w.write_record([
        "init".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        float(ledger.t_in_secs),
    ])
    .runtime("writing ledger")?;
    for entry in &ledger.entries {
        let role = match entry.role {
            LedgerRole::Edge => "edge",
            LedgerRole::Server => "server",
        };
        w.write_record([
            "entry".into(),
            entry.node.to_string(),
            entry.round.to_string(),
            role.into(),
            float(entry.t_loc_secs),
            float(entry.t_exc_secs),
            float(entry.t_agg_secs),
            String::new(),
        ])
        .runtime("writing ledger")?;
    }
    finish_csv(w, path)
}

pub fn read_ledger(path: &Path) -> Result<TimeLedger> {
    let mut reader = csv::Reader::from_path(path)
        .validation(&format!("opening ledger {}", path.display()))?;
    let header = reader
        .headers()
        .validation("reading ledger header")?
        .clone();
    if header.iter().ne(LEDGER_HEADER) {
        return Err(CliError::validation(format!(
            "{} is not a ledger file (unexpected header)",
            path.display()
        )));
    }
    let mut ledger = TimeLedger::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.validation("reading ledger")?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let parse = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|e| {
                CliError::validation(format!(
                    "{}: record {}: bad number `{}`: {e}",
                    path.display(),
                    index + 1,
                    field(i)
                ))
            })
        };
        match field(0) {
            "init" => {
                let t_in = parse(7)?;
                ledger
                    .add_init_secs(t_in)
                    .validation("restoring initialization time")?;
            }
            "entry" => {
                let role = match field(3) {
                    "edge" => LedgerRole::Edge,
                    "server" => LedgerRole::Server,
                    other => {
                        return Err(CliError::validation(format!(
                            "{}: record {}: unknown role `{other}`",
                            path.display(),
                            index + 1
                        )))
                    }
                };
                let entry = LedgerEntry {
                    node: field(1).parse().map_err(|e| {
                        CliError::validation(format!(
                            "{}: record {}: bad node: {e}",
                            path.display(),
                            index + 1
                        ))
                    })?,
                    round: field(2).parse().map_err(|e| {
                        CliError::validation(format!(
                            "{}: record {}: bad round: {e}",
                            path.display(),
                            index + 1
                        ))
                    })?,
                    role,
                    t_loc_secs: parse(4)?,
                    t_exc_secs: parse(5)?,
                    t_agg_secs: parse(6)?,
                };
                ledger.record(entry).validation("restoring ledger entry")?;
            }
            other => {
                return Err(CliError::validation(format!(
                    "{}: record {}: unknown kind `{other}`",
                    path.display(),
                    index + 1
                )))
            }
        }
    }
    Ok(ledger)
}

pub struct MetricsRow {
    pub label: String,
    pub metrics: MetricBundle,
    pub mean_loss: Option<f64>,
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["model", "accuracy", "precision", "recall", "f_score", "mean_loss"])
        .runtime("writing metrics")?;
    for row in rows {
        w.write_record([
            row.label.clone(),
            float(row.metrics.accuracy),
            metric(row.metrics.precision),
            metric(row.metrics.recall),
            metric(row.metrics.f_score),
            option_float(row.mean_loss),
        ])
        .runtime("writing metrics")?;
    }
    finish_csv(w, path)
}

pub fn write_confusions(path: &Path, rows: &[(String, ConfusionMatrix)]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["model", "true_pos", "false_pos", "false_neg", "true_neg"])
        .runtime("writing confusion matrices")?;
    for (label, cm) in rows {
        w.write_record([
            label.clone(),
            cm.true_pos.to_string(),
            cm.false_pos.to_string(),
            cm.false_neg.to_string(),
            cm.true_neg.to_string(),
        ])
        .runtime("writing confusion matrices")?;
    }
    finish_csv(w, path)
}

pub fn write_energy(
    path: &Path,
    report: &EnergyReport,
    rates: &PowerRates,
    t_fl_secs: f64,
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record([
        "protocol",
        "edge_watts",
        "cloud_watts",
        "t_fl_secs",
        "edge_joules",
        "cloud_joules",
        "total_joules",
    ])
    .runtime("writing energy report")?;
    w.write_record([
        format!("{:?}", report.protocol).to_lowercase(),
        float(rates.edge_watts),
        float(rates.cloud_watts),
        float(t_fl_secs),
        float(report.edge_joules),
        float(report.cloud_joules),
        float(report.total_joules),
    ])
    .runtime("writing energy report")?;
    finish_csv(w, path)
}

/// Measured operation counters next to the closed-form prediction.
pub fn write_counters(
    path: &Path,
    measured: &ComplexityCounters,
    predicted: &ComplexityCounters,
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["counter", "measured", "predicted"])
        .runtime("writing counters")?;
    let rows = [
        ("gan_ops", measured.gan_ops, predicted.gan_ops),
        ("local_train_ops", measured.local_train_ops, predicted.local_train_ops),
        ("transmit_units", measured.transmit_units, predicted.transmit_units),
        ("aggregate_ops", measured.aggregate_ops, predicted.aggregate_ops),
    ];
    for (name, m, p) in rows {
        w.write_record([name.to_string(), m.to_string(), p.to_string()])
            .runtime("writing counters")?;
    }
    finish_csv(w, path)
}

/// Served predictions with their timing, closed by a summary row holding
/// the mean response time.
pub fn write_responses(
    path: &Path,
    reports: &[gfl_runtime::ResponseReport],
    mean_resp_secs: f64,
) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record([
        "request",
        "prediction",
        "probability",
        "t_req_secs",
        "t_res_secs",
        "t_resp_secs",
    ])
    .runtime("writing responses")?;
    for (index, report) in reports.iter().enumerate() {
        w.write_record([
            index.to_string(),
            report.prediction.to_string(),
            float(report.probability),
            float(report.t_req_secs),
            float(report.t_res_secs),
            float(report.t_resp_secs),
        ])
        .runtime("writing responses")?;
    }
    w.write_record([
        "mean".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        float(mean_resp_secs),
    ])
    .runtime("writing responses")?;
    finish_csv(w, path)
}

pub fn write_fidelity(path: &Path, scores: &[(String, f64)]) -> Result<()> {
    let mut w = open_csv(path)?;
    w.write_record(["column", "histogram_intersection"])
        .runtime("writing fidelity report")?;
    for (column, score) in scores {
        w.write_record([column.clone(), float(*score)])
            .runtime("writing fidelity report")?;
    }
    finish_csv(w, path)
}

//! `gfl respond`: serve prediction requests from a checkpoint and report
//! response times on the simulated clock.

use std::path::PathBuf;

use gfl_core::data::{load_csv, FeatureSchema};
use gfl_core::GruClassifier;
use gfl_runtime::{respond, ResponseProfile};
use gfl_transport::{SimNet, SimNetConfig};

use crate::artifacts::{self, RunDirs};
use crate::error::{classify_run, CliError, Result, Stage};

/// Where the model is deployed, which fixes the request's round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProfileKind {
    /// Served from the network edge, close to the requester.
    Edge,
    /// Served from a remote cloud API.
    Cloud,
}

#[derive(Debug, clap::Args)]
pub struct RespondArgs {
    /// Checkpoint to serve.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV of request rows (same schema as the training data).
    #[arg(long)]
    pub requests: PathBuf,
    /// Deployment profile. An explicit --latency overrides it.
    #[arg(long, value_enum, default_value = "edge")]
    pub profile: ProfileKind,
}

pub fn run(args: &RespondArgs, dirs: &RunDirs, latency_override: Option<f64>) -> Result<()> {
    let weights = artifacts::read_checkpoint(&args.model)?;
    let hidden = artifacts::hidden_size_of(&weights)?;

    let requests = load_csv(&args.requests, &FeatureSchema::heart())
        .validation(&format!("loading {}", args.requests.display()))?;
    if requests.is_empty() {
        return Err(CliError::validation(format!(
            "{} holds no request rows",
            args.requests.display()
        )));
    }
    let scaled = super::scale(&requests)?;
    let input = scaled.rows[0].len();
    let model = GruClassifier::from_weights(input, hidden, weights)
        .validation("matching the checkpoint to the requests")?;

    let profile = match latency_override {
        Some(secs) => ResponseProfile::RoundTrip(secs),
        None => match args.profile {
            ProfileKind::Edge => ResponseProfile::Edge,
            ProfileKind::Cloud => ResponseProfile::CloudOnly,
        },
    };

    // One node, one clock: requests are served back to back, so the
    // stamps accumulate and each response time stays exact.
    let net = SimNet::new(1, SimNetConfig::default());
    let mut endpoint = net.endpoint(0).runtime("setting up the serving clock")?;
    let mut reports = Vec::with_capacity(scaled.rows.len());
    for row in &scaled.rows {
        let report = respond(&model, row, &mut endpoint, profile)
            .map_err(|e| classify_run(e, "serving a request"))?;
        reports.push(report);
    }
    let mean_resp =
        reports.iter().map(|r| r.t_resp_secs).sum::<f64>() / reports.len() as f64;

    let path = dirs.reports.join("responses.csv");
    artifacts::write_responses(&path, &reports, mean_resp)?;
    println!(
        "served {} requests at a {} s round trip; mean response time {} s",
        reports.len(),
        profile.round_trip_secs(),
        mean_resp
    );
    println!("wrote {}", path.display());
    Ok(())
}

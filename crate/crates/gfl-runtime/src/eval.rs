//! Model evaluation and request serving.

use gfl_core::data::ScaledDataset;
use gfl_core::metrics::{metrics_from, ConfusionMatrix, MetricBundle};
use gfl_core::{loss_bce, GruClassifier};
use gfl_transport::Transport;

use crate::accounting::response_time;
use crate::error::{Result, RuntimeError};

/// Classification threshold: probability at or above this predicts class 1.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// What an evaluation pass produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricBundle,
    /// Mean binary cross-entropy over the evaluated rows.
    pub mean_loss: f64,
}

/// Score `model` on every row of `data`.
pub fn evaluate(model: &GruClassifier, data: &ScaledDataset) -> Result<EvalOutcome> {
    if data.is_empty() {
        return Err(RuntimeError::Usage("cannot evaluate on an empty dataset".into()));
    }
    if data.rows.len() != data.labels.len() {
        return Err(RuntimeError::Usage(format!(
            "{} rows but {} labels",
            data.rows.len(),
            data.labels.len()
        )));
    }
    let probs = model.forward_batch(&data.rows)?;
    let confusion = ConfusionMatrix::from_probabilities(&probs, &data.labels, DECISION_THRESHOLD)?;
    let metrics = metrics_from(&confusion)?;
    Ok(EvalOutcome {
        confusion,
        metrics,
        mean_loss: loss_bce(&probs, &data.labels),
    })
}

/// Network profile for serving one prediction request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseProfile {
    /// Inference at the edge: one short client↔edge round trip.
    Edge,
    /// Inference behind a remote cloud API: a much longer round trip.
    CloudOnly,
    /// An explicit round-trip duration in seconds.
    RoundTrip(f64),
}

/// Representative edge-deployment round trip.
pub const EDGE_ROUND_TRIP_SECS: f64 = 0.67;
/// Representative cloud-deployment round trip.
pub const CLOUD_ROUND_TRIP_SECS: f64 = 2.5;

impl ResponseProfile {
    pub fn round_trip_secs(self) -> f64 {
        match self {
            ResponseProfile::Edge => EDGE_ROUND_TRIP_SECS,
            ResponseProfile::CloudOnly => CLOUD_ROUND_TRIP_SECS,
            ResponseProfile::RoundTrip(secs) => secs,
        }
    }
}

/// One served request: the answer and its timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseReport {
    /// Predicted class.
    pub prediction: u8,
    /// The model's raw probability for class 1.
    pub probability: f64,
    /// Clock reading when the request left, seconds.
    pub t_req_secs: f64,
    /// Clock reading when the response arrived, seconds.
    pub t_res_secs: f64,
    /// Their difference.
    pub t_resp_secs: f64,
}

/// Serve one prediction request over `endpoint`'s clock.
///
/// The profile's round trip is split around the forward pass: half the
/// latency carries the request in, half carries the answer back. On the
/// simulated backend the resulting response time is exact.
pub fn respond<T: Transport>(
    model: &GruClassifier,
    row: &[f64],
    endpoint: &mut T,
    profile: ResponseProfile,
) -> Result<ResponseReport> {
    let round_trip = profile.round_trip_secs();
    if !round_trip.is_finite() || round_trip < 0.0 {
        return Err(RuntimeError::Usage(format!(
            "round trip must be finite and non-negative, got {round_trip}"
        )));
    }
    let total_ns = (round_trip * 1e9).round() as u64;
    let request_ns = total_ns / 2;

    let t_req_secs = endpoint.now_ns() as f64 / 1e9;
    endpoint.pass_time(request_ns);
    let probability = model.forward(row)?;
    endpoint.pass_time(total_ns - request_ns);
    let t_res_secs = endpoint.now_ns() as f64 / 1e9;

    Ok(ResponseReport {
        prediction: u8::from(probability >= DECISION_THRESHOLD),
        probability,
        t_req_secs,
        t_res_secs,
        t_resp_secs: response_time(t_req_secs, t_res_secs)?,
    })
}

#[cfg(test)]
mod tests {
    use gfl_transport::{SimNet, SimNetConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn toy_data() -> ScaledDataset {
        ScaledDataset {
            rows: vec![
                vec![0.9, 0.8, 0.9],
                vec![0.8, 0.9, 0.8],
                vec![0.1, 0.2, 0.1],
                vec![0.2, 0.1, 0.2],
            ],
            labels: vec![1, 1, 0, 0],
        }
    }

    #[test]
    fn zeroed_model_predicts_half_everywhere() {
        // All-zero weights give probability exactly 0.5, which the
        // threshold maps to class 1 for every row.
        let model = GruClassifier::zeros(3, 4).unwrap();
        let out = evaluate(&model, &toy_data()).unwrap();
        assert_eq!(out.confusion.total(), 4);
        assert_eq!(out.confusion.true_pos, 2);
        assert_eq!(out.confusion.false_pos, 2);
        assert_eq!(out.metrics.accuracy, 0.5);
    }

    #[test]
    fn evaluation_is_deterministic_and_rejects_empty_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = GruClassifier::init(3, 4, &mut rng).unwrap();
        let a = evaluate(&model, &toy_data()).unwrap();
        let b = evaluate(&model, &toy_data()).unwrap();
        assert_eq!(a, b);

        let empty = ScaledDataset { rows: vec![], labels: vec![] };
        assert!(evaluate(&model, &empty).is_err());
    }

    #[test]
    fn zero_latency_response_takes_zero_virtual_time() {
        let net = SimNet::new(1, SimNetConfig::default());
        let mut endpoint = net.endpoint(0).unwrap();
        let model = GruClassifier::zeros(2, 2).unwrap();
        let report =
            respond(&model, &[0.4, 0.6], &mut endpoint, ResponseProfile::RoundTrip(0.0)).unwrap();
        assert_eq!(report.t_resp_secs, 0.0);
        assert_eq!(report.probability, 0.5);
        assert_eq!(report.prediction, 1);
    }

    #[test]
    fn profile_round_trips_come_back_exactly() {
        let net = SimNet::new(1, SimNetConfig::default());
        let mut endpoint = net.endpoint(0).unwrap();
        let model = GruClassifier::zeros(2, 2).unwrap();

        let edge = respond(&model, &[0.1, 0.9], &mut endpoint, ResponseProfile::Edge).unwrap();
        assert_eq!(edge.t_resp_secs, 0.67);

        let cloud =
            respond(&model, &[0.1, 0.9], &mut endpoint, ResponseProfile::CloudOnly).unwrap();
        assert_eq!(cloud.t_resp_secs, 2.5);

        // Stamps are cumulative on the shared clock: the second request
        // starts where the first ended.
        assert_eq!(cloud.t_req_secs, edge.t_res_secs);

        assert!(respond(
            &model,
            &[0.1, 0.9],
            &mut endpoint,
            ResponseProfile::RoundTrip(f64::NAN)
        )
        .is_err());
    }
}

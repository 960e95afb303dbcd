//! Local training: one node's optimization pass over its shard within a
//! round — the work that happens between receiving weights and sending
//! them back.

use gfl_core::data::ScaledDataset;
use gfl_core::{sgd_step, GruClassifier, SgdConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RuntimeError};

/// What a local pass produced: the trained model, its per-epoch loss
/// trajectory, and the abstract work performed.
#[derive(Debug)]
pub struct LocalTrainOutcome {
    pub model: GruClassifier,
    /// Row-weighted mean training loss per epoch; one entry per epoch.
    pub epoch_losses: Vec<f64>,
    /// Mini-batches per epoch: `⌈rows / batch_size⌉`.
    pub batches_per_epoch: u64,
    /// Abstract parameter-ops: parameters × batches × epochs. One op is
    /// one parameter touched by one optimizer step.
    pub ops: u64,
}

/// Run `epochs` passes of mini-batch SGD over `shard`, starting from
/// `model`.
///
/// Each epoch visits every row exactly once in a freshly shuffled order
/// (one seeded stream drives all epochs' shuffles), splits the order into
/// chunks of `batch_size` (the last chunk may be short), and applies one
/// SGD step per chunk. With `epochs == 0` the model comes back untouched
/// and the loss curve is empty.
pub fn local_train(
    model: GruClassifier,
    shard: &ScaledDataset,
    epochs: u32,
    batch_size: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<LocalTrainOutcome> {
    if shard.is_empty() {
        return Err(RuntimeError::Usage("cannot train on an empty shard".into()));
    }
    if shard.rows.len() != shard.labels.len() {
        return Err(RuntimeError::Usage(format!(
            "shard has {} rows but {} labels",
            shard.rows.len(),
            shard.labels.len()
        )));
    }
    if batch_size == 0 {
        return Err(RuntimeError::Usage("batch size must be at least 1".into()));
    }
    let sgd = SgdConfig::new(learning_rate)?;

    let rows = shard.rows.len();
    let batches_per_epoch = rows.div_ceil(batch_size) as u64;
    let params = model.weights().param_count() as u64;
    let input_size = model.input_size();
    let hidden_size = model.hidden_size();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..rows).collect();
    let mut current = model;
    let mut epoch_losses = Vec::with_capacity(epochs as usize);

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(batch_size) {
            let batch_rows: Vec<Vec<f64>> = chunk.iter().map(|&i| shard.rows[i].clone()).collect();
            let batch_labels: Vec<u8> = chunk.iter().map(|&i| shard.labels[i]).collect();
            let (grads, loss) = current.backward_batch(&batch_rows, &batch_labels)?;
            let stepped = sgd_step(current.weights(), &grads, sgd)?;
            current = GruClassifier::from_weights(input_size, hidden_size, stepped)?;
            loss_sum += loss * chunk.len() as f64;
        }
        epoch_losses.push(loss_sum / rows as f64);
    }

    Ok(LocalTrainOutcome {
        model: current,
        epoch_losses,
        batches_per_epoch,
        ops: params * batches_per_epoch * u64::from(epochs),
    })
}

#[cfg(test)]
mod tests {
    use gfl_core::ModelWeights;
    use rand::Rng;

    use super::*;

    /// A linearly separable toy shard: label 1 rows sit near 0.8, label 0
    /// rows near 0.2, in every feature.
    fn separable_shard(rows: usize, width: usize, seed: u64) -> ScaledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(rows);
        let mut labels = Vec::with_capacity(rows);
        for i in 0..rows {
            let label = (i % 2) as u8;
            let center = if label == 1 { 0.8 } else { 0.2 };
            data.push(
                (0..width)
                    .map(|_| center + rng.gen_range(-0.05..0.05))
                    .collect(),
            );
            labels.push(label);
        }
        ScaledDataset { rows: data, labels }
    }

    fn fresh_model(width: usize, hidden: usize, seed: u64) -> GruClassifier {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GruClassifier::init(width, hidden, &mut rng).unwrap()
    }

    #[test]
    fn zero_epochs_returns_the_model_untouched() {
        let shard = separable_shard(6, 3, 0);
        let model = fresh_model(3, 4, 1);
        let before: ModelWeights = model.weights().clone();
        let out = local_train(model, &shard, 0, 2, 0.1, 7).unwrap();
        assert_eq!(*out.model.weights(), before);
        assert!(out.epoch_losses.is_empty());
        assert_eq!(out.ops, 0);
    }

    #[test]
    fn one_epoch_on_one_row_equals_a_single_sgd_step() {
        let shard = ScaledDataset {
            rows: vec![vec![0.3, 0.9]],
            labels: vec![1],
        };
        let model = fresh_model(2, 3, 5);
        let (grads, _) = model.backward_batch(&shard.rows, &shard.labels).unwrap();
        let expect = sgd_step(model.weights(), &grads, SgdConfig::new(0.25).unwrap()).unwrap();

        let out = local_train(model, &shard, 1, 4, 0.25, 99).unwrap();
        assert_eq!(*out.model.weights(), expect);
        assert_eq!(out.epoch_losses.len(), 1);
        assert_eq!(out.batches_per_epoch, 1);
    }

    #[test]
    fn work_scales_with_batches_and_epochs() {
        let shard = separable_shard(5, 2, 3);
        let model = fresh_model(2, 2, 4);
        let params = model.weights().param_count() as u64;
        let out = local_train(model, &shard, 4, 2, 0.05, 11).unwrap();
        assert_eq!(out.batches_per_epoch, 3); // ⌈5/2⌉
        assert_eq!(out.ops, params * 3 * 4);
        assert_eq!(out.epoch_losses.len(), 4);
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let shard = separable_shard(10, 3, 8);
        let a = local_train(fresh_model(3, 4, 2), &shard, 3, 4, 0.1, 21).unwrap();
        let b = local_train(fresh_model(3, 4, 2), &shard, 3, 4, 0.1, 21).unwrap();
        assert_eq!(a.model.weights(), b.model.weights());
        assert_eq!(a.epoch_losses, b.epoch_losses);

        let c = local_train(fresh_model(3, 4, 2), &shard, 3, 4, 0.1, 22).unwrap();
        assert_ne!(a.model.weights(), c.model.weights(), "seed must matter");
    }

    #[test]
    fn loss_descends_on_a_separable_shard() {
        let shard = separable_shard(24, 3, 14);
        let model = fresh_model(3, 6, 9);
        let out = local_train(model, &shard, 50, 8, 0.01, 31).unwrap();
        // After the burn-in the curve should be non-increasing up to noise:
        // check the tail fifth against the curve at 20% in, and demand real
        // progress overall.
        let losses = &out.epoch_losses;
        let early = losses[losses.len() / 5];
        let late = *losses.last().unwrap();
        assert!(late <= early + 1e-9, "late {late} vs early {early}");
        assert!(late < losses[0], "no progress at all: {losses:?}");
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let empty = ScaledDataset { rows: vec![], labels: vec![] };
        assert!(local_train(fresh_model(2, 2, 0), &empty, 1, 2, 0.1, 0).is_err());

        let shard = separable_shard(4, 2, 0);
        assert!(local_train(fresh_model(2, 2, 0), &shard, 1, 0, 0.1, 0).is_err());
        assert!(local_train(fresh_model(2, 2, 0), &shard, 1, 2, f64::NAN, 0).is_err());

        let ragged = ScaledDataset {
            rows: vec![vec![0.1, 0.2]],
            labels: vec![],
        };
        assert!(local_train(fresh_model(2, 2, 0), &ragged, 1, 2, 0.1, 0).is_err());
    }
}

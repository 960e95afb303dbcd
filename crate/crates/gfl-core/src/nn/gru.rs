//! GRU binary classifier over fixed-width feature rows.
//!
//! A row of `input_size` features is consumed as a sequence of scalars, one
//! feature per step, through a single GRU layer of `hidden_size` units. A
//! linear head on the final hidden state, squashed through a sigmoid, yields
//! the positive-class probability.
//!
//! Per step, with scalar input `x_t` and previous hidden state `h`:
//!
//! ```text
//! z = sigmoid(wz x_t + Uz h + bz)          update gate
//! r = sigmoid(wr x_t + Ur h + br)          reset gate
//! c = tanh(wc x_t + Uc (r ⊙ h) + bc)       candidate state
//! h' = z ⊙ h + (1 - z) ⊙ c
//! ```
//!
//! Gradients come from full backpropagation through time, written out by
//! hand below and pinned by a finite-difference test over every parameter.

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::nn::dense::sigmoid;
use crate::nn::loss::{clamp_prob, loss_bce};
use crate::tensor::Tensor;
use crate::weights::ModelWeights;

/// Canonical layer order. Initialization samples, aggregation, and the wire
/// format all walk the layers in exactly this order.
const LAYER_ORDER: [&str; 11] = [
    "gru.wz", "gru.uz", "gru.bz", "gru.wr", "gru.ur", "gru.br", "gru.wc", "gru.uc", "gru.bc",
    "head.w", "head.b",
];

/// GRU classifier: dimensions plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GruClassifier {
    input_size: usize,
    hidden_size: usize,
    weights: ModelWeights,
}

/// Everything the backward pass needs from one forward pass.
struct StepCache {
    x: f64,
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    c: Vec<f64>,
}

struct ForwardCache {
    steps: Vec<StepCache>,
    h_last: Vec<f64>,
    prob: f64,
}

impl GruClassifier {
    /// Parameters drawn uniformly from `(-0.1, 0.1)`, in canonical layer
    /// order, so one seed yields one model.
    pub fn init<R: Rng>(input_size: usize, hidden_size: usize, rng: &mut R) -> Result<Self> {
        if input_size == 0 || hidden_size == 0 {
            return Err(CoreError::Usage(
                "input and hidden sizes must be non-zero".into(),
            ));
        }
        let mut model = GruClassifier::zeros(input_size, hidden_size)?;
        for (_, tensor) in model.weights.iter_mut() {
            for v in tensor.data_mut() {
                *v = rng.gen_range(-0.1..0.1);
            }
        }
        Ok(model)
    }

    /// All-zero parameters. Every gate then sits at its neutral point and
    /// the classifier outputs exactly 0.5 for any row.
    pub fn zeros(input_size: usize, hidden_size: usize) -> Result<Self> {
        if input_size == 0 || hidden_size == 0 {
            return Err(CoreError::Usage(
                "input and hidden sizes must be non-zero".into(),
            ));
        }
        let h = hidden_size;
        let mut weights = ModelWeights::new();
        for name in LAYER_ORDER {
            let tensor = match name {
                "gru.uz" | "gru.ur" | "gru.uc" => Tensor::zeros(&[h, h]),
                "head.b" => Tensor::zeros(&[1]),
                _ => Tensor::zeros(&[h]),
            };
            weights.push(name, tensor).expect("fresh name");
        }
        Ok(GruClassifier {
            input_size,
            hidden_size,
            weights,
        })
    }

    /// Rebuild a classifier from exported weights, checking every shape.
    pub fn from_weights(
        input_size: usize,
        hidden_size: usize,
        weights: ModelWeights,
    ) -> Result<Self> {
        let template = GruClassifier::zeros(input_size, hidden_size)?;
        template.weights.congruent_with(&weights)?;
        weights.check_finite("gru")?;
        Ok(GruClassifier {
            input_size,
            hidden_size,
            weights,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn weights(&self) -> &ModelWeights {
        &self.weights
    }

    pub fn into_weights(self) -> ModelWeights {
        self.weights
    }

    /// Replace the parameters with a congruent set.
    pub fn set_weights(&mut self, weights: ModelWeights) -> Result<()> {
        self.weights.congruent_with(&weights)?;
        self.weights = weights;
        Ok(())
    }

    /// Scalar parameters of a classifier with these dimensions:
    /// three gates of `h + h*h + h` each, plus the `h + 1` head.
    pub fn param_count(input_size: usize, hidden_size: usize) -> usize {
        let _ = input_size; // scalar-per-step input: width does not add parameters
        let h = hidden_size;
        3 * (h * h + 2 * h) + h + 1
    }

    /// Positive-class probability for one feature row.
    pub fn forward(&self, row: &[f64]) -> Result<f64> {
        Ok(self.forward_cached(row)?.prob)
    }

    /// Probabilities for a batch of rows.
    pub fn forward_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.forward(r)).collect()
    }

    fn forward_cached(&self, row: &[f64]) -> Result<ForwardCache> {
        if row.len() != self.input_size {
            return Err(CoreError::Shape(format!(
                "row width {} does not match classifier input {}",
                row.len(),
                self.input_size
            )));
        }
        let h_dim = self.hidden_size;
        let wz = self.weights.require("gru.wz")?;
        let uz = self.weights.require("gru.uz")?;
        let bz = self.weights.require("gru.bz")?;
        let wr = self.weights.require("gru.wr")?;
        let ur = self.weights.require("gru.ur")?;
        let br = self.weights.require("gru.br")?;
        let wc = self.weights.require("gru.wc")?;
        let uc = self.weights.require("gru.uc")?;
        let bc = self.weights.require("gru.bc")?;

        let mut h = vec![0.0; h_dim];
        let mut steps = Vec::with_capacity(row.len());
        for &x in row {
            let uz_h = uz.matvec(&h);
            let ur_h = ur.matvec(&h);
            let mut z = vec![0.0; h_dim];
            let mut r = vec![0.0; h_dim];
            for i in 0..h_dim {
                z[i] = sigmoid(wz.data()[i] * x + uz_h[i] + bz.data()[i]);
                r[i] = sigmoid(wr.data()[i] * x + ur_h[i] + br.data()[i]);
            }
            let rh: Vec<f64> = r.iter().zip(&h).map(|(&ri, &hi)| ri * hi).collect();
            let uc_rh = uc.matvec(&rh);
            let mut c = vec![0.0; h_dim];
            for i in 0..h_dim {
                c[i] = (wc.data()[i] * x + uc_rh[i] + bc.data()[i]).tanh();
            }
            let h_prev = h.clone();
            for i in 0..h_dim {
                h[i] = z[i] * h_prev[i] + (1.0 - z[i]) * c[i];
            }
            steps.push(StepCache {
                x,
                h_prev,
                z,
                r,
                c,
            });
        }

        let head_w = self.weights.require("head.w")?;
        let head_b = self.weights.require("head.b")?;
        let mut logit = head_b.data()[0];
        for (w, hv) in head_w.data().iter().zip(&h) {
            logit += w * hv;
        }
        Ok(ForwardCache {
            steps,
            h_last: h,
            prob: sigmoid(logit),
        })
    }

    /// Mean binary cross-entropy gradient over a batch, backpropagated
    /// through time. Returns `(gradients, mean loss)`; the gradients are
    /// congruent with `weights()`.
    pub fn backward_batch(&self, rows: &[Vec<f64>], labels: &[u8]) -> Result<(ModelWeights, f64)> {
        if rows.len() != labels.len() {
            return Err(CoreError::Usage(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(CoreError::Usage("cannot backpropagate an empty batch".into()));
        }
        let mut grads = GruClassifier::zeros(self.input_size, self.hidden_size)?.weights;
        let mut probs = Vec::with_capacity(rows.len());
        let scale = 1.0 / rows.len() as f64;
        for (row, &label) in rows.iter().zip(labels) {
            let cache = self.forward_cached(row)?;
            probs.push(cache.prob);
            self.accumulate_sample(&cache, label, scale, &mut grads)?;
        }
        let loss = loss_bce(&probs, labels);
        Ok((grads, loss))
    }

    /// Add `scale` times this sample's BCE gradient into `grads`.
    fn accumulate_sample(
        &self,
        cache: &ForwardCache,
        label: u8,
        scale: f64,
        grads: &mut ModelWeights,
    ) -> Result<()> {
        let h_dim = self.hidden_size;
        let uz = self.weights.require("gru.uz")?.clone();
        let ur = self.weights.require("gru.ur")?.clone();
        let uc = self.weights.require("gru.uc")?.clone();
        let head_w = self.weights.require("head.w")?.clone();

        // BCE through the sigmoid head: dL/dlogit = p - y. The clamp only
        // guards the loss value; the gradient uses the raw probability.
        let d_logit = clamp_prob(cache.prob) - f64::from(label);

        grads
            .get_mut("head.w")
            .expect("layer exists")
            .add_scaled(&cache.h_last, d_logit * scale);
        grads.get_mut("head.b").expect("layer exists").data_mut()[0] += d_logit * scale;

        let mut dh: Vec<f64> = head_w.data().iter().map(|&w| w * d_logit).collect();

        for step in cache.steps.iter().rev() {
            let StepCache { x, h_prev, z, r, c } = step;
            let rh: Vec<f64> = r.iter().zip(h_prev).map(|(&ri, &hi)| ri * hi).collect();

            // h' = z ⊙ h_prev + (1 - z) ⊙ c
            let mut da_z = vec![0.0; h_dim];
            let mut da_c = vec![0.0; h_dim];
            for i in 0..h_dim {
                let dz = dh[i] * (h_prev[i] - c[i]);
                let dc = dh[i] * (1.0 - z[i]);
                da_z[i] = dz * z[i] * (1.0 - z[i]);
                da_c[i] = dc * (1.0 - c[i] * c[i]);
            }

            let d_rh = uc.matvec_t(&da_c);
            let mut da_r = vec![0.0; h_dim];
            for i in 0..h_dim {
                let dr = d_rh[i] * h_prev[i];
                da_r[i] = dr * r[i] * (1.0 - r[i]);
            }

            grads
                .get_mut("gru.wc")
                .expect("layer exists")
                .add_scaled(&da_c, x * scale);
            grads
                .get_mut("gru.bc")
                .expect("layer exists")
                .add_scaled(&da_c, scale);
            grads
                .get_mut("gru.uc")
                .expect("layer exists")
                .add_outer(&da_c, &rh, scale);

            grads
                .get_mut("gru.wr")
                .expect("layer exists")
                .add_scaled(&da_r, x * scale);
            grads
                .get_mut("gru.br")
                .expect("layer exists")
                .add_scaled(&da_r, scale);
            grads
                .get_mut("gru.ur")
                .expect("layer exists")
                .add_outer(&da_r, h_prev, scale);

            grads
                .get_mut("gru.wz")
                .expect("layer exists")
                .add_scaled(&da_z, x * scale);
            grads
                .get_mut("gru.bz")
                .expect("layer exists")
                .add_scaled(&da_z, scale);
            grads
                .get_mut("gru.uz")
                .expect("layer exists")
                .add_outer(&da_z, h_prev, scale);

            let uz_back = uz.matvec_t(&da_z);
            let ur_back = ur.matvec_t(&da_r);
            for i in 0..h_dim {
                dh[i] = dh[i] * z[i] + uz_back[i] + ur_back[i] + d_rh[i] * r[i];
            }
        }
        Ok(())
    }

    /// Mean binary cross-entropy of the classifier over a batch.
    pub fn loss_batch(&self, rows: &[Vec<f64>], labels: &[u8]) -> Result<f64> {
        let probs = self.forward_batch(rows)?;
        Ok(loss_bce(&probs, labels))
    }
}

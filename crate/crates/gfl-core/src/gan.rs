//! Tabular GAN: a generator/discriminator pair trained adversarially on a
//! schema-conforming dataset, then sampled to synthesize new rows.
//!
//! Rows (features plus the binary target) are mapped into `[-1, 1]` per
//! column; the generator emits points of that cube through a `tanh` output
//! and the discriminator scores feature/target rows jointly, so synthetic
//! labels stay correlated with synthetic features. Training alternates one
//! plain SGD step on the discriminator with one on the generator per batch:
//!
//! ```text
//! loss_D = -(1/b) Σ [ln D(x_real) + ln(1 - D(G(n)))]
//! loss_G = -(1/b) Σ ln D(G(n))
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{FeatureSchema, Scaler, TabularDataset};
use crate::error::{CoreError, Result};
use crate::nn::dense::{Activation, DenseNet, DenseSpec};
use crate::nn::loss::clamp_prob;
use crate::seed::{mix_seed, mix_seed_n};
use crate::weights::{sgd_step, ModelWeights, SgdConfig};

/// Hidden widths shared by the generator and the discriminator.
const HIDDEN: [usize; 2] = [64, 32];

/// GAN training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GanConfig {
    /// Dimension of the generator's latent input.
    pub latent_dim: usize,
    /// Full passes over the real data.
    pub epochs: usize,
    /// Real rows per training batch.
    pub batch_size: usize,
    /// Noise vectors drawn per batch. Each real batch is paired one-to-one
    /// with a noise batch, so this must equal `batch_size`.
    pub noise_batch: usize,
    /// Plain SGD learning rate for both networks. Zero freezes both.
    pub learning_rate: f64,
    /// Seeds initialization, shuffling, and noise.
    pub seed: u64,
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(CoreError::Usage("latent_dim must be non-zero".into()));
        }
        if self.epochs == 0 {
            return Err(CoreError::Usage("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(CoreError::Usage("batch_size must be non-zero".into()));
        }
        if self.noise_batch != self.batch_size {
            return Err(CoreError::Usage(format!(
                "noise_batch ({}) must equal batch_size ({}): batches pair real and \
                 synthetic rows one-to-one",
                self.noise_batch, self.batch_size
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(CoreError::Usage(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// A generator/discriminator pair bound to a schema. `trained` flips once
/// [`train_gan`] has run; sampling an untrained pair is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct GanState {
    generator: DenseNet,
    discriminator: DenseNet,
    schema: FeatureSchema,
    latent_dim: usize,
    trained: bool,
}

impl GanState {
    /// Freshly initialized (untrained) networks for `schema`.
    pub fn init(schema: FeatureSchema, latent_dim: usize, seed: u64) -> Result<Self> {
        if latent_dim == 0 {
            return Err(CoreError::Usage("latent_dim must be non-zero".into()));
        }
        let width = schema.feature_count() + 1; // features plus target
        let gen_spec = DenseSpec::new(
            latent_dim,
            vec![
                (HIDDEN[0], Activation::Relu),
                (HIDDEN[1], Activation::Relu),
                (width, Activation::Tanh),
            ],
        )?;
        let dis_spec = DenseSpec::new(
            width,
            vec![
                (HIDDEN[0], Activation::Relu),
                (HIDDEN[1], Activation::Relu),
                (1, Activation::Sigmoid),
            ],
        )?;
        let mut rng_g = ChaCha8Rng::seed_from_u64(mix_seed(seed, "gan-init-generator"));
        let mut rng_d = ChaCha8Rng::seed_from_u64(mix_seed(seed, "gan-init-discriminator"));
        Ok(GanState {
            generator: DenseNet::init(gen_spec, &mut rng_g),
            discriminator: DenseNet::init(dis_spec, &mut rng_d),
            schema,
            latent_dim,
            trained: false,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn generator_weights(&self) -> &ModelWeights {
        self.generator.weights()
    }

    pub fn discriminator_weights(&self) -> &ModelWeights {
        self.discriminator.weights()
    }

    /// Scalar parameters across both networks.
    pub fn param_count(&self) -> usize {
        self.generator.weights().param_count() + self.discriminator.weights().param_count()
    }
}

/// Everything observed while training one batch.
///
/// The probabilities, the noise, and `loss_d` describe the discriminator
/// update; `loss_g` is the generator loss measured immediately after it on
/// a fresh noise draw.
#[derive(Debug, Clone, PartialEq)]
pub struct GanBatchTrace {
    pub epoch: usize,
    pub batch: usize,
    /// Discriminator outputs on the real rows of the batch.
    pub d_real: Vec<f64>,
    /// Discriminator outputs on the synthetic rows of the batch.
    pub d_fake: Vec<f64>,
    pub loss_d: f64,
    pub loss_g: f64,
    /// Latent vectors behind the batch's synthetic rows.
    pub noise: Vec<Vec<f64>>,
}

/// Trained state plus the full batch-by-batch trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GanTrainResult {
    pub state: GanState,
    pub trace: Vec<GanBatchTrace>,
    /// Abstract work performed: parameters touched per batch, summed over
    /// batches. Comparable against predicted complexity.
    pub ops: u64,
}

/// Draw `count` latent vectors of dimension `dim` from a standard normal.
pub fn sample_noise<R: Rng>(rng: &mut R, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

/// `-(1/b) Σ [ln d_real + ln(1 - d_fake)]` over paired batches.
pub fn discriminator_loss(d_real: &[f64], d_fake: &[f64]) -> Result<f64> {
    if d_real.is_empty() || d_real.len() != d_fake.len() {
        return Err(CoreError::Usage(format!(
            "discriminator loss pairs real and fake scores, got {} and {}",
            d_real.len(),
            d_fake.len()
        )));
    }
    let b = d_real.len() as f64;
    let sum: f64 = d_real
        .iter()
        .zip(d_fake)
        .map(|(&r, &f)| clamp_prob(r).ln() + (1.0 - clamp_prob(f)).ln())
        .sum();
    Ok(-sum / b)
}

/// `-(1/b) Σ ln d_fake`.
pub fn generator_loss(d_fake: &[f64]) -> Result<f64> {
    if d_fake.is_empty() {
        return Err(CoreError::Usage(
            "generator loss needs at least one score".into(),
        ));
    }
    let b = d_fake.len() as f64;
    Ok(-d_fake.iter().map(|&f| clamp_prob(f).ln()).sum::<f64>() / b)
}

/// Map a dataset row into the GAN's `[-1, 1]` cube (features then target).
fn to_gan_space(scaler: &Scaler, row: &[f64], label: u8) -> Result<Vec<f64>> {
    let mut out = scaler.scale_row(row)?;
    for v in &mut out {
        *v = 2.0 * *v - 1.0;
    }
    out.push(2.0 * f64::from(label) - 1.0);
    Ok(out)
}

/// Train a fresh GAN on `real`. Deterministic in `config.seed`.
pub fn train_gan(real: &TabularDataset, config: &GanConfig) -> Result<GanTrainResult> {
    config.validate()?;
    if real.is_empty() {
        return Err(CoreError::Usage("cannot train a GAN on an empty dataset".into()));
    }
    let mut state = GanState::init(real.schema().clone(), config.latent_dim, config.seed)?;
    let scaler = Scaler::new(real.schema().clone())
        .map_err(|e| CoreError::Usage(format!("schema cannot scale: {e}")))?;
    let scaled: Vec<Vec<f64>> = real
        .rows()
        .iter()
        .zip(real.labels())
        .map(|(row, &label)| to_gan_space(&scaler, row, label))
        .collect::<Result<_>>()?;

    let sgd = SgdConfig::new(config.learning_rate)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, "gan-train"));
    let mut trace = Vec::new();
    let mut ops = 0u64;
    let batch_params = state.param_count() as u64;

    for epoch in 0..config.epochs {
        let mut order: Vec<usize> = (0..scaled.len()).collect();
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        for (batch_no, chunk) in order.chunks(config.batch_size).enumerate() {
            let b = chunk.len();

            // Discriminator step on real rows versus fresh synthetic rows.
            let noise = sample_noise(&mut rng, b, config.latent_dim);
            let fakes: Vec<Vec<f64>> = noise
                .iter()
                .map(|n| state.generator.forward(n))
                .collect::<Result<_>>()?;

            let mut d_grads: Option<ModelWeights> = None;
            let mut d_real = Vec::with_capacity(b);
            let mut d_fake = Vec::with_capacity(b);
            for &i in chunk {
                let cache = state.discriminator.forward_cached(&scaled[i])?;
                let p = cache.output()[0];
                d_real.push(p);
                // d loss_D / d p_real = -1 / (b p)
                let dy = [-1.0 / (b as f64 * clamp_prob(p))];
                let (g, _) = state.discriminator.backward(&cache, &dy)?;
                d_grads = Some(accumulate(d_grads, g)?);
            }
            for fake in &fakes {
                let cache = state.discriminator.forward_cached(fake)?;
                let p = cache.output()[0];
                d_fake.push(p);
                // d loss_D / d p_fake = 1 / (b (1 - p))
                let dy = [1.0 / (b as f64 * (1.0 - clamp_prob(p)))];
                let (g, _) = state.discriminator.backward(&cache, &dy)?;
                d_grads = Some(accumulate(d_grads, g)?);
            }
            let loss_d = discriminator_loss(&d_real, &d_fake)?;
            let stepped = sgd_step(
                state.discriminator.weights(),
                &d_grads.expect("non-empty batch"),
                sgd,
            )?;
            state.discriminator.set_weights(stepped)?;

            // Generator step against the just-updated discriminator.
            let gen_noise = sample_noise(&mut rng, b, config.latent_dim);
            let mut g_grads: Option<ModelWeights> = None;
            let mut d_fake_after = Vec::with_capacity(b);
            for n in &gen_noise {
                let g_cache = state.generator.forward_cached(n)?;
                let d_cache = state.discriminator.forward_cached(g_cache.output())?;
                let p = d_cache.output()[0];
                d_fake_after.push(p);
                // d loss_G / d p = -1 / (b p), pushed through D into G.
                let dy = [-1.0 / (b as f64 * clamp_prob(p))];
                let (_, dx) = state.discriminator.backward(&d_cache, &dy)?;
                let (g, _) = state.generator.backward(&g_cache, &dx)?;
                g_grads = Some(accumulate(g_grads, g)?);
            }
            let loss_g = generator_loss(&d_fake_after)?;
            let stepped = sgd_step(
                state.generator.weights(),
                &g_grads.expect("non-empty batch"),
                sgd,
            )?;
            state.generator.set_weights(stepped)?;

            ops += batch_params;
            trace.push(GanBatchTrace {
                epoch,
                batch: batch_no,
                d_real,
                d_fake,
                loss_d,
                loss_g,
                noise,
            });
        }
    }

    state.generator.weights().check_finite("generator")?;
    state.discriminator.weights().check_finite("discriminator")?;
    state.trained = true;
    Ok(GanTrainResult { state, trace, ops })
}

/// Sample `count` schema-valid rows from a trained GAN. Deterministic in
/// `seed`. The generator's tanh output is mapped back through the schema:
/// continuous columns clamp into range, integer-coded columns round to a
/// legal code, and the final output's sign picks the binary target.
pub fn generate(state: &GanState, count: usize, seed: u64) -> Result<TabularDataset> {
    if !state.trained {
        return Err(CoreError::State(
            "GAN has not been trained; train it before sampling".into(),
        ));
    }
    let scaler = Scaler::new(state.schema.clone())
        .map_err(|e| CoreError::Usage(format!("schema cannot scale: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed_n(seed, "gan-generate", count as u64));
    let mut ds = TabularDataset::empty(state.schema.clone());
    let features = state.schema.feature_count();
    for _ in 0..count {
        let noise: Vec<f64> = (0..state.latent_dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let out = state.generator.forward(&noise)?;
        let mut row = Vec::with_capacity(features);
        for (idx, &t) in out.iter().take(features).enumerate() {
            row.push(scaler.unscale_value(idx, (t + 1.0) / 2.0));
        }
        let label = u8::from(out[features] >= 0.0);
        ds.push(row, label)
            .map_err(|e| CoreError::Usage(format!("generated row failed validation: {e}")))?;
    }
    Ok(ds)
}

fn accumulate(acc: Option<ModelWeights>, g: ModelWeights) -> Result<ModelWeights> {
    match acc {
        None => Ok(g),
        Some(sum) => sum.zip_map(&g, |a, b| a + b),
    }
}

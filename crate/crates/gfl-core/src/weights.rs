//! Named, ordered collections of model parameters.
//!
//! Every model in the workspace (GRU classifier, GAN generator and
//! discriminator) exposes its parameters as a [`ModelWeights`] value: an
//! ordered list of `(name, tensor)` layers. The order is part of the value's
//! identity. Aggregation, serialization, and optimizer steps all walk the
//! layers in this order, which is what makes cross-process results
//! reproducible byte for byte.

use crate::error::{CoreError, Result};
use crate::tensor::Tensor;

/// Ordered, named model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    layers: Vec<(String, Tensor)>,
}

impl ModelWeights {
    pub fn new() -> Self {
        ModelWeights { layers: Vec::new() }
    }

    /// Build from an explicit layer list, rejecting duplicate or empty names.
    pub fn from_layers(layers: Vec<(String, Tensor)>) -> Result<Self> {
        let mut w = ModelWeights::new();
        for (name, tensor) in layers {
            w.push(name, tensor)?;
        }
        Ok(w)
    }

    /// Append a layer. Names must be unique, non-empty, and at most 255
    /// bytes so they survive the wire format unchanged.
    pub fn push(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<()> {
        let name = name.into();
        if name.is_empty() {
            return Err(CoreError::Usage("layer name must be non-empty".into()));
        }
        if name.len() > 255 {
            return Err(CoreError::Usage(format!(
                "layer name '{}…' exceeds 255 bytes",
                &name[..32.min(name.len())]
            )));
        }
        if self.layers.iter().any(|(n, _)| n == &name) {
            return Err(CoreError::Usage(format!("duplicate layer name '{name}'")));
        }
        self.layers.push((name, tensor));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Total number of scalar parameters across all layers.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|(_, t)| t.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.layers.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor)> {
        self.layers.iter_mut().map(|(n, t)| (n.as_str(), t))
    }

    /// Layer by name, if present.
    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.layers.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.layers
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    /// Layer by name, or an error naming the missing layer.
    pub fn require(&self, name: &str) -> Result<&Tensor> {
        self.get(name)
            .ok_or_else(|| CoreError::Congruence(format!("missing layer '{name}'")))
    }

    /// Check that `other` has the same layer names, order, and shapes.
    pub fn congruent_with(&self, other: &ModelWeights) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(CoreError::Congruence(format!(
                "layer count mismatch: {} vs {}",
                self.layers.len(),
                other.layers.len()
            )));
        }
        for ((an, at), (bn, bt)) in self.layers.iter().zip(&other.layers) {
            if an != bn {
                return Err(CoreError::Congruence(format!(
                    "layer name mismatch: '{an}' vs '{bn}'"
                )));
            }
            if at.shape() != bt.shape() {
                return Err(CoreError::Congruence(format!(
                    "layer '{an}' shape mismatch: {:?} vs {:?}",
                    at.shape(),
                    bt.shape()
                )));
            }
        }
        Ok(())
    }

    /// Elementwise combination with a congruent weight set.
    pub fn zip_map<F>(&self, other: &ModelWeights, mut f: F) -> Result<ModelWeights>
    where
        F: FnMut(f64, f64) -> f64,
    {
        self.congruent_with(other)?;
        let layers = self
            .layers
            .iter()
            .zip(&other.layers)
            .map(|((name, a), (_, b))| {
                let data = a
                    .data()
                    .iter()
                    .zip(b.data())
                    .map(|(&x, &y)| f(x, y))
                    .collect();
                (
                    name.clone(),
                    Tensor::from_parts(a.shape().to_vec(), data).expect("congruent shapes"),
                )
            })
            .collect();
        Ok(ModelWeights { layers })
    }

    /// Elementwise transform of every parameter.
    pub fn map<F>(&self, mut f: F) -> ModelWeights
    where
        F: FnMut(f64) -> f64,
    {
        let layers = self
            .layers
            .iter()
            .map(|(name, t)| {
                let data = t.data().iter().map(|&v| f(v)).collect();
                (
                    name.clone(),
                    Tensor::from_parts(t.shape().to_vec(), data).expect("same shape"),
                )
            })
            .collect();
        ModelWeights { layers }
    }

    /// Largest absolute elementwise difference against a congruent set.
    pub fn max_abs_diff(&self, other: &ModelWeights) -> Result<f64> {
        self.congruent_with(other)?;
        let mut worst = 0.0f64;
        for ((_, a), (_, b)) in self.layers.iter().zip(&other.layers) {
            for (&x, &y) in a.data().iter().zip(b.data()) {
                worst = worst.max((x - y).abs());
            }
        }
        Ok(worst)
    }

    /// Error if any parameter is NaN or infinite.
    pub fn check_finite(&self, context: &str) -> Result<()> {
        for (name, t) in &self.layers {
            t.check_finite(&format!("{context}.{name}"))?;
        }
        Ok(())
    }
}

impl Default for ModelWeights {
    fn default() -> Self {
        ModelWeights::new()
    }
}

/// Plain SGD configuration. The learning rate must be finite and
/// non-negative; zero is allowed and makes the step a no-op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub learning_rate: f64,
}

impl SgdConfig {
    pub fn new(learning_rate: f64) -> Result<Self> {
        if !learning_rate.is_finite() || learning_rate < 0.0 {
            return Err(CoreError::Usage(format!(
                "learning rate must be finite and >= 0, got {learning_rate}"
            )));
        }
        Ok(SgdConfig { learning_rate })
    }
}

/// One plain SGD step: `w' = w - lr * g`, layer by layer.
///
/// `gradients` must be congruent with `weights`; the result is congruent
/// with both. With `lr == 0` the result equals `weights` exactly.
pub fn sgd_step(
    weights: &ModelWeights,
    gradients: &ModelWeights,
    config: SgdConfig,
) -> Result<ModelWeights> {
    weights.zip_map(gradients, |w, g| w - config.learning_rate * g)
}

//! Fully connected feed-forward networks.
//!
//! These back the GAN's generator and discriminator. Parameters live in a
//! [`ModelWeights`] (layers named `l0.w`, `l0.b`, `l1.w`, ... in order) so
//! the nets aggregate and serialize through the same machinery as the
//! classifier.

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::tensor::Tensor;
use crate::weights::ModelWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed in terms of the activation output `y`.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Layer widths and activations of a dense net: `input` features in, then
/// one `(width, activation)` entry per layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSpec {
    pub input: usize,
    pub layers: Vec<(usize, Activation)>,
}

impl DenseSpec {
    pub fn new(input: usize, layers: Vec<(usize, Activation)>) -> Result<Self> {
        if input == 0 || layers.is_empty() || layers.iter().any(|&(w, _)| w == 0) {
            return Err(CoreError::Usage(
                "dense spec needs a non-zero input width and non-empty non-zero layers".into(),
            ));
        }
        Ok(DenseSpec { input, layers })
    }

    pub fn output(&self) -> usize {
        self.layers.last().expect("non-empty").0
    }
}

/// A dense feed-forward network: a spec plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    spec: DenseSpec,
    weights: ModelWeights,
}

/// Per-layer activations recorded by [`DenseNet::forward_cached`], consumed
/// by [`DenseNet::backward`].
#[derive(Debug, Clone)]
pub struct DenseCache {
    /// `outputs[0]` is the input, `outputs[i + 1]` the output of layer `i`.
    outputs: Vec<Vec<f64>>,
}

impl DenseCache {
    pub fn output(&self) -> &[f64] {
        self.outputs.last().expect("at least the input")
    }
}

impl DenseNet {
    /// Initialize with uniform weights in `±sqrt(6 / (fan_in + fan_out))`
    /// and zero biases. Sampling order is fixed (layer by layer, row-major)
    /// so one seed always yields one network.
    pub fn init<R: Rng>(spec: DenseSpec, rng: &mut R) -> Self {
        let mut weights = ModelWeights::new();
        let mut fan_in = spec.input;
        for (i, &(width, _)) in spec.layers.iter().enumerate() {
            let limit = (6.0 / (fan_in + width) as f64).sqrt();
            let data: Vec<f64> = (0..width * fan_in)
                .map(|_| rng.gen_range(-limit..limit))
                .collect();
            let w = Tensor::matrix(width, fan_in, data).expect("sized buffer");
            weights.push(format!("l{i}.w"), w).expect("fresh name");
            weights
                .push(format!("l{i}.b"), Tensor::zeros(&[width]))
                .expect("fresh name");
            fan_in = width;
        }
        DenseNet { spec, weights }
    }

    /// All-zero parameters with the shapes `spec` dictates.
    pub fn zeros(spec: DenseSpec) -> Self {
        let mut weights = ModelWeights::new();
        let mut fan_in = spec.input;
        for (i, &(width, _)) in spec.layers.iter().enumerate() {
            weights
                .push(format!("l{i}.w"), Tensor::zeros(&[width, fan_in]))
                .expect("fresh name");
            weights
                .push(format!("l{i}.b"), Tensor::zeros(&[width]))
                .expect("fresh name");
            fan_in = width;
        }
        DenseNet { spec, weights }
    }

    /// Rebuild a net from previously exported weights, checking every shape.
    pub fn from_weights(spec: DenseSpec, weights: ModelWeights) -> Result<Self> {
        let template = DenseNet::zeros(spec.clone());
        template.weights.congruent_with(&weights)?;
        weights.check_finite("dense")?;
        Ok(DenseNet { spec, weights })
    }

    pub fn spec(&self) -> &DenseSpec {
        &self.spec
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

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut cache = self.forward_cached(input)?;
        Ok(cache.outputs.pop().expect("at least the input"))
    }

    pub fn forward_cached(&self, input: &[f64]) -> Result<DenseCache> {
        if input.len() != self.spec.input {
            return Err(CoreError::Shape(format!(
                "dense input width {} does not match spec {}",
                input.len(),
                self.spec.input
            )));
        }
        let mut outputs = Vec::with_capacity(self.spec.layers.len() + 1);
        outputs.push(input.to_vec());
        for (i, &(_, act)) in self.spec.layers.iter().enumerate() {
            let w = self.weights.require(&format!("l{i}.w"))?;
            let b = self.weights.require(&format!("l{i}.b"))?;
            let mut pre = w.matvec(outputs.last().expect("seeded"));
            for (p, bv) in pre.iter_mut().zip(b.data()) {
                *p = act.apply(*p + bv);
            }
            outputs.push(pre);
        }
        Ok(DenseCache { outputs })
    }

    /// Backpropagate `d_output` (gradient of the loss w.r.t. the net output)
    /// through a cached forward pass. Returns parameter gradients congruent
    /// with `weights()` and the gradient w.r.t. the input.
    pub fn backward(&self, cache: &DenseCache, d_output: &[f64]) -> Result<(ModelWeights, Vec<f64>)> {
        if d_output.len() != self.spec.output() {
            return Err(CoreError::Shape(format!(
                "output gradient width {} does not match spec {}",
                d_output.len(),
                self.spec.output()
            )));
        }
        let mut grads: Vec<(String, Tensor)> = Vec::with_capacity(self.spec.layers.len() * 2);
        let mut delta = d_output.to_vec();
        for (i, &(_, act)) in self.spec.layers.iter().enumerate().rev() {
            let out = &cache.outputs[i + 1];
            let inp = &cache.outputs[i];
            // d pre-activation = d output * act'(output)
            for (d, &y) in delta.iter_mut().zip(out) {
                *d *= act.derivative_from_output(y);
            }
            let mut gw = Tensor::zeros(&[out.len(), inp.len()]);
            gw.add_outer(&delta, inp, 1.0);
            let gb = Tensor::vector(delta.clone());
            let w = self.weights.require(&format!("l{i}.w"))?;
            delta = w.matvec_t(&delta);
            grads.push((format!("l{i}.b"), gb));
            grads.push((format!("l{i}.w"), gw));
        }
        grads.reverse();
        Ok((ModelWeights::from_layers(grads)?, delta))
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::weights::{sgd_step, SgdConfig};

    fn tiny_net() -> DenseNet {
        let spec = DenseSpec::new(
            2,
            vec![(3, Activation::Tanh), (1, Activation::Sigmoid)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        DenseNet::init(spec, &mut rng)
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let spec = DenseSpec::new(4, vec![(8, Activation::Relu), (1, Activation::Sigmoid)])
            .unwrap();
        let a = DenseNet::init(spec.clone(), &mut ChaCha8Rng::seed_from_u64(3));
        let b = DenseNet::init(spec.clone(), &mut ChaCha8Rng::seed_from_u64(3));
        let c = DenseNet::init(spec, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a.weights(), b.weights());
        assert!(a.weights().max_abs_diff(c.weights()).unwrap() > 0.0);
    }

    #[test]
    fn forward_rejects_wrong_input_width() {
        let net = tiny_net();
        assert!(net.forward(&[1.0]).is_err());
        assert!(net.forward(&[1.0, 2.0]).is_ok());
    }

    #[test]
    fn sigmoid_output_stays_in_unit_interval() {
        let net = tiny_net();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let y = net.forward(&x).unwrap()[0];
            assert!((0.0..=1.0).contains(&y));
        }
    }

    /// Central finite differences over every parameter, compared against the
    /// analytic gradients. Loss: squared error to a fixed target.
    #[test]
    fn backward_matches_finite_differences() {
        let net = tiny_net();
        let x = [0.3, -0.8];
        let target = 0.25;

        let loss = |net: &DenseNet| {
            let y = net.forward(&x).unwrap()[0];
            (y - target) * (y - target)
        };

        let cache = net.forward_cached(&x).unwrap();
        let y = cache.output()[0];
        let (grads, _) = net.backward(&cache, &[2.0 * (y - target)]).unwrap();

        let h = 1e-5;
        for (name, tensor) in net.weights().iter() {
            for idx in 0..tensor.len() {
                let mut plus = net.clone();
                plus.weights.get_mut(name).unwrap().data_mut()[idx] += h;
                let mut minus = net.clone();
                minus.weights.get_mut(name).unwrap().data_mut()[idx] -= h;
                let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let analytic = grads.get(name).unwrap().data()[idx];
                let denom = numeric.abs().max(analytic.abs()).max(1e-6);
                assert!(
                    ((numeric - analytic) / denom).abs() < 1e-4,
                    "{name}[{idx}]: numeric {numeric} vs analytic {analytic}"
                );
            }
        }
    }

    /// Same check for the input gradient, which the GAN uses to push
    /// discriminator feedback into the generator.
    #[test]
    fn input_gradient_matches_finite_differences() {
        let net = tiny_net();
        let x = [0.3, -0.8];
        let target = 0.9;

        let loss_at = |x: &[f64]| {
            let y = net.forward(x).unwrap()[0];
            (y - target) * (y - target)
        };

        let cache = net.forward_cached(&x).unwrap();
        let y = cache.output()[0];
        let (_, dx) = net.backward(&cache, &[2.0 * (y - target)]).unwrap();

        let h = 1e-5;
        for i in 0..x.len() {
            let mut plus = x;
            plus[i] += h;
            let mut minus = x;
            minus[i] -= h;
            let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
            let denom = numeric.abs().max(dx[i].abs()).max(1e-6);
            assert!(
                ((numeric - dx[i]) / denom).abs() < 1e-4,
                "x[{i}]: numeric {numeric} vs analytic {}",
                dx[i]
            );
        }
    }

    #[test]
    fn gradient_descent_reduces_squared_error() {
        let mut net = tiny_net();
        let x = [0.5, 0.5];
        let target = 0.8;
        let first = {
            let y = net.forward(&x).unwrap()[0];
            (y - target) * (y - target)
        };
        for _ in 0..200 {
            let cache = net.forward_cached(&x).unwrap();
            let y = cache.output()[0];
            let (grads, _) = net.backward(&cache, &[2.0 * (y - target)]).unwrap();
            let stepped = sgd_step(net.weights(), &grads, SgdConfig::new(0.5).unwrap()).unwrap();
            net.set_weights(stepped).unwrap();
        }
        let last = {
            let y = net.forward(&x).unwrap()[0];
            (y - target) * (y - target)
        };
        assert!(last < first * 0.01, "loss {first} -> {last}");
    }

    #[test]
    fn from_weights_rejects_incongruent_parameters() {
        let net = tiny_net();
        let other = DenseSpec::new(3, vec![(1, Activation::Sigmoid)]).unwrap();
        assert!(DenseNet::from_weights(other, net.weights().clone()).is_err());
        assert!(DenseNet::from_weights(net.spec().clone(), net.weights().clone()).is_ok());
    }
}

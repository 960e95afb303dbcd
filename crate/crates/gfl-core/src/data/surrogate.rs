//! Deterministic synthesis of a heart-screening style corpus.
//!
//! Clinical tabular datasets cannot be redistributed with this repository,
//! so the bundled corpus is drawn from a hand-built generative model whose
//! marginals track the published summary statistics of the usual heart
//! screening tables. A latent severity score drives the informative columns
//! and the diagnosis label, which makes the corpus genuinely learnable: a
//! classifier that recovers the severity signal from the features can
//! predict the label well, while pure noise cannot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dataset::TabularDataset;
use super::schema::FeatureSchema;
use super::Result;

/// Generate `count` rows under [`FeatureSchema::heart`], deterministically
/// in `seed`. Labels come out near 50/50.
pub fn synthesize_heart_corpus(count: usize, seed: u64) -> Result<TabularDataset> {
    let schema = FeatureSchema::heart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = TabularDataset::empty(schema);

    for _ in 0..count {
        // Latent severity: positive means a sicker profile.
        let z: f64 = rng.sample(StandardNormal);

        let age = tnorm(&mut rng, 55.0 + 2.0 * z, 5.8, 32.0, 76.0).round();
        let sex = f64::from(u8::from(rng.gen_bool(0.73)));
        let trestbps = tnorm(&mut rng, 131.0 + 4.0 * z, 16.0, 98.0, 200.0).round();
        let cp = code_from_latent(&mut rng, 1.4 * z, 0.9, 3);
        let chol = tnorm(&mut rng, 246.0 + 10.0 * z, 42.0, 126.0, 409.0).round();
        let oldpeak = (tnorm(&mut rng, 0.8 + 0.95 * z, 0.55, 0.0, 4.4) * 10.0).round() / 10.0;
        let restecg = if rng.gen_bool(0.985) {
            0.0
        } else {
            f64::from(rng.gen_range(1..=2))
        };
        let fbs = f64::from(u8::from(rng.gen_bool(0.01)));
        let exang = f64::from(u8::from(rng.gen_bool(logistic(-1.7 + 1.8 * z))));
        let thalach = tnorm(&mut rng, 158.0 - 14.0 * z, 15.0, 81.0, 199.0).round();
        let ca = binomial(&mut rng, 4, logistic(-1.9 + 1.5 * z));
        let thal = if rng.gen_bool(0.03) {
            f64::from(rng.gen_range(0..=1))
        } else if rng.gen_bool(logistic(-0.4 + 1.3 * z)) {
            3.0
        } else {
            2.0
        };
        let slope = if rng.gen_bool(0.07) {
            0.0
        } else {
            1.0 + f64::from(u8::from(rng.gen_bool(logistic(0.2 - 1.1 * z))))
        };

        let noise: f64 = rng.sample(StandardNormal);
        let label = u8::from(z + 0.25 * noise > 0.0);

        ds.push(
            vec![
                age, sex, trestbps, cp, chol, oldpeak, restecg, fbs, exang, thalach, ca, thal,
                slope,
            ],
            label,
        )?;
    }
    Ok(ds)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Normal draw clamped into `[lo, hi]`.
fn tnorm(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    (mean + sd * n).clamp(lo, hi)
}

/// Integer code in `0..=max` that rises monotonically with the latent
/// signal: a squashed noisy score picks the bucket.
fn code_from_latent(rng: &mut ChaCha8Rng, shift: f64, noise_sd: f64, max: u32) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    let u = logistic(shift + noise_sd * n);
    let code = (u * f64::from(max + 1)).floor().min(f64::from(max));
    code.max(0.0)
}

fn binomial(rng: &mut ChaCha8Rng, trials: u32, p: f64) -> f64 {
    let mut hits = 0u32;
    for _ in 0..trials {
        if rng.gen_bool(p) {
            hits += 1;
        }
    }
    f64::from(hits)
}

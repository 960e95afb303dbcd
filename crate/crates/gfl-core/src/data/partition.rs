//! Splitting a corpus across federated clients, and holdout selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Dirichlet;

use super::dataset::TabularDataset;
use super::{DataError, Result};
use crate::seed::{mix_seed, mix_seed_n};

/// How rows are distributed across clients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitStrategy {
    /// Every client draws from the same distribution: per class, rows are
    /// split as evenly as largest-remainder rounding allows.
    Iid,
    /// Per-class client proportions drawn from a Dirichlet with the given
    /// concentration. Small concentrations give strongly label-skewed
    /// shards, the classic non-IID federated setting.
    LabelSkew { concentration: f64 },
    /// One Dirichlet draw shared by all classes: shard sizes differ but
    /// class balance within each shard stays close to the corpus.
    SizeSkew { concentration: f64 },
}

/// A reproducible assignment recipe: client count, strategy, and the seed
/// that fixes both the proportion draws and the row shuffles.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    pub clients: usize,
    pub strategy: SplitStrategy,
    pub seed: u64,
}

impl PartitionPlan {
    pub fn new(clients: usize, strategy: SplitStrategy, seed: u64) -> Result<Self> {
        if clients == 0 {
            return Err(DataError::Plan("need at least one client".into()));
        }
        if let SplitStrategy::LabelSkew { concentration } | SplitStrategy::SizeSkew { concentration } =
            strategy
        {
            if !concentration.is_finite() || concentration <= 0.0 {
                return Err(DataError::Plan(format!(
                    "Dirichlet concentration must be positive, got {concentration}"
                )));
            }
        }
        Ok(PartitionPlan {
            clients,
            strategy,
            seed,
        })
    }

    /// Per-class client proportions, `proportions[class][client]`, each row
    /// summing to 1. Deterministic in the plan's seed.
    pub fn proportions(&self, classes: usize) -> Vec<Vec<f64>> {
        let k = self.clients;
        match self.strategy {
            SplitStrategy::Iid => vec![vec![1.0 / k as f64; k]; classes],
            SplitStrategy::LabelSkew { concentration } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, "label-skew"));
                (0..classes)
                    .map(|_| draw_dirichlet(&mut rng, concentration, k))
                    .collect()
            }
            SplitStrategy::SizeSkew { concentration } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, "size-skew"));
                let shared = draw_dirichlet(&mut rng, concentration, k);
                vec![shared; classes]
            }
        }
    }
}

fn draw_dirichlet(rng: &mut ChaCha8Rng, concentration: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    let dist = Dirichlet::new_with_size(concentration, k)
        .expect("positive concentration and k >= 2 were validated");
    rng.sample(dist)
}

/// Split `dataset` into one shard per client.
///
/// Rows are grouped by label; each group is shuffled (seeded) and dealt out
/// by largest-remainder rounding of the plan's per-class proportions, so
/// every row lands in exactly one shard and expected class mixes follow the
/// proportions. Plans that leave any client empty are rejected.
pub fn partition(dataset: &TabularDataset, plan: &PartitionPlan) -> Result<Vec<TabularDataset>> {
    if dataset.is_empty() {
        return Err(DataError::Plan("cannot partition an empty dataset".into()));
    }
    if plan.clients == 0 {
        return Err(DataError::Plan("need at least one client".into()));
    }
    if plan.clients > dataset.len() {
        return Err(DataError::Plan(format!(
            "{} clients cannot each receive a row from {} rows",
            plan.clients,
            dataset.len()
        )));
    }

    // Group row indices by class, keeping only classes that occur.
    let mut groups: Vec<(u8, Vec<usize>)> = Vec::new();
    for class in [0u8, 1u8] {
        let idx: Vec<usize> = dataset
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if !idx.is_empty() {
            groups.push((class, idx));
        }
    }

    let proportions = plan.proportions(groups.len());
    let mut shard_indices: Vec<Vec<usize>> = vec![Vec::new(); plan.clients];
    for (g, (class, mut idx)) in groups.into_iter().enumerate() {
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix_seed_n(plan.seed, "class-shuffle", u64::from(class)));
        shuffle(&mut idx, &mut rng);
        let counts = largest_remainder(idx.len(), &proportions[g]);
        let mut cursor = 0;
        for (client, &count) in counts.iter().enumerate() {
            shard_indices[client].extend_from_slice(&idx[cursor..cursor + count]);
            cursor += count;
        }
    }

    if let Some(empty) = shard_indices.iter().position(|s| s.is_empty()) {
        return Err(DataError::Plan(format!(
            "client {empty} received no rows; use more data, fewer clients, or a milder skew"
        )));
    }

    shard_indices
        .iter()
        .map(|idx| dataset.subset(idx))
        .collect()
}

/// Apportion `total` items to integer counts that sum to `total`, following
/// `proportions` as closely as possible: floor every quota, then hand the
/// leftovers to the largest fractional parts (ties to the lower index).
fn largest_remainder(total: usize, proportions: &[f64]) -> Vec<usize> {
    let mut counts: Vec<usize> = Vec::with_capacity(proportions.len());
    let mut fractions: Vec<(usize, f64)> = Vec::with_capacity(proportions.len());
    let mut assigned = 0usize;
    for (i, &p) in proportions.iter().enumerate() {
        let quota = total as f64 * p;
        let base = quota.floor() as usize;
        counts.push(base);
        assigned += base;
        fractions.push((i, quota - base as f64));
    }
    let mut leftover = total - assigned;
    fractions.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in fractions {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    counts
}

/// Seeded Fisher-Yates shuffle.
fn shuffle(idx: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..idx.len()).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
}

/// Draw `count` distinct rows uniformly without replacement, in draw order.
/// With `count == dataset.len()` this is a seeded permutation of the whole
/// dataset.
pub fn holdout_select(dataset: &TabularDataset, count: usize, seed: u64) -> Result<TabularDataset> {
    Ok(holdout_split(dataset, count, seed)?.0)
}

/// Like [`holdout_select`], additionally returning the unselected remainder
/// in its original row order.
pub fn holdout_split(
    dataset: &TabularDataset,
    count: usize,
    seed: u64,
) -> Result<(TabularDataset, TabularDataset)> {
    if count > dataset.len() {
        return Err(DataError::Usage(format!(
            "cannot select {count} rows from {}",
            dataset.len()
        )));
    }
    let mut idx: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, "holdout"));
    // Partial Fisher-Yates: after i steps the prefix holds i uniform draws
    // without replacement.
    for i in 0..count {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    let selected = dataset.subset(&idx[..count])?;
    let mut rest: Vec<usize> = idx[count..].to_vec();
    rest.sort_unstable();
    let remainder = dataset.subset(&rest)?;
    Ok((selected, remainder))
}

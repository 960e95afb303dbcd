//! Weight averaging: the per-round aggregation step of both protocols.

use gfl_core::ModelWeights;
use gfl_transport::NodeId;

use crate::error::{Result, RuntimeError};

/// Element-wise arithmetic mean of congruent weight sets.
///
/// The result carries the layer names and shapes of the first update.
/// Summation order is the slice order, so callers that need bit-identical
/// results across runs must present updates in a fixed order.
pub fn fedavg(updates: &[ModelWeights]) -> Result<ModelWeights> {
    weighted_mean(updates, None)
}

/// Mean weighted by shard size: updates trained on more rows count for
/// more. `rows[i]` belongs to `updates[i]`.
pub fn fedavg_weighted(updates: &[ModelWeights], rows: &[usize]) -> Result<ModelWeights> {
    if rows.len() != updates.len() {
        return Err(RuntimeError::Usage(format!(
            "{} updates but {} row counts",
            updates.len(),
            rows.len()
        )));
    }
    if rows.iter().sum::<usize>() == 0 {
        return Err(RuntimeError::Usage(
            "size-weighted averaging needs at least one nonempty shard".into(),
        ));
    }
    weighted_mean(updates, Some(rows))
}

fn weighted_mean(updates: &[ModelWeights], rows: Option<&[usize]>) -> Result<ModelWeights> {
    let first = updates
        .first()
        .ok_or_else(|| RuntimeError::Usage("cannot average zero updates".into()))?;
    for (i, update) in updates.iter().enumerate().skip(1) {
        first
            .congruent_with(update)
            .map_err(|e| RuntimeError::Usage(format!("update {i} is not congruent: {e}")))?;
    }
    let total: f64 = match rows {
        Some(rows) => rows.iter().map(|&r| r as f64).sum(),
        None => updates.len() as f64,
    };
    let mut mean = first.map(|_| 0.0);
    for (i, update) in updates.iter().enumerate() {
        let weight = rows.map_or(1.0, |rows| rows[i] as f64);
        for ((_, acc), (_, tensor)) in mean.iter_mut().zip(update.iter()) {
            for (t, &v) in acc.data_mut().iter_mut().zip(tensor.data()) {
                *t += weight * v;
            }
        }
    }
    for (_, acc) in mean.iter_mut() {
        for v in acc.data_mut() {
            *v /= total;
        }
    }
    Ok(mean)
}

/// One synchronous exchange round over a mesh, as a pure function.
///
/// `states[k]` is node `k`'s current weights; `neighbors[k]` its neighbor
/// set. Each node's next state is the mean over its neighbors' states —
/// plus its own when `self_inclusive` is set. A node with no neighbors and
/// no self-inclusion keeps its state unchanged.
pub fn mesh_average(
    states: &[ModelWeights],
    neighbors: &[Vec<NodeId>],
    self_inclusive: bool,
) -> Result<Vec<ModelWeights>> {
    if states.len() != neighbors.len() {
        return Err(RuntimeError::Usage(format!(
            "{} states but {} neighbor sets",
            states.len(),
            neighbors.len()
        )));
    }
    let mut next = Vec::with_capacity(states.len());
    for (k, set) in neighbors.iter().enumerate() {
        // Contributions are gathered in ascending node order — self
        // included at its natural position — so the summation order is a
        // pure function of the topology.
        let mut sources: Vec<usize> = set.iter().map(|&p| p as usize).collect();
        if self_inclusive {
            sources.push(k);
        }
        sources.sort_unstable();
        sources.dedup();
        if sources.is_empty() {
            next.push(states[k].clone());
            continue;
        }
        for &s in &sources {
            if s >= states.len() {
                return Err(RuntimeError::Usage(format!(
                    "node {k} lists neighbor {s}, but only {} states were given",
                    states.len()
                )));
            }
        }
        let gathered: Vec<ModelWeights> = sources.iter().map(|&s| states[s].clone()).collect();
        next.push(fedavg(&gathered)?);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use gfl_core::Tensor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn weights(values: &[f64]) -> ModelWeights {
        ModelWeights::from_layers(vec![("w".into(), Tensor::vector(values.to_vec()))]).unwrap()
    }

    #[test]
    fn single_update_averages_to_itself_exactly() {
        let w = weights(&[0.1, -2.5, 7.0]);
        let mean = fedavg(&[w.clone()]).unwrap();
        assert_eq!(mean, w);
    }

    #[test]
    fn two_updates_average_to_the_midpoint() {
        let mean = fedavg(&[weights(&[1.0, 3.0]), weights(&[3.0, 5.0])]).unwrap();
        assert_eq!(mean, weights(&[2.0, 4.0]));
    }

    #[test]
    fn averaging_rejects_empty_and_incongruent_inputs() {
        assert!(matches!(fedavg(&[]), Err(RuntimeError::Usage(_))));
        let a = weights(&[1.0]);
        let b = ModelWeights::from_layers(vec![("other".into(), Tensor::vector(vec![1.0]))]).unwrap();
        assert!(fedavg(&[a, b]).is_err());
    }

    #[test]
    fn mean_matches_a_bruteforce_reference_on_random_cohorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let updates = rng.gen_range(1..=16);
            let params = rng.gen_range(1..=64);
            let cohort: Vec<ModelWeights> = (0..updates)
                .map(|_| {
                    let values: Vec<f64> =
                        (0..params).map(|_| rng.gen_range(-10.0..10.0)).collect();
                    weights(&values)
                })
                .collect();
            let mean = fedavg(&cohort).unwrap();
            for i in 0..params {
                let expect: f64 = cohort
                    .iter()
                    .map(|w| w.get("w").unwrap().data()[i])
                    .sum::<f64>()
                    / updates as f64;
                let got = mean.get("w").unwrap().data()[i];
                assert!((got - expect).abs() < 1e-12, "param {i}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn size_weighting_follows_row_counts() {
        // 1 row of [0], 3 rows of [4] → weighted mean 3.
        let mean = fedavg_weighted(&[weights(&[0.0]), weights(&[4.0])], &[1, 3]).unwrap();
        assert_eq!(mean, weights(&[3.0]));
        // Equal rows reduce to the plain mean.
        let a = [weights(&[1.0]), weights(&[3.0])];
        assert_eq!(
            fedavg_weighted(&a, &[7, 7]).unwrap(),
            fedavg(&a).unwrap()
        );
        assert!(fedavg_weighted(&a, &[1]).is_err());
        assert!(fedavg_weighted(&a, &[0, 0]).is_err());
    }

    #[test]
    fn mesh_round_preserves_the_cohort_mean_on_full_meshes() {
        // Averaging over all *other* nodes permutes mass but conserves the
        // total: the post-exchange mean equals the pre-exchange mean.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nodes = 5usize;
        let neighbors: Vec<Vec<NodeId>> = (0..nodes)
            .map(|k| (0..nodes as u32).filter(|&p| p as usize != k).collect())
            .collect();
        let states: Vec<ModelWeights> = (0..nodes)
            .map(|_| weights(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
            .collect();
        let before = fedavg(&states).unwrap();
        let after = fedavg(&mesh_average(&states, &neighbors, false).unwrap()).unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-12);
    }

    #[test]
    fn self_inclusive_full_mesh_reaches_consensus_in_one_round() {
        let states = vec![weights(&[1.0]), weights(&[2.0]), weights(&[3.0])];
        let neighbors = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        let next = mesh_average(&states, &neighbors, true).unwrap();
        for state in &next {
            assert_eq!(*state, weights(&[2.0]));
        }
    }

    #[test]
    fn isolated_nodes_keep_their_state() {
        let states = vec![weights(&[5.0])];
        let next = mesh_average(&states, &[vec![]], false).unwrap();
        assert_eq!(next[0], states[0]);
    }
}

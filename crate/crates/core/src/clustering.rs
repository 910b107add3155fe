//! k-medoids partitioning with MinSOD representatives.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_space::DissimilarityMatrix;
use crate::seed;

/// Upper bound on assignment/update rounds.
pub const MAX_ITERATIONS: usize = 100;

/// Hard partition of a training set into `k` non-empty disjoint clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Member indices of each cluster, ascending.
    pub clusters: Vec<Vec<usize>>,
    /// `representatives[i]` belongs to `clusters[i]`.
    pub representatives: Vec<usize>,
}

impl Partition {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }
}

/// Outcome of one k-medoids run.
#[derive(Debug, Clone)]
pub struct KMedoidsRun {
    pub partition: Partition,
    /// Sum of member-to-representative dissimilarities after each assignment.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// How the spread of a cluster around its representative is summarized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtentStrategy {
    #[default]
    Mean,
    Max,
    Std,
}

/// Member minimizing the sum of dissimilarities to the other members.
/// Ties go to the lowest index.
pub fn minsod_representative(members: &[usize], d: &DissimilarityMatrix) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in members {
        let sod: f64 = members.iter().map(|&k| d.get(j, k)).sum();
        match best {
            Some((bj, bs)) if sod > bs || (sod == bs && j > bj) => {}
            _ => best = Some((j, sod)),
        }
    }
    best.map(|(j, _)| j)
        .ok_or_else(|| Error::InvalidArgument("MinSOD of an empty cluster".into()))
}

/// Cluster extent around `representative`. The mean strategy divides the sum
/// over all members (the representative contributes 0) by `|C| - 1`.
pub fn cluster_extent(members: &[usize], representative: usize, d: &DissimilarityMatrix, strategy: ExtentStrategy) -> f64 {
    if members.len() < 2 {
        return 0.0;
    }
    let dists = members.iter().map(|&k| d.get(representative, k));
    match strategy {
        ExtentStrategy::Mean => dists.sum::<f64>() / (members.len() - 1) as f64,
        ExtentStrategy::Max => dists.fold(0.0, f64::max),
        ExtentStrategy::Std => {
            let others: Vec<f64> = members
                .iter()
                .filter(|&&k| k != representative)
                .map(|&k| d.get(representative, k))
                .collect();
            let mean = others.iter().sum::<f64>() / others.len() as f64;
            (others.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / others.len() as f64).sqrt()
        }
    }
}

fn assign(d: &DissimilarityMatrix, reps: &[usize]) -> (Vec<usize>, f64) {
    let mut objective = 0.0;
    let labels = (0..d.len())
        .map(|i| {
            let mut best = 0;
            let mut best_d = d.get(i, reps[0]);
            for (c, &r) in reps.iter().enumerate().skip(1) {
                let dist = d.get(i, r);
                if dist < best_d {
                    best = c;
                    best_d = dist;
                }
            }
            objective += best_d;
            best
        })
        .collect();
    (labels, objective)
}

/// Gives every empty cluster the pattern lying farthest from its current
/// representative, taken from a cluster that can spare it.
fn repair_empty(d: &DissimilarityMatrix, reps: &mut [usize], labels: &mut [usize]) {
    let k = reps.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut donor: Option<(usize, f64)> = None;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 || reps.contains(&i) {
                continue;
            }
            let dist = d.get(i, reps[l]);
            if donor.is_none_or(|(_, bd)| dist > bd) {
                donor = Some((i, dist));
            }
        }
        let (i, _) = donor.expect("k <= n leaves a spare pattern");
        labels[i] = empty;
        reps[empty] = i;
    }
}

fn clusters_of(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut clusters = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        clusters[l].push(i);
    }
    clusters
}

/// Alternating k-medoids from `k` distinct random representatives.
pub fn k_medoids(d: &DissimilarityMatrix, k: usize, seed: u64) -> Result<KMedoidsRun> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {n}]")));
    }
    let mut rng = seed::rng(seed, &[]);
    let mut reps: Vec<usize> = sample(&mut rng, n, k).into_vec();
    let mut objective = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (mut labels, _) = assign(d, &reps);
        repair_empty(d, &mut reps, &mut labels);
        objective.push(
            labels
                .iter()
                .enumerate()
                .map(|(i, &l)| d.get(i, reps[l]))
                .sum::<f64>(),
        );
        let clusters = clusters_of(&labels, k);
        let next: Vec<usize> = clusters
            .iter()
            .map(|members| minsod_representative(members, d))
            .collect::<Result<_>>()?;
        if next == reps || iterations >= MAX_ITERATIONS {
            let unchanged = next == reps;
            reps = next;
            let clusters = if unchanged {
                clusters
            } else {
                // Representatives moved on the last permitted round; keep the
                // partition consistent with them.
                let (mut labels, _) = assign(d, &reps);
                repair_empty(d, &mut reps, &mut labels);
                clusters_of(&labels, k)
            };
            return Ok(KMedoidsRun {
                partition: Partition {
                    clusters,
                    representatives: reps,
                },
                objective,
                iterations,
            });
        }
        reps = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn line(points: &[f64]) -> DissimilarityMatrix {
        let n = points.len();
        let data = (0..n * n)
            .map(|ij| (points[ij / n] - points[ij % n]).abs())
            .collect();
        DissimilarityMatrix::from_vec(n, data).unwrap()
    }

    fn random_matrix(n: usize, seed: u64) -> DissimilarityMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v: f64 = rng.random();
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DissimilarityMatrix::from_vec(n, data).unwrap()
    }

    #[test]
    fn minsod_examples() {
        let d = line(&[0.0, 0.4, 1.0]);
        assert_eq!(minsod_representative(&[0, 1, 2], &d).unwrap(), 1);
        assert_eq!(minsod_representative(&[2], &d).unwrap(), 2);
        assert_eq!(minsod_representative(&[0, 2], &d).unwrap(), 0);
        assert!(minsod_representative(&[], &d).is_err());
    }

    #[test]
    fn extent_examples() {
        let d = line(&[0.0, 0.4, 1.0]);
        let mean = cluster_extent(&[0, 1, 2], 1, &d, ExtentStrategy::Mean);
        assert!((mean - 0.5).abs() < 1e-12);
        assert!((cluster_extent(&[0, 1, 2], 1, &d, ExtentStrategy::Max) - 0.6).abs() < 1e-12);
        assert!((cluster_extent(&[0, 1, 2], 1, &d, ExtentStrategy::Std) - 0.1).abs() < 1e-12);
        assert_eq!(cluster_extent(&[2], 2, &d, ExtentStrategy::Mean), 0.0);
    }

    #[test]
    fn k_one_is_global_minsod() {
        let d = line(&[0.0, 0.1, 0.15, 0.9, 0.3]);
        let run = k_medoids(&d, 1, 7).unwrap();
        assert_eq!(run.partition.representatives, vec![minsod_representative(&[0, 1, 2, 3, 4], &d).unwrap()]);
        assert_eq!(run.partition.clusters, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn separated_groups_are_recovered() {
        let pts = [0.0, 0.01, 0.02, 5.0, 5.01, 5.02, 10.0, 10.01, 10.02];
        let d = line(&pts);
        let expected = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];

        // Exhaustive oracle over all 3^9 labelings: the optimal 3-partition
        // by total distance to MinSOD representatives is the obvious one.
        let mut best = (f64::INFINITY, vec![]);
        for code in 0..3usize.pow(9) {
            let labels: Vec<usize> = (0..9).map(|i| code / 3usize.pow(i as u32) % 3).collect();
            let clusters = clusters_of(&labels, 3);
            if clusters.iter().any(|c| c.is_empty()) {
                continue;
            }
            let cost: f64 = clusters
                .iter()
                .map(|c| {
                    let r = minsod_representative(c, &d).unwrap();
                    c.iter().map(|&i| d.get(i, r)).sum::<f64>()
                })
                .sum();
            if cost < best.0 - 1e-12 {
                let mut sorted = clusters.clone();
                sorted.sort();
                best = (cost, sorted);
            }
        }
        assert_eq!(best.1, expected);

        // Any run whose initial medoids fall in distinct groups recovers it.
        for seed in 0..30 {
            let mut rng = seed::rng(seed, &[]);
            let init = sample(&mut rng, 9, 3).into_vec();
            let mut groups: Vec<usize> = init.iter().map(|i| i / 3).collect();
            groups.sort();
            let mut found = k_medoids(&d, 3, seed).unwrap().partition.clusters;
            found.sort();
            if groups == vec![0, 1, 2] {
                assert_eq!(found, expected);
            }
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let d = random_matrix(40, 3);
        let a = k_medoids(&d, 4, 11).unwrap();
        let b = k_medoids(&d, 4, 11).unwrap();
        assert_eq!(a.partition, b.partition);
    }

    #[test]
    fn k_out_of_range() {
        let d = line(&[0.0, 1.0]);
        assert!(k_medoids(&d, 0, 0).is_err());
        assert!(k_medoids(&d, 3, 0).is_err());
    }

    #[test]
    fn identical_patterns_get_repaired_clusters() {
        let d = DissimilarityMatrix::from_vec(5, vec![0.0; 25]).unwrap();
        let run = k_medoids(&d, 3, 1).unwrap();
        assert!(run.partition.clusters.iter().all(|c| !c.is_empty()));
        let mut all: Vec<usize> = run.partition.clusters.concat();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }

    fn brute_minsod(members: &[usize], d: &DissimilarityMatrix) -> usize {
        let sods: Vec<f64> = members
            .iter()
            .map(|&j| members.iter().map(|&k| d.get(j, k)).sum())
            .collect();
        let min = sods.iter().cloned().fold(f64::INFINITY, f64::min);
        members[sods.iter().position(|&s| s == min).unwrap()]
    }

    proptest! {
        #[test]
        fn partition_invariants(n in 2usize..30, k in 1usize..6, seed in 0u64..1000) {
            let k = k.min(n);
            let d = random_matrix(n, seed);
            let run = k_medoids(&d, k, seed).unwrap();
            let p = &run.partition;
            prop_assert_eq!(p.k(), k);
            let mut all: Vec<usize> = p.clusters.concat();
            all.sort();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            for (c, &r) in p.clusters.iter().zip(&p.representatives) {
                prop_assert!(c.contains(&r));
                let mean = cluster_extent(c, r, &d, ExtentStrategy::Mean);
                let max = cluster_extent(c, r, &d, ExtentStrategy::Max);
                prop_assert!(mean <= max + 1e-12);
            }
            prop_assert!(run.iterations <= MAX_ITERATIONS);
            for w in run.objective.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9);
            }
        }

        #[test]
        fn minsod_agrees_with_brute_force(size in 1usize..=8, seed in 0u64..10_000) {
            let d = random_matrix(12, seed);
            let members: Vec<usize> = (0..size).map(|i| (i * 5 + seed as usize) % 12).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            prop_assert_eq!(minsod_representative(&members, &d).unwrap(), brute_minsod(&members, &d));
        }
    }
}

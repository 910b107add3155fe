use serde::{Deserialize, Serialize};

use super::fuzzy::sigmoid_membership;
use crate::clustering::{cluster_extent, k_medoids, ExtentStrategy, Partition};
use crate::error::{Error, Result};
use crate::feature_space::{DissimilarityMatrix, FeatureSchema, FeatureSpace, Pattern, TsNormalizer, WeightVector};
use crate::preprocessing::NormalizationStats;

/// Output for one pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub target: bool,
    pub membership: f64,
    /// Index of the nearest representative.
    pub cluster: usize,
    /// Dissimilarity to that representative.
    pub dissimilarity: f64,
}

/// Extent and tolerance of one decision region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionShape {
    pub extent: f64,
    pub tolerance: f64,
}

impl RegionShape {
    /// Acceptance radius `extent + tolerance`.
    pub fn radius(&self) -> f64 {
        self.extent + self.tolerance
    }

    /// Sigmoid steepness parameter (`a`).
    pub fn slope(&self) -> f64 {
        self.extent
    }

    /// Dissimilarity at which membership is 0.5 (`b`).
    pub fn midpoint(&self) -> f64 {
        self.extent + self.tolerance / 2.0
    }
}

/// Nearest region for the given dissimilarities to each representative, with
/// ties going to the lowest index.
pub fn decide(dissimilarities: &[f64], shapes: &[RegionShape]) -> Decision {
    debug_assert_eq!(dissimilarities.len(), shapes.len());
    let mut cluster = 0;
    for (i, &d) in dissimilarities.iter().enumerate().skip(1) {
        if d < dissimilarities[cluster] {
            cluster = i;
        }
    }
    let d = dissimilarities[cluster];
    let shape = shapes[cluster];
    Decision {
        target: d <= shape.radius(),
        membership: sigmoid_membership(d, shape.slope(), shape.midpoint()),
        cluster,
        dissimilarity: d,
    }
}

/// k-medoids on `d` plus the extent of every cluster.
pub fn cluster_regions(
    d: &DissimilarityMatrix,
    k: usize,
    seed: u64,
    strategy: ExtentStrategy,
) -> Result<(Partition, Vec<f64>)> {
    let run = k_medoids(d, k, seed)?;
    let extents = run
        .partition
        .clusters
        .iter()
        .zip(&run.partition.representatives)
        .map(|(members, &rep)| cluster_extent(members, rep, d, strategy))
        .collect();
    Ok((run.partition, extents))
}

/// One decision region in a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub representative: Pattern,
    pub shape: RegionShape,
    /// Number of training patterns in the cluster.
    pub size: usize,
}

/// A trained one-class model: weighted dissimilarity, representatives and
/// decision regions, plus the preprocessing that inputs must go through.
#[derive(Debug, Clone, PartialEq)]
pub struct OccModel {
    pub schema: FeatureSchema,
    pub weights: WeightVector,
    pub regions: Vec<Region>,
    pub ts_normalizer: TsNormalizer,
    pub stats: NormalizationStats,
    pub extent_strategy: ExtentStrategy,
}

/// Fixed inputs of [`OccModel::fit`].
#[derive(Debug, Clone, Copy)]
pub struct FitContext<'a> {
    pub schema: &'a FeatureSchema,
    pub ts_normalizer: &'a TsNormalizer,
    pub stats: &'a NormalizationStats,
    pub extent_strategy: ExtentStrategy,
}

impl OccModel {
    /// Clusters the (normalized) `train` patterns under `weights` and attaches
    /// `tolerances` to the resulting regions.
    pub fn fit(
        ctx: FitContext<'_>,
        train: &[Pattern],
        weights: WeightVector,
        tolerances: &[f64],
        seed: u64,
    ) -> Result<Self> {
        let k = tolerances.len();
        if train.is_empty() {
            return Err(Error::InvalidArgument("empty training set".into()));
        }
        if let Some(bad) = tolerances.iter().find(|s| !(**s >= 0.0)) {
            return Err(Error::Domain(format!("tolerance {bad} is negative")));
        }
        let space = FeatureSpace::new(ctx.schema, ctx.ts_normalizer)?;
        let n = train.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = space.dissimilarity(&train[i], &train[j], &weights)?;
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        let d = DissimilarityMatrix::from_vec(n, data)?;
        let (partition, extents) = cluster_regions(&d, k, seed, ctx.extent_strategy)?;
        Ok(Self::from_partition(ctx, train, weights, &partition, &extents, tolerances))
    }

    pub(crate) fn from_partition(
        ctx: FitContext<'_>,
        train: &[Pattern],
        weights: WeightVector,
        partition: &Partition,
        extents: &[f64],
        tolerances: &[f64],
    ) -> Self {
        let regions = partition
            .representatives
            .iter()
            .zip(&partition.clusters)
            .zip(extents.iter().zip(tolerances))
            .map(|((&rep, members), (&extent, &tolerance))| Region {
                representative: train[rep].clone(),
                shape: RegionShape { extent, tolerance },
                size: members.len(),
            })
            .collect();
        OccModel {
            schema: ctx.schema.clone(),
            weights,
            regions,
            ts_normalizer: ctx.ts_normalizer.clone(),
            stats: ctx.stats.clone(),
            extent_strategy: ctx.extent_strategy,
        }
    }

    pub fn k(&self) -> usize {
        self.regions.len()
    }

    pub fn shapes(&self) -> Vec<RegionShape> {
        self.regions.iter().map(|r| r.shape).collect()
    }

    /// Dissimilarity of a normalized pattern to every representative.
    pub fn dissimilarities(&self, x: &Pattern) -> Result<Vec<f64>> {
        x.validate(&self.schema)?;
        let space = FeatureSpace::new(&self.schema, &self.ts_normalizer)?;
        self.regions
            .iter()
            .map(|r| space.dissimilarity(x, &r.representative, &self.weights))
            .collect()
    }

    /// `(cluster, dissimilarity)` of the nearest representative.
    pub fn nearest_representative(&self, x: &Pattern) -> Result<(usize, f64)> {
        let d = self.classify(x)?;
        Ok((d.cluster, d.dissimilarity))
    }

    pub fn hard_classify(&self, x: &Pattern) -> Result<bool> {
        Ok(self.classify(x)?.target)
    }

    pub fn membership(&self, x: &Pattern) -> Result<f64> {
        Ok(self.classify(x)?.membership)
    }

    /// Full decision for a normalized pattern.
    pub fn classify(&self, x: &Pattern) -> Result<Decision> {
        Ok(decide(&self.dissimilarities(x)?, &self.shapes()))
    }
}

//! The weighted heterogeneous dissimilarity `d(x, y; w) = sqrt(sum_j w_j (x_j (-) y_j)^2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{circular_diff, circular_diff_max, dtw, special_diff};
use super::schema::{FeatureKind, FeatureSchema, FeatureValue, Pattern, WeightVector};
use crate::error::{Error, Result};

/// Per-timeseries-feature maximum of the raw DTW values on the fitting set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsNormalizer {
    /// One entry per timeseries feature, in schema order.
    pub maxima: Vec<f64>,
}

impl TsNormalizer {
    /// Normalizer for a schema without timeseries features.
    pub fn empty() -> Self {
        TsNormalizer { maxima: vec![] }
    }

    /// Scales a raw DTW value into `[0, 1]`.
    pub fn normalize(&self, slot: usize, raw: f64) -> f64 {
        if raw.is_infinite() {
            return 1.0;
        }
        (raw / self.maxima[slot]).min(1.0)
    }
}

/// Computes the maximum pairwise raw DTW of every timeseries feature over
/// `dataset`. Pairs with exactly one empty sequence do not contribute; a
/// feature without positive pairwise values stores 1.
pub fn fit_ts_normalizer(schema: &FeatureSchema, dataset: &[Pattern]) -> TsNormalizer {
    let mut maxima = vec![0.0f64; schema.ts_count()];
    for (j, f) in schema.features().iter().enumerate() {
        if !matches!(f.kind, FeatureKind::Timeseries) {
            continue;
        }
        let slot = schema.ts_slot(j).expect("timeseries slot");
        let seqs: Vec<&[f64]> = dataset
            .iter()
            .map(|p| match &p.values[j] {
                FeatureValue::Events(xs) => xs.as_slice(),
                _ => &[],
            })
            .collect();
        let max = (0..seqs.len())
            .into_par_iter()
            .map(|a| {
                (a + 1..seqs.len())
                    .map(|b| dtw(seqs[a], seqs[b]))
                    .filter(|d| d.is_finite())
                    .fold(0.0f64, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        maxima[slot] = max;
    }
    for m in &mut maxima {
        if *m <= 0.0 {
            *m = 1.0;
        }
    }
    TsNormalizer { maxima }
}

/// Schema plus fitted timeseries normalizer: everything needed to compare two
/// patterns feature by feature.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSpace<'a> {
    pub schema: &'a FeatureSchema,
    pub norm: &'a TsNormalizer,
}

impl<'a> FeatureSpace<'a> {
    pub fn new(schema: &'a FeatureSchema, norm: &'a TsNormalizer) -> Result<Self> {
        if norm.maxima.len() != schema.ts_count() {
            return Err(Error::Schema(format!(
                "normalizer has {} maxima for {} timeseries features",
                norm.maxima.len(),
                schema.ts_count()
            )));
        }
        Ok(FeatureSpace { schema, norm })
    }

    /// Dissimilarity of feature `j` alone, in `[0, 1]` for normalized data.
    pub fn component(&self, j: usize, x: &FeatureValue, y: &FeatureValue) -> Result<f64> {
        let feature = self.schema.feature(j);
        match (&feature.kind, x, y) {
            (FeatureKind::Categorical { .. }, FeatureValue::Label(a), FeatureValue::Label(b)) => {
                Ok(if a == b { 0.0 } else { 1.0 })
            }
            (FeatureKind::Quantitative, FeatureValue::Scalar(a), FeatureValue::Scalar(b)) => Ok((a - b).abs()),
            (FeatureKind::Circular { period }, FeatureValue::Circular(a), FeatureValue::Circular(b)) => {
                let span = circular_diff_max(*period);
                if span == 0 {
                    return Ok(0.0);
                }
                Ok(circular_diff(*a, *b, *period)? / span as f64)
            }
            (FeatureKind::SpecialQuantitative, FeatureValue::Special(a), FeatureValue::Special(b)) => {
                special_diff(*a, *b)
            }
            (FeatureKind::Timeseries, FeatureValue::Events(a), FeatureValue::Events(b)) => {
                let slot = self.schema.ts_slot(j).expect("timeseries slot");
                Ok(self.norm.normalize(slot, dtw(a, b)))
            }
            _ => Err(Error::Schema(format!(
                "values do not match feature `{}` ({})",
                feature.name,
                feature.kind.name()
            ))),
        }
    }

    /// Writes the squared component dissimilarities of `x` and `y` into `out`.
    pub fn squared_components(&self, x: &Pattern, y: &Pattern, out: &mut [f64]) -> Result<()> {
        let m = self.schema.len();
        if x.len() != m || y.len() != m {
            return Err(Error::Schema(format!(
                "patterns of arity {} and {} against a schema of {m} features",
                x.len(),
                y.len()
            )));
        }
        for j in 0..m {
            let c = self.component(j, &x.values[j], &y.values[j])?;
            out[j] = c * c;
        }
        Ok(())
    }

    pub fn dissimilarity(&self, x: &Pattern, y: &Pattern, w: &WeightVector) -> Result<f64> {
        let m = self.schema.len();
        if w.len() != m {
            return Err(Error::Schema(format!("{} weights for {m} features", w.len())));
        }
        let mut sq = vec![0.0; m];
        self.squared_components(x, y, &mut sq)?;
        Ok(weighted_norm(&sq, w.as_slice()))
    }
}

#[inline]
pub(crate) fn weighted_norm(squared: &[f64], w: &[f64]) -> f64 {
    squared.iter().zip(w).map(|(c, w)| c * w).sum::<f64>().sqrt()
}

/// Weighted dissimilarity between two patterns of the same schema.
pub fn composite_dissimilarity(
    schema: &FeatureSchema,
    x: &Pattern,
    y: &Pattern,
    w: &WeightVector,
    norm: &TsNormalizer,
) -> Result<f64> {
    FeatureSpace::new(schema, norm)?.dissimilarity(x, y, w)
}

/// Dense symmetric matrix of pairwise dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DissimilarityMatrix {
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(DissimilarityMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// All pairwise weighted dissimilarities of `dataset`.
pub fn dissimilarity_matrix(
    schema: &FeatureSchema,
    dataset: &[Pattern],
    w: &WeightVector,
    norm: &TsNormalizer,
) -> Result<DissimilarityMatrix> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("dissimilarity matrix of an empty dataset".into()));
    }
    let space = FeatureSpace::new(schema, norm)?;
    let n = dataset.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        Ok(0.0)
                    } else {
                        space.dissimilarity(&dataset[i], &dataset[j], w)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            data[i * n + j] = rows[i][j];
            data[j * n + i] = rows[i][j];
        }
    }
    Ok(DissimilarityMatrix { n, data })
}

/// Squared per-feature dissimilarities between every row pattern and every
/// column pattern. These do not depend on the weights, so a weighted
/// dissimilarity becomes a dot product.
#[derive(Debug, Clone)]
pub struct ComponentTable {
    rows: usize,
    cols: usize,
    m: usize,
    data: Vec<f64>,
}

impl ComponentTable {
    /// Table of `rows` against `cols`.
    pub fn between(space: &FeatureSpace<'_>, rows: &[Pattern], cols: &[Pattern]) -> Result<Self> {
        let m = space.schema.len();
        let chunks: Vec<Vec<f64>> = rows
            .par_iter()
            .map(|x| {
                let mut chunk = vec![0.0; cols.len() * m];
                for (j, y) in cols.iter().enumerate() {
                    space.squared_components(x, y, &mut chunk[j * m..(j + 1) * m])?;
                }
                Ok(chunk)
            })
            .collect::<Result<_>>()?;
        Ok(ComponentTable {
            rows: rows.len(),
            cols: cols.len(),
            m,
            data: chunks.concat(),
        })
    }

    /// Symmetric table of `patterns` against themselves.
    pub fn square(space: &FeatureSpace<'_>, patterns: &[Pattern]) -> Result<Self> {
        let n = patterns.len();
        let m = space.schema.len();
        let mut data = vec![0.0; n * n * m];
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut chunk = vec![0.0; (n - i) * m];
                for j in i + 1..n {
                    let at = (j - i) * m;
                    space.squared_components(&patterns[i], &patterns[j], &mut chunk[at..at + m])?;
                }
                Ok(chunk)
            })
            .collect::<Result<_>>()?;
        for (i, chunk) in upper.iter().enumerate() {
            for j in i + 1..n {
                let src = &chunk[(j - i) * m..(j - i + 1) * m];
                data[(i * n + j) * m..(i * n + j + 1) * m].copy_from_slice(src);
                data[(j * n + i) * m..(j * n + i + 1) * m].copy_from_slice(src);
            }
        }
        Ok(ComponentTable { rows: n, cols: n, m, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn weighted(&self, i: usize, j: usize, w: &[f64]) -> f64 {
        let at = (i * self.cols + j) * self.m;
        weighted_norm(&self.data[at..at + self.m], w)
    }

    /// Row-major `rows x cols` matrix of weighted dissimilarities.
    pub fn weighted_all(&self, w: &[f64]) -> Vec<f64> {
        self.data.chunks_exact(self.m).map(|c| weighted_norm(c, w)).collect()
    }

    pub fn weighted_square(&self, w: &[f64]) -> DissimilarityMatrix {
        debug_assert_eq!(self.rows, self.cols);
        DissimilarityMatrix {
            n: self.rows,
            data: self.weighted_all(w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureDescriptor;
    use proptest::prelude::*;

    fn mixed_schema() -> FeatureSchema {
        FeatureSchema::new(vec![
            FeatureDescriptor::categorical("m", ["CU", "AL"]),
            FeatureDescriptor::quantitative("q"),
            FeatureDescriptor::circular("t", 1439),
            FeatureDescriptor::special("s"),
            FeatureDescriptor::timeseries("e"),
        ])
        .unwrap()
    }

    fn mixed(label: &str, q: f64, t: u32, s: Option<f64>, e: &[f64]) -> Pattern {
        Pattern::new(vec![
            FeatureValue::Label(label.into()),
            FeatureValue::Scalar(q),
            FeatureValue::Circular(t),
            FeatureValue::Special(s),
            FeatureValue::Events(e.to_vec()),
        ])
    }

    #[test]
    fn three_four_five() {
        let schema = FeatureSchema::quantitative(2).unwrap();
        let norm = TsNormalizer::empty();
        let x = Pattern::scalars(&[0.1, 0.2]);
        let y = Pattern::scalars(&[0.4, 0.6]);
        let d = composite_dissimilarity(&schema, &x, &y, &WeightVector::ones(2), &norm).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let zero = WeightVector::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(composite_dissimilarity(&schema, &x, &y, &zero, &norm).unwrap(), 0.0);
        assert_eq!(
            composite_dissimilarity(&schema, &x, &x, &WeightVector::ones(2), &norm).unwrap(),
            0.0
        );
    }

    #[test]
    fn weight_and_schema_mismatch() {
        let schema = FeatureSchema::quantitative(2).unwrap();
        let norm = TsNormalizer::empty();
        let x = Pattern::scalars(&[0.1, 0.2]);
        assert!(composite_dissimilarity(&schema, &x, &x, &WeightVector::ones(3), &norm).is_err());
        let short = Pattern::scalars(&[0.1]);
        assert!(composite_dissimilarity(&schema, &x, &short, &WeightVector::ones(2), &norm).is_err());
    }

    #[test]
    fn ts_normalizer_examples() {
        let schema = FeatureSchema::new(vec![FeatureDescriptor::timeseries("e")]).unwrap();
        let ev = |xs: &[f64]| Pattern::new(vec![FeatureValue::Events(xs.to_vec())]);

        let same = vec![ev(&[1.0, 2.0]), ev(&[1.0, 2.0]), ev(&[1.0, 2.0])];
        let norm = fit_ts_normalizer(&schema, &same);
        assert_eq!(norm.maxima, vec![1.0]);
        let dm = dissimilarity_matrix(&schema, &same, &WeightVector::ones(1), &norm).unwrap();
        assert!(dm.as_slice().iter().all(|&d| d == 0.0));

        assert_eq!(fit_ts_normalizer(&schema, &[ev(&[3.0])]).maxima, vec![1.0]);

        // raw DTW values 40 (a-c), 20 (a-b) and 20 (b-c)
        let data = vec![ev(&[0.0]), ev(&[20.0]), ev(&[40.0])];
        let norm = fit_ts_normalizer(&schema, &data);
        assert_eq!(norm.maxima, vec![40.0]);
        let space = FeatureSpace::new(&schema, &norm).unwrap();
        assert_eq!(space.component(0, &data[0].values[0], &data[2].values[0]).unwrap(), 1.0);
        assert_eq!(space.component(0, &data[0].values[0], &data[1].values[0]).unwrap(), 0.5);
        // values above the fitted maximum clamp to 1
        let far = ev(&[100.0]);
        assert_eq!(space.component(0, &data[0].values[0], &far.values[0]).unwrap(), 1.0);
        // empty against non-empty is maximal
        let none = ev(&[]);
        assert_eq!(space.component(0, &none.values[0], &data[1].values[0]).unwrap(), 1.0);
        assert_eq!(space.component(0, &none.values[0], &none.values[0]).unwrap(), 0.0);
    }

    #[test]
    fn matrix_basics() {
        let schema = mixed_schema();
        let data = vec![
            mixed("CU", 0.1, 10, None, &[1.0, 5.0]),
            mixed("AL", 0.7, 1400, Some(0.3), &[]),
            mixed("CU", 0.1, 10, None, &[1.0, 5.0]),
            mixed("AL", 0.2, 700, Some(0.9), &[2.0]),
        ];
        let norm = fit_ts_normalizer(&schema, &data);
        let w = WeightVector::ones(5);
        let dm = dissimilarity_matrix(&schema, &data, &w, &norm).unwrap();
        for i in 0..4 {
            assert_eq!(dm.get(i, i), 0.0);
            for j in 0..4 {
                assert_eq!(dm.get(i, j), dm.get(j, i));
            }
        }
        assert_eq!(dm.get(0, 2), 0.0);

        let single = dissimilarity_matrix(&schema, &data[..1], &w, &norm).unwrap();
        assert_eq!(single.as_slice(), &[0.0]);

        let space = FeatureSpace::new(&schema, &norm).unwrap();
        let table = ComponentTable::square(&space, &data).unwrap();
        let fast = table.weighted_square(w.as_slice());
        for (a, b) in fast.as_slice().iter().zip(dm.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        let cross = ComponentTable::between(&space, &data[1..], &data).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                assert!((cross.weighted(i, j, w.as_slice()) - dm.get(i + 1, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_ts_in_unit_interval_on_fitting_set() {
        let schema = FeatureSchema::new(vec![FeatureDescriptor::timeseries("e")]).unwrap();
        let data: Vec<Pattern> = (0..12)
            .map(|i| {
                let xs: Vec<f64> = (0..(i % 5)).map(|k| (k * 7 + i * 3) as f64).collect();
                Pattern::new(vec![FeatureValue::Events(xs)])
            })
            .collect();
        let norm = fit_ts_normalizer(&schema, &data);
        let dm = dissimilarity_matrix(&schema, &data, &WeightVector::ones(1), &norm).unwrap();
        assert!(dm.as_slice().iter().all(|d| (0.0..=1.0).contains(d)));
    }

    proptest! {
        #[test]
        fn single_quantitative_is_abs_diff(x in 0.0..=1.0f64, y in 0.0..=1.0f64) {
            let schema = FeatureSchema::quantitative(1).unwrap();
            let d = composite_dissimilarity(
                &schema,
                &Pattern::scalars(&[x]),
                &Pattern::scalars(&[y]),
                &WeightVector::ones(1),
                &TsNormalizer::empty(),
            ).unwrap();
            prop_assert!((d - (x - y).abs()).abs() < 1e-15);
        }

        #[test]
        fn monotone_in_each_weight(
            xs in prop::collection::vec(0.0..=1.0f64, 3),
            ys in prop::collection::vec(0.0..=1.0f64, 3),
            w in prop::collection::vec(0.0..=1.0f64, 3),
            j in 0usize..3,
            bump in 0.0..=1.0f64,
        ) {
            let schema = FeatureSchema::quantitative(3).unwrap();
            let norm = TsNormalizer::empty();
            let (x, y) = (Pattern::scalars(&xs), Pattern::scalars(&ys));
            let base = WeightVector::new(w.clone()).unwrap();
            let mut raised = w;
            raised[j] = (raised[j] + bump).min(1.0);
            let raised = WeightVector::new(raised).unwrap();
            let d0 = composite_dissimilarity(&schema, &x, &y, &base, &norm).unwrap();
            let d1 = composite_dissimilarity(&schema, &x, &y, &raised, &norm).unwrap();
            prop_assert!(d1 >= d0);
            let back = composite_dissimilarity(&schema, &y, &x, &base, &norm).unwrap();
            prop_assert_eq!(d0, back);
        }
    }
}

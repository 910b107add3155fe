use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// First two principal components of the rows of a dissimilarity matrix
/// (each row is the feature vector of one pattern). Each component's sign is
/// fixed so that its largest-magnitude loading is positive.
pub fn embed_dissimilarity(d: &[f64], n: usize) -> Result<Vec<[f64; 2]>> {
    if d.len() != n * n {
        return Err(Error::InvalidArgument(format!(
            "{} entries do not form a {n} x {n} matrix",
            d.len()
        )));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut x = DMatrix::from_row_slice(n, n, d);
    for j in 0..n {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = x.transpose() * &x;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut coords = vec![[0.0; 2]; n];
    for (c, &idx) in order.iter().take(2).enumerate() {
        if eig.eigenvalues[idx] <= 1e-12 * eig.eigenvalues[order[0]].max(f64::MIN_POSITIVE) {
            continue;
        }
        let mut loading = eig.eigenvectors.column(idx).into_owned();
        let lead = loading.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        if lead < 0.0 {
            loading = -loading;
        }
        let scores = &x * loading;
        for i in 0..n {
            coords[i][c] = scores[i];
        }
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_maps_to_origin() {
        assert!(embed_dissimilarity(&[0.0; 9], 3).unwrap().iter().all(|p| *p == [0.0, 0.0]));
        assert!(embed_dissimilarity(&[0.0; 8], 3).is_err());
    }

    #[test]
    fn duplicated_rows_coincide() {
        // two groups of identical patterns
        let g = [0usize, 0, 1, 1, 0];
        let n = g.len();
        let d: Vec<f64> = (0..n * n).map(|ij| if g[ij / n] == g[ij % n] { 0.0 } else { 0.7 }).collect();
        let c = embed_dissimilarity(&d, n).unwrap();
        assert_eq!(c[0], c[1]);
        assert_eq!(c[0], c[4]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[2]);
    }

    #[test]
    fn rank_two_inner_products_are_reproduced() {
        // centered rows spanned by two directions
        let n = 6;
        let u: Vec<f64> = (0..n).map(|i| (i as f64 * 0.9).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.4).cos() * 0.5).collect();
        let a = [1.0, -2.0, 0.5, 3.0, -1.0, 0.2];
        let b = [0.3, 0.8, -1.5, 0.1, 2.0, -0.7];
        let d: Vec<f64> = (0..n * n).map(|ij| a[ij / n] * u[ij % n] + b[ij / n] * v[ij % n]).collect();
        let coords = embed_dissimilarity(&d, n).unwrap();
        let mut x = DMatrix::from_row_slice(n, n, &d);
        for j in 0..n {
            let mean = x.column(j).mean();
            x.column_mut(j).add_scalar_mut(-mean);
        }
        let gram = &x * x.transpose();
        for i in 0..n {
            for j in 0..n {
                let dot = coords[i][0] * coords[j][0] + coords[i][1] * coords[j][1];
                assert!((dot - gram[(i, j)]).abs() < 1e-9, "{i},{j}: {dot} vs {}", gram[(i, j)]);
            }
        }
    }

    #[test]
    fn constant_shift_is_ignored() {
        let n = 4;
        let d: Vec<f64> = (0..n * n).map(|ij| ((ij / n) as f64 - (ij % n) as f64).abs()).collect();
        let shifted: Vec<f64> = d.iter().map(|x| x + 3.0).collect();
        let a = embed_dissimilarity(&d, n).unwrap();
        let b = embed_dissimilarity(&shifted, n).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
        }
    }
}

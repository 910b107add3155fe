use crate::error::{Error, Result};
use crate::preprocessing::mean_std;

/// Bins of the fixed histograms used for entropies.
pub const BINS: usize = 10;

fn bin(x: f64, lo: f64, hi: f64) -> usize {
    if hi <= lo {
        return 0;
    }
    (((x - lo) / (hi - lo) * BINS as f64) as usize).min(BINS - 1)
}

fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Shannon entropy (nats) of the weights' histogram over ten equal-width
/// bins of `[0, 1]`.
pub fn weight_entropy(w: &[f64]) -> f64 {
    let mut counts = [0usize; BINS];
    for &x in w {
        counts[bin(x.clamp(0.0, 1.0), 0.0, 1.0)] += 1;
    }
    entropy_of_counts(&counts)
}

/// Gaussian kernel density estimate of the weights on `points` evenly spaced
/// grid points over `[0, 1]`, with Silverman's bandwidth.
pub fn weight_density(w: &[f64], points: usize) -> Vec<(f64, f64)> {
    if w.is_empty() || points == 0 {
        return vec![];
    }
    let n = w.len() as f64;
    let (_, std) = mean_std(w);
    let h = if std > 0.0 { 1.06 * std * n.powf(-0.2) } else { 0.05 };
    let norm = 1.0 / (n * h * (2.0 * std::f64::consts::PI).sqrt());
    (0..points)
        .map(|i| {
            let x = if points == 1 { 0.5 } else { i as f64 / (points - 1) as f64 };
            let y = w.iter().map(|&wi| (-0.5 * ((x - wi) / h).powi(2)).exp()).sum::<f64>() * norm;
            (x, y)
        })
        .collect()
}

/// Histogram mutual information of two series (10 x 10 equal-width bins over
/// each series' range) divided by the smaller marginal entropy.
pub fn mutual_information(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "series of lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 10 {
        return Err(Error::InvalidArgument(format!("series of {} values; at least 10 needed", xs.len())));
    }
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    };
    let (xlo, xhi) = range(xs);
    let (ylo, yhi) = range(ys);
    let mut joint = [[0usize; BINS]; BINS];
    let mut px = [0usize; BINS];
    let mut py = [0usize; BINS];
    for (&x, &y) in xs.iter().zip(ys) {
        let (i, j) = (bin(x, xlo, xhi), bin(y, ylo, yhi));
        joint[i][j] += 1;
        px[i] += 1;
        py[j] += 1;
    }
    let hx = entropy_of_counts(&px);
    let hy = entropy_of_counts(&py);
    let floor = hx.min(hy);
    if floor <= 0.0 {
        return Ok(0.0);
    }
    let flat: Vec<usize> = joint.iter().flatten().copied().collect();
    let mi = hx + hy - entropy_of_counts(&flat);
    Ok((mi / floor).clamp(0.0, 1.0))
}

/// Sample Pearson correlation.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs two equal-length series of at least 2 values, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let (mx, sx) = mean_std(xs);
    let (my, sy) = mean_std(ys);
    if sx == 0.0 || sy == 0.0 {
        return Err(Error::InvalidArgument("correlation of a constant series".into()));
    }
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.len() as f64;
    Ok((cov / (sx * sy)).clamp(-1.0, 1.0))
}

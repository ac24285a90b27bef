use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::{ClusterMethod, ClusteringResult};

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_LLOYD: usize = 300;

/// Best Lloyd run over all restarts.
#[derive(Clone, Debug, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    /// K×d centroids.
    pub centroids: Matrix,
    /// Within-cluster sum of squares.
    pub wcss: f64,
}

/// k-means on the rows of `rows` with k-means++ seeding; returns the
/// restart with the smallest within-cluster sum of squares.
pub fn kmeans(rows: &Matrix, k: usize, seed: u64, restarts: usize) -> Result<ClusteringResult> {
    let fit = kmeans_fit(rows, k, seed, restarts)?;
    Ok(ClusteringResult { labels: fit.labels, k, method: ClusterMethod::Kmeans, seed })
}

pub fn kmeans_fit(rows: &Matrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansFit> {
    let n = rows.rows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cluster count {k} outside [1, {n}]")));
    }
    if restarts == 0 {
        return Err(Error::invalid("k-means needs at least one restart"));
    }
    rows.ensure_finite("k-means input")?;
    let distinct = count_distinct(rows);
    if distinct < k {
        return Err(Error::TooFewDistinctRows { distinct, k });
    }
    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let fit = lloyd(rows, k, &mut rng)?;
        if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn count_distinct(rows: &Matrix) -> usize {
    let set: HashSet<Vec<u64>> = (0..rows.rows())
        .map(|i| rows.row(i).iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect())
        .collect();
    set.len()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(rows: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = rows.rows();
    let mut centers: Vec<Vec<f64>> = vec![rows.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(rows.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && t < d {
                    chosen = i;
                    break;
                }
                t -= d;
            }
            // guard against rounding landing on an existing center
            if d2[chosen] == 0.0 {
                chosen = (0..n).max_by(|&i, &j| d2[i].total_cmp(&d2[j]).then(j.cmp(&i))).expect("n > 0");
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = rows.row(pick).to_vec();
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(rows.row(i), &c));
        }
        centers.push(c);
    }
    Matrix::from_rows(&centers).expect("equal widths")
}

fn assign(rows: &Matrix, centroids: &Matrix) -> (Vec<usize>, Vec<f64>) {
    (0..rows.rows())
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for c in 0..centroids.rows() {
                let d = sq_dist(rows.row(i), centroids.row(c));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn lloyd(rows: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Result<KMeansFit> {
    let (n, d) = rows.shape();
    let mut centroids = plus_plus(rows, k, rng);
    let (mut labels, mut dist) = assign(rows, &centroids);
    for _ in 0..MAX_LLOYD {
        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, v) in sums.row_mut(labels[i]).iter_mut().zip(rows.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums.row_mut(c) {
                    *s /= counts[c] as f64;
                }
            } else {
                // move the empty centroid onto the point farthest from its own centroid
                let far = (0..n).max_by(|&i, &j| dist[i].total_cmp(&dist[j]).then(j.cmp(&i))).expect("n > 0");
                if dist[far] == 0.0 {
                    let distinct = count_distinct(rows);
                    return Err(Error::TooFewDistinctRows { distinct, k });
                }
                sums.row_mut(c).copy_from_slice(rows.row(far));
                dist[far] = 0.0;
            }
        }
        centroids = sums;
        let (new_labels, new_dist) = assign(rows, &centroids);
        let changed = new_labels != labels;
        labels = new_labels;
        dist = new_dist;
        if !changed {
            break;
        }
    }
    let wcss = dist.iter().sum();
    Ok(KMeansFit { labels, centroids, wcss })
}

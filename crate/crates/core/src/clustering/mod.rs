//! Partitional clustering: NJW spectral clustering, kernel NMF clustering,
//! SVD and NMF document clustering, k-means, and synthetic point sets.

mod datasets;
mod kmeans;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{degree_normalize, gaussian_affinity, xu_normalize, Matrix};
use crate::nmf::{factorize, NmfInit, NmfOptions, NmfSolver};
use crate::svd::{symmetric_top_eigs, truncated_svd};

pub use datasets::{make_blobs, make_moons, make_rings, PointSet2D};
pub use kmeans::{kmeans, kmeans_fit, KMeansFit, DEFAULT_RESTARTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMethod {
    Njw,
    NmfKernel,
    SvdCocluster,
    NmfDoc,
    Kmeans,
}

/// Hard cluster assignment of every item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusteringResult {
    /// Cluster index per item, each below `k`.
    pub labels: Vec<usize>,
    pub k: usize,
    pub method: ClusterMethod,
    pub seed: u64,
}

impl ClusteringResult {
    /// Writes `item_id,label` rows after a header line.
    pub fn write_csv<S: AsRef<str>>(&self, path: impl AsRef<Path>, item_ids: &[S]) -> Result<()> {
        let path = path.as_ref();
        if item_ids.len() != self.labels.len() {
            return Err(Error::dims("ClusteringResult::write_csv", "one id per item required"));
        }
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        let io = |e| Error::io(path, e);
        writeln!(w, "item_id,label").map_err(io)?;
        for (id, l) in item_ids.iter().zip(&self.labels) {
            writeln!(w, "{},{l}", id.as_ref()).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Cluster of column `n` is the row index of the largest entry of `C[:, n]`,
/// ties resolved toward the lowest index.
pub fn argmax_labels(c: &Matrix) -> Vec<usize> {
    (0..c.cols())
        .map(|n| {
            let mut best = 0;
            for k in 1..c.rows() {
                if c[(k, n)] > c[(best, n)] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

fn check_points(points: &PointSet2D, k: usize) -> Result<()> {
    if k == 0 || k > points.len() {
        return Err(Error::invalid(format!("cluster count {k} outside [1, {}]", points.len())));
    }
    Ok(())
}

fn affinity_checked(points: &PointSet2D, alpha: f64) -> Result<Matrix> {
    let a = gaussian_affinity(&points.to_matrix(), alpha)?;
    if let Some(i) = a.row_sums().iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    Ok(a)
}

/// Ng–Jordan–Weiss spectral clustering: Gaussian affinity, symmetric degree
/// normalization, top-`k` eigenvectors, row normalization, k-means.
pub fn njw_cluster(points: &PointSet2D, k: usize, alpha: f64, seed: u64) -> Result<ClusteringResult> {
    check_points(points, k)?;
    let a = affinity_checked(points, alpha)?;
    let l = degree_normalize(&a)?;
    let (_, mut x) = symmetric_top_eigs(&l, k)?;
    for i in 0..x.rows() {
        let row = x.row_mut(i);
        let nrm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 0.0 {
            row.iter_mut().for_each(|v| *v /= nrm);
        }
    }
    let labels = if k == 1 { vec![0; x.rows()] } else { kmeans(&x, k, seed, DEFAULT_RESTARTS)?.labels };
    Ok(ClusteringResult { labels, k, method: ClusterMethod::Njw, seed })
}

/// NMF of the Gaussian affinity matrix; each point goes to the factor with
/// the largest coefficient.
pub fn nmf_kernel_cluster(
    points: &PointSet2D,
    k: usize,
    alpha: f64,
    solver: NmfSolver,
    seed: u64,
) -> Result<ClusteringResult> {
    check_points(points, k)?;
    let a = affinity_checked(points, alpha)?;
    let f = factorize(&a, k, solver, NmfInit::Seed(seed), &NmfOptions::default())?;
    Ok(ClusteringResult { labels: argmax_labels(&f.c), k, method: ClusterMethod::NmfKernel, seed })
}

fn check_docs(a: &Matrix, k: usize) -> Result<()> {
    if k == 0 || k > a.cols() {
        return Err(Error::invalid(format!("cluster count {k} outside [1, {}]", a.cols())));
    }
    Ok(())
}

/// Document clustering through the right singular vectors of the
/// normalized term-document matrix.
pub fn svd_doc_cluster(a: &Matrix, k: usize, seed: u64) -> Result<ClusteringResult> {
    check_docs(a, k)?;
    let an = xu_normalize(a)?;
    let t = truncated_svd(&an, k, seed)?;
    let labels = kmeans(&t.v, k, seed, DEFAULT_RESTARTS)?.labels;
    Ok(ClusteringResult { labels, k, method: ClusterMethod::SvdCocluster, seed })
}

/// Document clustering through the coefficient matrix of an NMF of the
/// normalized term-document matrix.
pub fn nmf_doc_cluster(a: &Matrix, k: usize, solver: NmfSolver, seed: u64) -> Result<ClusteringResult> {
    nmf_doc_cluster_with(a, k, solver, seed, &NmfOptions::default())
}

pub fn nmf_doc_cluster_with(
    a: &Matrix,
    k: usize,
    solver: NmfSolver,
    seed: u64,
    opts: &NmfOptions,
) -> Result<ClusteringResult> {
    check_docs(a, k)?;
    let an = xu_normalize(a)?;
    let f = factorize(&an, k, solver, NmfInit::Seed(seed), opts)?;
    Ok(ClusteringResult { labels: argmax_labels(&f.c), k, method: ClusterMethod::NmfDoc, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{contingency, purity};

    fn blobs() -> PointSet2D {
        make_blobs(30, &[[0.0, 0.0], [10.0, 10.0]], 0.5, 1).unwrap()
    }

    #[test]
    fn argmax_ties_go_low() {
        let c = Matrix::from_rows(&[[1.0, 0.0, 2.0], [1.0, 3.0, 2.0], [0.5, 3.0, 1.0]]).unwrap();
        assert_eq!(argmax_labels(&c), vec![0, 1, 0]);
    }

    #[test]
    fn blobs_are_pure() {
        let p = blobs();
        for labels in [
            njw_cluster(&p, 2, 1.0, 0).unwrap().labels,
            nmf_kernel_cluster(&p, 2, 1.0, NmfSolver::Multiplicative, 0).unwrap().labels,
            nmf_kernel_cluster(&p, 2, 1.0, NmfSolver::Anls, 0).unwrap().labels,
        ] {
            assert_eq!(purity(&contingency(&labels, &p.labels).unwrap()).unwrap(), 1.0);
        }
    }

    #[test]
    fn single_cluster() {
        let p = blobs();
        assert!(njw_cluster(&p, 1, 1.0, 0).unwrap().labels.iter().all(|&l| l == 0));
        assert!(nmf_kernel_cluster(&p, 1, 1.0, NmfSolver::Anls, 0).unwrap().labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn isolated_point_is_error() {
        let p = PointSet2D::new(vec![[0.0, 0.0], [0.1, 0.0], [1e6, 0.0]], vec![0, 0, 1]).unwrap();
        assert!(matches!(njw_cluster(&p, 2, 0.1, 0), Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn disjoint_vocabularies() {
        let a = Matrix::from_rows(&[
            [3.0, 1.0, 2.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2.0, 1.0, 4.0],
            [0.0, 0.0, 0.0, 1.0, 3.0, 1.0],
        ])
        .unwrap();
        let truth = [0, 0, 0, 1, 1, 1];
        for labels in [
            svd_doc_cluster(&a, 2, 0).unwrap().labels,
            nmf_doc_cluster(&a, 2, NmfSolver::Anls, 0).unwrap().labels,
            nmf_doc_cluster(&a, 2, NmfSolver::Multiplicative, 0).unwrap().labels,
        ] {
            assert_eq!(purity(&contingency(&labels, &truth).unwrap()).unwrap(), 1.0);
        }
        let tall = a.transpose();
        let mut all = svd_doc_cluster(&tall, 4, 0).unwrap().labels;
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn labels_csv() {
        let r = ClusteringResult { labels: vec![1, 0], k: 2, method: ClusterMethod::Kmeans, seed: 0 };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        r.write_csv(&p, &["a", "b"]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "item_id,label\na,1\nb,0\n");
    }
}

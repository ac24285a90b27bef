//! External clustering-quality measures computed from a cluster-by-class
//! contingency table: mutual information, entropy, purity and F-measure.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cluster-by-class counts. Row `r` is a cluster, column `s` a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contingency {
    pub counts: Vec<Vec<u64>>,
    pub cluster_sizes: Vec<u64>,
    pub class_sizes: Vec<u64>,
    pub n: u64,
    /// Original cluster label of each row.
    pub cluster_ids: Vec<usize>,
    /// Original class label of each column.
    pub class_ids: Vec<usize>,
}

impl Contingency {
    /// Builds a table from raw counts; rows and columns keep their positions.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let s = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || s == 0 {
            return Err(Error::invalid("contingency table is empty"));
        }
        if counts.iter().any(|r| r.len() != s) {
            return Err(Error::dims("contingency", "ragged count rows"));
        }
        let cluster_sizes: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let class_sizes: Vec<u64> = (0..s).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = cluster_sizes.iter().sum();
        Ok(Contingency {
            cluster_ids: (0..counts.len()).collect(),
            class_ids: (0..s).collect(),
            counts,
            cluster_sizes,
            class_sizes,
            n,
        })
    }

    /// Number of clusters (rows).
    pub fn r(&self) -> usize {
        self.counts.len()
    }

    /// Number of classes (columns).
    pub fn s(&self) -> usize {
        self.class_sizes.len()
    }

    fn ensure_nonempty(&self) -> Result<()> {
        if self.n == 0 {
            Err(Error::invalid("contingency table holds no items"))
        } else {
            Ok(())
        }
    }
}

/// Tabulates cluster labels against reference classes. Only labels that
/// actually occur get a row or column, ordered by label value.
pub fn contingency(labels: &[usize], reference: &[usize]) -> Result<Contingency> {
    if labels.len() != reference.len() {
        return Err(Error::dims(
            "contingency",
            format!("{} labels vs {} reference classes", labels.len(), reference.len()),
        ));
    }
    if labels.is_empty() {
        return Err(Error::invalid("no items to tabulate"));
    }
    let cluster_ids: Vec<usize> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let class_ids: Vec<usize> = reference.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut counts = vec![vec![0u64; class_ids.len()]; cluster_ids.len()];
    for (&l, &c) in labels.iter().zip(reference) {
        let r = cluster_ids.binary_search(&l).expect("present");
        let s = class_ids.binary_search(&c).expect("present");
        counts[r][s] += 1;
    }
    let mut t = Contingency::from_counts(counts)?;
    t.cluster_ids = cluster_ids;
    t.class_ids = class_ids;
    Ok(t)
}

/// `Σ p(r,s) log₂(p(r,s) / (p(r)p(s)))` in bits.
pub fn mutual_information(t: &Contingency) -> Result<f64> {
    t.ensure_nonempty()?;
    let n = t.n as f64;
    let mut mi = 0.0;
    for (r, row) in t.counts.iter().enumerate() {
        for (s, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (c * n / (t.cluster_sizes[r] as f64 * t.class_sizes[s] as f64)).log2();
        }
    }
    Ok(mi.max(0.0))
}

/// `−(1/(N log₂ S)) Σ c_rs log₂(c_rs / c_r)`, in `[0, 1]`; zero iff every
/// cluster is pure.
pub fn entropy_metric(t: &Contingency) -> Result<f64> {
    t.ensure_nonempty()?;
    let s = t.s();
    if s < 2 {
        return Err(Error::invalid("entropy needs at least two classes"));
    }
    let mut acc = 0.0;
    for (r, row) in t.counts.iter().enumerate() {
        for &c in row.iter().filter(|&&c| c > 0) {
            acc += c as f64 * (c as f64 / t.cluster_sizes[r] as f64).log2();
        }
    }
    Ok((-acc / (t.n as f64 * (s as f64).log2())).max(0.0))
}

/// `(1/N) Σ_r max_s c_rs`.
pub fn purity(t: &Contingency) -> Result<f64> {
    t.ensure_nonempty()?;
    let dominant: u64 = t.counts.iter().map(|row| row.iter().copied().max().unwrap_or(0)).sum();
    Ok(dominant as f64 / t.n as f64)
}

/// Index of the largest count in a row; ties go to the lowest class index.
pub fn dominant_class(row: &[u64]) -> usize {
    let mut best = 0;
    for (s, &c) in row.iter().enumerate() {
        if c > row[best] {
            best = s;
        }
    }
    best
}

/// Mean over clusters of the harmonic mean of precision and recall against
/// each cluster's dominant class.
pub fn fmeasure(t: &Contingency) -> Result<f64> {
    t.ensure_nonempty()?;
    let matching: Vec<usize> = t.counts.iter().map(|row| dominant_class(row)).collect();
    fmeasure_with(t, &matching)
}

/// F-measure under an explicit cluster-to-class matching.
pub fn fmeasure_with(t: &Contingency, matching: &[usize]) -> Result<f64> {
    t.ensure_nonempty()?;
    if matching.len() != t.r() || matching.iter().any(|&s| s >= t.s()) {
        return Err(Error::dims("fmeasure", "matching must assign a valid class to every cluster"));
    }
    let mut total = 0.0;
    for (r, &s) in matching.iter().enumerate() {
        let hit = t.counts[r][s] as f64;
        let precision = if t.cluster_sizes[r] > 0 { hit / t.cluster_sizes[r] as f64 } else { 0.0 };
        let recall = if t.class_sizes[s] > 0 { hit / t.class_sizes[s] as f64 } else { 0.0 };
        if precision + recall > 0.0 {
            total += 2.0 * precision * recall / (precision + recall);
        }
    }
    Ok(total / t.r() as f64)
}

/// The four measures plus the table dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mi: f64,
    pub entropy: f64,
    pub purity: f64,
    pub fmeasure: f64,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "N")]
    pub n: u64,
}

impl MetricReport {
    pub fn from_table(t: &Contingency) -> Result<Self> {
        Ok(MetricReport {
            mi: mutual_information(t)?,
            entropy: entropy_metric(t)?,
            purity: purity(t)?,
            fmeasure: fmeasure(t)?,
            r: t.r(),
            s: t.s(),
            n: t.n,
        })
    }

    pub fn from_labels(labels: &[usize], reference: &[usize]) -> Result<Self> {
        MetricReport::from_table(&contingency(labels, reference)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[u64]]) -> Contingency {
        Contingency::from_counts(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn tabulation_examples() {
        let t = contingency(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap();
        assert_eq!(t.counts, vec![vec![2, 0], vec![0, 2]]);
        let t = contingency(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap();
        assert_eq!(t.counts, vec![vec![1, 1], vec![1, 1]]);
        assert!(contingency(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn unused_labels_are_dropped() {
        let t = contingency(&[3, 3, 7], &[1, 5, 5]).unwrap();
        assert_eq!(t.cluster_ids, vec![3, 7]);
        assert_eq!(t.class_ids, vec![1, 5]);
        assert_eq!(t.counts, vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn diagonal_table() {
        let t = table(&[&[2, 0], &[0, 2]]);
        assert!((mutual_information(&t).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(entropy_metric(&t).unwrap(), 0.0);
        assert_eq!(purity(&t).unwrap(), 1.0);
        assert_eq!(fmeasure(&t).unwrap(), 1.0);
    }

    #[test]
    fn uniform_table() {
        let t = table(&[&[1, 1], &[1, 1]]);
        assert!(mutual_information(&t).unwrap().abs() < 1e-15);
        assert!((entropy_metric(&t).unwrap() - 1.0).abs() < 1e-15);
        let single = table(&[&[2, 2]]);
        assert_eq!(mutual_information(&single).unwrap(), 0.0);
    }

    #[test]
    fn two_one_one_two() {
        let t = table(&[&[2, 1], &[1, 2]]);
        let mi = (2.0 / 3.0) * (4.0f64 / 3.0).log2() + (1.0 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((mutual_information(&t).unwrap() - mi).abs() < 1e-15);
        assert!((mutual_information(&t).unwrap() - 0.08170).abs() < 5e-6);
        assert!((entropy_metric(&t).unwrap() - 0.91830).abs() < 5e-6);
        assert!((purity(&t).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((fmeasure(&t).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn purity_single_cluster() {
        assert_eq!(purity(&table(&[&[3, 1]])).unwrap(), 0.75);
    }

    #[test]
    fn zero_overlap_contributes_nothing() {
        let t = table(&[&[2, 0], &[0, 2]]);
        assert_eq!(fmeasure_with(&t, &[1, 0]).unwrap(), 0.0);
        assert_eq!(fmeasure_with(&t, &[0, 0]).unwrap(), 0.5);
    }

    #[test]
    fn entropy_needs_two_classes() {
        assert!(entropy_metric(&table(&[&[3], &[1]])).is_err());
        assert!(mutual_information(&table(&[&[0, 0]])).is_err());
    }

    #[test]
    fn report_json_keys() {
        let r = MetricReport::from_labels(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["mi", "entropy", "purity", "fmeasure", "R", "S", "N"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

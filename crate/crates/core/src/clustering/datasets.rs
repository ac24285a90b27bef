//! Synthetic two-dimensional point sets: concentric rings, interleaved
//! half-moons and Gaussian blobs.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Labeled points in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet2D {
    pub coords: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
}

impl PointSet2D {
    pub fn new(coords: Vec<[f64; 2]>, labels: Vec<usize>) -> Result<Self> {
        if coords.len() != labels.len() {
            return Err(Error::dims("PointSet2D", format!("{} points, {} labels", coords.len(), labels.len())));
        }
        Ok(PointSet2D { coords, labels })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// N×2 matrix of coordinates.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.len(), 2, |i, j| self.coords[i][j])
    }

    /// Writes `x,y,class` rows after a header line.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record(["x", "y", "class"]).map_err(|e| csv_err(path, e))?;
        for (p, l) in self.coords.iter().zip(&self.labels) {
            w.write_record([p[0].to_string(), p[1].to_string(), l.to_string()]).map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads `x,y,class` rows; a leading header line is skipped if present.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| csv_err(path, e))?;
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            if line == 0 && rec.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
                continue;
            }
            if rec.len() != 3 {
                return Err(Error::parse(path, format!("line {}: expected x,y,class", line + 1)));
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::parse(path, format!("line {}: bad number `{s}`", line + 1)))
            };
            coords.push([num(&rec[0])?, num(&rec[1])?]);
            labels.push(
                rec[2]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(path, format!("line {}: bad class `{}`", line + 1, &rec[2])))?,
            );
        }
        if coords.is_empty() {
            return Err(Error::parse(path, "no points"));
        }
        PointSet2D::new(coords, labels)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

fn normal(sd: f64) -> Result<Normal<f64>> {
    if !(sd >= 0.0) || !sd.is_finite() {
        return Err(Error::invalid(format!("noise standard deviation must be nonnegative, got {sd}")));
    }
    Ok(Normal::new(0.0, sd).expect("validated"))
}

/// Concentric rings centered at the origin; label = ring index. Angles are
/// uniform, radii get Gaussian noise.
pub fn make_rings(n_per_ring: usize, radii: &[f64], noise_sd: f64, seed: u64) -> Result<PointSet2D> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid("ring radii must be positive"));
    }
    for (i, a) in radii.iter().enumerate() {
        if radii[i + 1..].contains(a) {
            return Err(Error::invalid("ring radii must be distinct"));
        }
    }
    let noise = normal(noise_sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n_per_ring * radii.len());
    let mut labels = Vec::with_capacity(coords.capacity());
    for (label, &radius) in radii.iter().enumerate() {
        for _ in 0..n_per_ring {
            let theta = rng.random_range(0.0..2.0 * PI);
            let r = radius + noise.sample(&mut rng);
            coords.push([r * theta.cos(), r * theta.sin()]);
            labels.push(label);
        }
    }
    PointSet2D::new(coords, labels)
}

/// Two interleaved half circles of unit radius.
pub fn make_moons(n_per_moon: usize, noise_sd: f64, seed: u64) -> Result<PointSet2D> {
    let noise = normal(noise_sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * n_per_moon);
    let mut labels = Vec::with_capacity(2 * n_per_moon);
    for label in 0..2 {
        for _ in 0..n_per_moon {
            let t = rng.random_range(0.0..PI);
            let (x, y) = if label == 0 { (t.cos(), t.sin()) } else { (1.0 - t.cos(), 0.5 - t.sin()) };
            coords.push([x + noise.sample(&mut rng), y + noise.sample(&mut rng)]);
            labels.push(label);
        }
    }
    PointSet2D::new(coords, labels)
}

/// Isotropic Gaussian blobs, one per center; label = center index.
pub fn make_blobs(n_per_blob: usize, centers: &[[f64; 2]], sd: f64, seed: u64) -> Result<PointSet2D> {
    if centers.is_empty() {
        return Err(Error::invalid("at least one blob center is required"));
    }
    let noise = normal(sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n_per_blob * centers.len());
    let mut labels = Vec::with_capacity(coords.capacity());
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..n_per_blob {
            coords.push([c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
            labels.push(label);
        }
    }
    PointSet2D::new(coords, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_ring_has_exact_radius() {
        let p = make_rings(50, &[1.0], 0.0, 1).unwrap();
        assert!(p.coords.iter().all(|c| (c[0].hypot(c[1]) - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rings_are_separated() {
        let p = make_rings(200, &[1.0, 3.0], 0.05, 2).unwrap();
        let (inner, outer): (Vec<_>, Vec<_>) = p.coords.iter().zip(&p.labels).partition(|(_, &l)| l == 0);
        let mut min = f64::INFINITY;
        for (a, _) in &inner {
            for (b, _) in &outer {
                min = min.min((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        assert!(min > 1.0);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(make_rings(20, &[1.0, 2.0], 0.1, 5).unwrap(), make_rings(20, &[1.0, 2.0], 0.1, 5).unwrap());
        assert_eq!(make_moons(20, 0.1, 5).unwrap(), make_moons(20, 0.1, 5).unwrap());
        assert_ne!(make_moons(20, 0.1, 5).unwrap(), make_moons(20, 0.1, 6).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_rings(5, &[1.0, 1.0], 0.0, 0).is_err());
        assert!(make_rings(5, &[-1.0], 0.0, 0).is_err());
        assert!(make_rings(5, &[1.0], -0.1, 0).is_err());
        assert!(make_blobs(5, &[], 0.1, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = make_blobs(10, &[[0.0, 0.0], [5.0, 5.0]], 0.3, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        p.write_csv(&path).unwrap();
        assert_eq!(PointSet2D::read_csv(&path).unwrap(), p);
    }
}

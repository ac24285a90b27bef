use crate::error::{Error, Result};

use super::Matrix;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `a`. Pivots below `rel_tol * max(diag)` are reported as
    /// [`Error::Singular`].
    pub fn new(a: &Matrix, rel_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims("cholesky", format!("{}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut c = Cholesky { n, l: vec![0.0; n * n] };
        match c.factor_with(|i, j| a[(i, j)], rel_tol) {
            Ok(()) => Ok(c),
            Err(_) => Err(Error::Singular),
        }
    }

    /// Factors the principal submatrix selected by `idx`. On failure returns
    /// the position (into `idx`) whose pivot collapsed.
    pub(crate) fn of_submatrix(a: &Matrix, idx: &[usize], rel_tol: f64) -> std::result::Result<Self, usize> {
        let n = idx.len();
        let mut c = Cholesky { n, l: vec![0.0; n * n] };
        c.factor_with(|i, j| a[(idx[i], idx[j])], rel_tol)?;
        Ok(c)
    }

    fn factor_with(&mut self, get: impl Fn(usize, usize) -> f64, rel_tol: f64) -> std::result::Result<(), usize> {
        let n = self.n;
        let max_diag = (0..n).map(|i| get(i, i)).fold(0.0, f64::max);
        let floor = rel_tol * max_diag;
        for j in 0..n {
            let mut d = get(j, j);
            for k in 0..j {
                d -= self.l[j * n + k] * self.l[j * n + k];
            }
            if !(d > floor) || d <= 0.0 {
                return Err(j);
            }
            let djj = d.sqrt();
            self.l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = get(i, j);
                for k in 0..j {
                    s -= self.l[i * n + k] * self.l[j * n + k];
                }
                self.l[i * n + j] = s / djj;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal of the factor.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.l[i * self.n + i]).collect()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

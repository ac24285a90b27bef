use crate::error::{Error, Result};

use super::Matrix;

/// Column-compressed sparse matrix.
///
/// Column `j` owns `row_idx[col_ptr[j]..col_ptr[j + 1]]`, strictly increasing,
/// with no explicitly stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validating constructor from raw CSC arrays.
    pub fn try_new(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if col_ptr.len() != cols + 1 || col_ptr[0] != 0 {
            return Err(Error::dims("SparseMatrix", "col_ptr must have cols + 1 entries starting at 0"));
        }
        if row_idx.len() != values.len() || *col_ptr.last().unwrap() != values.len() {
            return Err(Error::dims("SparseMatrix", "index and value arrays disagree with col_ptr"));
        }
        for j in 0..cols {
            let (lo, hi) = (col_ptr[j], col_ptr[j + 1]);
            if lo > hi {
                return Err(Error::invalid("col_ptr must be nondecreasing"));
            }
            let idx = &row_idx[lo..hi];
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("row indices in column {j} not strictly increasing")));
            }
            if idx.last().is_some_and(|&r| r >= rows) {
                return Err(Error::invalid(format!("row index out of range in column {j}")));
            }
        }
        if values.contains(&0.0) {
            return Err(Error::invalid("explicit zero stored in sparse matrix"));
        }
        Ok(SparseMatrix { rows, cols, col_ptr, row_idx, values })
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut col_ptr = Vec::with_capacity(m.cols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                let v = m[(i, j)];
                if v != 0.0 {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(values.len());
        }
        SparseMatrix { rows: m.rows(), cols: m.cols(), col_ptr, row_idx, values }
    }

    /// Builds from (row, col, value) triplets. Duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::dims("SparseMatrix::from_triplets", format!("entry ({r}, {c}) outside {rows}x{cols}")));
        }
        triplets.sort_by_key(|t| (t.1, t.0));
        let mut col_ptr = vec![0usize; cols + 1];
        let mut row_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut cols_of: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if cols_of.last() == Some(&c) && row_idx.last() == Some(&r) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(r);
                values.push(v);
                cols_of.push(c);
            }
        }
        let mut keep_r = Vec::with_capacity(row_idx.len());
        let mut keep_v = Vec::with_capacity(values.len());
        for ((r, v), c) in row_idx.into_iter().zip(values).zip(cols_of) {
            if v != 0.0 {
                keep_r.push(r);
                keep_v.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(SparseMatrix { rows, cols, col_ptr, row_idx: keep_r, values: keep_v })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    /// Iterates over stored entries as (row, col, value), column by column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| {
            let (r, v) = self.column(j);
            r.iter().zip(v).map(move |(&i, &x)| (i, j, x))
        })
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Dense-times-sparse: `x * self`.
    pub fn left_mul_dense(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.rows {
            return Err(Error::dims(
                "dense x sparse",
                format!("{}x{} times {}x{}", x.rows(), x.cols(), self.rows, self.cols),
            ));
        }
        let mut out = Matrix::zeros(x.rows(), self.cols);
        for i in 0..x.rows() {
            let xi = x.row(i);
            for j in 0..self.cols {
                let (r, v) = self.column(j);
                out[(i, j)] = r.iter().zip(v).map(|(&k, &a)| xi[k] * a).sum();
            }
        }
        Ok(out)
    }

    /// Sparse-transpose-times-dense: `selfᵀ * y`.
    pub fn tr_mul_dense(&self, y: &Matrix) -> Result<Matrix> {
        if y.rows() != self.rows {
            return Err(Error::dims(
                "sparseT x dense",
                format!("({}x{})ᵀ times {}x{}", self.rows, self.cols, y.rows(), y.cols()),
            ));
        }
        let mut out = Matrix::zeros(self.cols, y.cols());
        for j in 0..self.cols {
            let (r, v) = self.column(j);
            let oj = out.row_mut(j);
            for (&k, &a) in r.iter().zip(v) {
                super::axpy(a, y.row(k), oj);
            }
        }
        Ok(out)
    }

    /// Sparse-times-dense: `self * y`.
    pub fn mul_dense(&self, y: &Matrix) -> Result<Matrix> {
        if y.rows() != self.cols {
            return Err(Error::dims(
                "sparse x dense",
                format!("{}x{} times {}x{}", self.rows, self.cols, y.rows(), y.cols()),
            ));
        }
        let mut out = Matrix::zeros(self.rows, y.cols());
        for j in 0..self.cols {
            let (r, v) = self.column(j);
            let yj = y.row(j).to_vec();
            for (&i, &a) in r.iter().zip(v) {
                super::axpy(a, &yj, out.row_mut(i));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse_dense(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| if rng.random_bool(density) { rng.random_range(-2.0..2.0) } else { 0.0 })
    }

    #[test]
    fn dense_round_trip_drops_zeros() {
        let m = Matrix::from_rows(&[[0.0, 1.5], [2.0, 0.0], [0.0, -3.0]]).unwrap();
        let s = SparseMatrix::from_dense(&m);
        assert_eq!(s.nnz(), 3);
        assert_eq!(s.to_dense(), m);
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_cancellations() {
        let s =
            SparseMatrix::from_triplets(2, 2, vec![(1, 0, 1.0), (0, 0, 2.0), (1, 0, 3.0), (0, 1, 1.0), (0, 1, -1.0)])
                .unwrap();
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.to_dense().as_slice(), &[2.0, 0.0, 4.0, 0.0]);
    }

    #[test]
    fn try_new_rejects_unsorted_and_zeros() {
        assert!(SparseMatrix::try_new(3, 1, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
        assert!(SparseMatrix::try_new(3, 1, vec![0, 1], vec![1], vec![0.0]).is_err());
        assert!(SparseMatrix::try_new(3, 1, vec![0, 1], vec![1], vec![4.0]).is_ok());
    }

    #[test]
    fn sparse_paths_agree_with_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // small case from the contract: 3x4 by 4x2
        let x = random_sparse_dense(3, 4, 1.0, &mut rng);
        let y = random_sparse_dense(4, 2, 0.6, &mut rng);
        let dense = matmul(&x, &y).unwrap();
        let sp = SparseMatrix::from_dense(&y).left_mul_dense(&x).unwrap();
        assert!(dense.max_abs_diff(&sp) <= 1e-12);

        for _ in 0..10 {
            let a = random_sparse_dense(20, 20, 0.3, &mut rng);
            let d = random_sparse_dense(20, 20, 1.0, &mut rng);
            let s = SparseMatrix::from_dense(&a);
            assert!(matmul(&d, &a).unwrap().max_abs_diff(&s.left_mul_dense(&d).unwrap()) <= 1e-12);
            assert!(matmul(&a.transpose(), &d).unwrap().max_abs_diff(&s.tr_mul_dense(&d).unwrap()) <= 1e-12);
            assert!(matmul(&a, &d).unwrap().max_abs_diff(&s.mul_dense(&d).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn shape_errors() {
        let s = SparseMatrix::from_dense(&Matrix::identity(3));
        assert!(s.left_mul_dense(&Matrix::zeros(2, 2)).is_err());
        assert!(s.tr_mul_dense(&Matrix::zeros(2, 2)).is_err());
    }
}

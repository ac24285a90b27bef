//! Truncated singular value decomposition and a dense symmetric
//! eigensolver.
//!
//! Small inputs (both sides below 64) go straight to one-sided Jacobi;
//! larger ones use Golub–Kahan–Lanczos bidiagonalization with full
//! reorthogonalization. Singular vector signs are fixed so the
//! largest-magnitude entry of every left vector is positive.

mod eigen;
mod jacobi;
mod lanczos;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix, Vector};

const DENSE_LIMIT: usize = 64;

/// Top-`rank` singular triplets, `A ≈ U diag(s) Vᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdTruncation {
    /// M×K, orthonormal columns.
    pub u: Matrix,
    /// Singular values, descending.
    pub s: Vector,
    /// N×K, orthonormal columns.
    pub v: Matrix,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvdMethod {
    /// Jacobi below 64×64, Lanczos otherwise.
    #[default]
    Auto,
    Jacobi,
    Lanczos,
}

/// Top-`k` singular triplets of `a`. The seed only affects the Lanczos
/// start vector.
pub fn truncated_svd(a: &Matrix, k: usize, seed: u64) -> Result<SvdTruncation> {
    truncated_svd_with(a, k, seed, SvdMethod::Auto)
}

pub fn truncated_svd_with(a: &Matrix, k: usize, seed: u64, method: SvdMethod) -> Result<SvdTruncation> {
    let (m, n) = a.shape();
    if k == 0 || k > m.min(n) {
        return Err(Error::invalid(format!("rank {k} outside [1, {}]", m.min(n))));
    }
    a.ensure_finite("svd input")?;
    let use_jacobi = match method {
        SvdMethod::Jacobi => true,
        SvdMethod::Lanczos => false,
        SvdMethod::Auto => m < DENSE_LIMIT && n < DENSE_LIMIT,
    };
    let (mut u, s, mut v) = if use_jacobi {
        let d = jacobi::jacobi_svd(a);
        (d.u.leading_columns(k), d.s[..k].to_vec(), d.v.leading_columns(k))
    } else if m >= n {
        let d = lanczos::lanczos_svd(a, k, seed);
        (d.u, d.s, d.v)
    } else {
        let d = lanczos::lanczos_svd(&a.transpose(), k, seed);
        (d.v, d.s, d.u)
    };
    for c in 0..k {
        if needs_flip(&u, c) {
            flip(&mut u, c);
            flip(&mut v, c);
        }
    }
    Ok(SvdTruncation { u, s, v, rank: k })
}

impl SvdTruncation {
    /// `U diag(s) Vᵀ`.
    pub fn low_rank_approx(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows(), self.rank, |i, j| self.u[(i, j)] * self.s[j]);
        matmul(&us, &self.v.transpose()).expect("consistent truncation")
    }
}

/// `U diag(s) Vᵀ` for a truncation.
pub fn low_rank_approx(t: &SvdTruncation) -> Matrix {
    t.low_rank_approx()
}

/// Sum of the `k` largest singular values, the maximum of `tr(XᵀAY)` over
/// column-orthonormal `X`, `Y` with `k` columns.
pub fn kyfan_value(a: &Matrix, k: usize) -> Result<f64> {
    Ok(truncated_svd(a, k, 0)?.s.iter().sum())
}

/// The `k` algebraically largest eigenvalues of a symmetric matrix, in
/// descending order, with orthonormal eigenvectors as columns.
pub fn symmetric_top_eigs(h: &Matrix, k: usize) -> Result<(Vector, Matrix)> {
    if !h.is_square() {
        return Err(Error::dims("symmetric_top_eigs", format!("{}x{} is not square", h.rows(), h.cols())));
    }
    let n = h.rows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("eigenpair count {k} outside [1, {n}]")));
    }
    h.ensure_finite("eigen input")?;
    if !h.is_symmetric(1e-12 * h.max_abs().max(1.0)) {
        return Err(Error::NotSymmetric);
    }
    let (vals, vecs) = eigen::symmetric_eigen(h);
    let mut out = Matrix::zeros(n, k);
    let mut top = Vec::with_capacity(k);
    for c in 0..k {
        let src = n - 1 - c;
        top.push(vals[src]);
        for i in 0..n {
            out[(i, c)] = vecs[(i, src)];
        }
        if needs_flip(&out, c) {
            flip(&mut out, c);
        }
    }
    Ok((top, out))
}

fn needs_flip(m: &Matrix, c: usize) -> bool {
    let mut best = 0.0;
    let mut sign = 1.0;
    for i in 0..m.rows() {
        let x = m[(i, c)];
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    sign < 0.0
}

fn flip(m: &mut Matrix, c: usize) {
    for i in 0..m.rows() {
        m[(i, c)] = -m[(i, c)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
        Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn check_triplets(a: &Matrix, t: &SvdTruncation) {
        let k = t.rank;
        let utu = matmul(&t.u.transpose(), &t.u).unwrap();
        let vtv = matmul(&t.v.transpose(), &t.v).unwrap();
        assert!(utu.sub(&Matrix::identity(k)).unwrap().frobenius_norm() <= 1e-8);
        assert!(vtv.sub(&Matrix::identity(k)).unwrap().frobenius_norm() <= 1e-8);
        assert!(t.s.windows(2).all(|w| w[0] >= w[1]) && t.s.iter().all(|&s| s >= 0.0));
        let s1 = t.s[0];
        for c in 0..k {
            let av = a.mul_vec(&t.v.column(c)).unwrap();
            let atu = a.tr_mul_vec(&t.u.column(c)).unwrap();
            let uc = t.u.column(c);
            let vc = t.v.column(c);
            for (x, y) in av.iter().zip(&uc) {
                assert!((x - t.s[c] * y).abs() <= 1e-6 * s1);
            }
            for (x, y) in atu.iter().zip(&vc) {
                assert!((x - t.s[c] * y).abs() <= 1e-6 * s1);
            }
        }
    }

    #[test]
    fn diagonal_input() {
        let a = Matrix::diag(&[3.0, 2.0, 1.0]);
        let t = truncated_svd(&a, 2, 0).unwrap();
        assert!((t.s[0] - 3.0).abs() < 1e-14 && (t.s[1] - 2.0).abs() < 1e-14);
        assert!((kyfan_value(&a, 2).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn rank_out_of_range() {
        let a = Matrix::identity(3);
        assert!(truncated_svd(&a, 0, 0).is_err());
        assert!(truncated_svd(&a, 4, 0).is_err());
    }

    #[test]
    fn lanczos_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(m, n, k) in &[(120, 80, 5), (70, 150, 3), (90, 90, 20), (30, 10, 10)] {
            let a = random(&mut rng, m, n);
            let l = truncated_svd_with(&a, k, 1, SvdMethod::Lanczos).unwrap();
            let j = truncated_svd_with(&a, k, 0, SvdMethod::Jacobi).unwrap();
            for (x, y) in l.s.iter().zip(&j.s) {
                assert!((x - y).abs() <= 1e-8 * y);
            }
            check_triplets(&a, &l);
            check_triplets(&a, &j);
        }
    }

    #[test]
    fn lanczos_handles_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random(&mut rng, 100, 3);
        let c = random(&mut rng, 3, 80);
        let a = matmul(&b, &c).unwrap();
        let l = truncated_svd_with(&a, 6, 2, SvdMethod::Lanczos).unwrap();
        let j = truncated_svd_with(&a, 6, 0, SvdMethod::Jacobi).unwrap();
        for (x, y) in l.s.iter().zip(&j.s) {
            assert!((x - y).abs() <= 1e-8 * j.s[0]);
        }
        check_triplets(&a, &l);
        assert!(l.low_rank_approx().max_abs_diff(&a) < 1e-10 * a.max_abs());
    }

    #[test]
    fn seeds_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(&mut rng, 100, 70);
        let x = truncated_svd_with(&a, 4, 1, SvdMethod::Lanczos).unwrap();
        let y = truncated_svd_with(&a, 4, 99, SvdMethod::Lanczos).unwrap();
        for (p, q) in x.s.iter().zip(&y.s) {
            assert!((p - q).abs() <= 1e-9 * p);
        }
        assert!(x.low_rank_approx().max_abs_diff(&y.low_rank_approx()) < 1e-7);
    }

    #[test]
    fn sign_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random(&mut rng, 9, 6);
        let t = truncated_svd(&a, 4, 0).unwrap();
        for c in 0..4 {
            let col = t.u.column(c);
            let big = col.iter().copied().max_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap();
            assert!(big > 0.0);
        }
    }

    #[test]
    fn full_rank_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random(&mut rng, 6, 4);
        let t = truncated_svd(&a, 4, 0).unwrap();
        assert!(t.low_rank_approx().sub(&a).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
        let b = Matrix::from_fn(5, 3, |i, j| (i as f64 + 1.0) * (2.0 - j as f64 * 0.5));
        let t = truncated_svd(&b, 1, 0).unwrap();
        assert!(t.low_rank_approx().max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn eigs_small_cases() {
        let (l, u) = symmetric_top_eigs(&Matrix::diag(&[5.0, 1.0]), 1).unwrap();
        assert_eq!(l, vec![5.0]);
        assert!((u[(0, 0)] - 1.0).abs() < 1e-15 && u[(1, 0)].abs() < 1e-15);
        let (l, _) = symmetric_top_eigs(&Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap(), 2).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] + 1.0).abs() < 1e-14);
        let ns = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        assert!(matches!(symmetric_top_eigs(&ns, 1), Err(Error::NotSymmetric)));
        assert!(symmetric_top_eigs(&Matrix::identity(2), 3).is_err());
    }
}

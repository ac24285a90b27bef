use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nmfkit::linalg::{degree_normalize, matmul};
use nmfkit::nmf::{AnlsState, NmfInit};
use nmfkit::nnls::nnls_solve_traced;
use nmfkit::svd::{symmetric_top_eigs, truncated_svd, truncated_svd_with, SvdMethod};
use nmfkit::Matrix;

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn singular_values_desc(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[test]
fn top_eigenpairs_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [5, 30, 90] {
        let r = random(&mut rng, n, n);
        let h = r.add(&r.transpose()).unwrap();
        let k = 4.min(n);
        let (vals, vecs) = symmetric_top_eigs(&h, k).unwrap();
        let oracle = SymmetricEigen::new(to_na(&h));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| oracle.eigenvalues[j].total_cmp(&oracle.eigenvalues[i]));
        for (c, &o) in order.iter().take(k).enumerate() {
            assert!((vals[c] - oracle.eigenvalues[o]).abs() <= 1e-9 * (1.0 + vals[c].abs()));
            let dot: f64 = (0..n).map(|i| vecs[(i, c)] * oracle.eigenvectors[(i, o)]).sum();
            assert!((dot.abs() - 1.0).abs() <= 1e-8, "n={n} c={c} dot={dot}");
        }
    }
}

#[test]
fn lanczos_matches_nalgebra_on_large_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (m, n) in [(120, 80), (70, 150)] {
        let a = random(&mut rng, m, n);
        let t = truncated_svd_with(&a, 6, 3, SvdMethod::Lanczos).unwrap();
        let oracle = singular_values_desc(&a);
        for i in 0..6 {
            assert!((t.s[i] - oracle[i]).abs() <= 1e-9 * oracle[0], "{m}x{n} sigma {i}");
        }
        let av = matmul(&a, &t.v).unwrap();
        let us = Matrix::from_fn(m, 6, |i, j| t.u[(i, j)] * t.s[j]);
        assert!(av.max_abs_diff(&us) <= 1e-8 * oracle[0]);
    }
}

#[test]
fn auto_and_jacobi_agree_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = rng.random_range(2..=20);
        let n = rng.random_range(2..=15);
        let a = random(&mut rng, m, n);
        let k = m.min(n);
        let oracle = singular_values_desc(&a);
        for method in [SvdMethod::Auto, SvdMethod::Jacobi] {
            let t = truncated_svd_with(&a, k, 0, method).unwrap();
            for i in 0..k {
                assert!((t.s[i] - oracle[i]).abs() <= 1e-10 * (1.0 + oracle[0]));
            }
        }
    }
}

#[test]
fn bipartite_eigenvalues_equal_singular_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let m = rng.random_range(2..=20);
        let n = rng.random_range(2..=15);
        let r = random(&mut rng, m, n);
        let psi = Matrix::from_fn(m + n, m + n, |i, j| match (i < m, j < m) {
            (true, false) => r[(i, j - m)],
            (false, true) => r[(j, i - m)],
            _ => 0.0,
        });
        let k = m.min(n);
        let (vals, _) = symmetric_top_eigs(&psi, k).unwrap();
        let t = truncated_svd(&r, k, 0).unwrap();
        for (i, (v, s)) in vals.iter().zip(&t.s).enumerate() {
            assert!((v - s).abs() <= 1e-9, "{m}x{n} index {i}");
        }
    }
}

#[test]
fn anls_half_steps_descend() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..20 {
        let a = Matrix::from_fn(9, 7, |_, _| rng.random::<f64>());
        let mut s = AnlsState::new(&a, 1 + t % 3, NmfInit::Seed(t as u64)).unwrap();
        let mut prev = s.objective();
        for _ in 0..15 {
            s.update_b().unwrap();
            let after_b = s.objective();
            assert!(after_b <= prev + 1e-10);
            s.update_c().unwrap();
            let after_c = s.objective();
            assert!(after_c <= after_b + 1e-10);
            prev = after_c;
        }
    }
}

#[test]
fn nnls_never_revisits_a_passive_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let m = rng.random_range(3..=12);
        let n = rng.random_range(1..=8);
        let a = random(&mut rng, m, n);
        let b: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let (_, sets) = nnls_solve_traced(&a, &b, 1e-10).unwrap();
        let unique: HashSet<Vec<usize>> = sets.iter().cloned().collect();
        assert_eq!(unique.len(), sets.len());
    }
}

#[test]
fn degree_normalize_idempotent_on_regular_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3, 6, 10] {
        // symmetric doubly stochastic: average of permutation matrices and their transposes
        let mut a = Matrix::zeros(n, n);
        for _ in 0..4 {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            for (i, &j) in perm.iter().enumerate() {
                a[(i, j)] += 0.125;
                a[(j, i)] += 0.125;
            }
        }
        let once = degree_normalize(&a).unwrap();
        let twice = degree_normalize(&once).unwrap();
        assert!(once.max_abs_diff(&twice) <= 1e-12);
    }
}

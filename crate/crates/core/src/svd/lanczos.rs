//! Golub–Kahan–Lanczos bidiagonalization with full reorthogonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{axpy, dot, norm2, Matrix};

use super::jacobi::{jacobi_svd, DenseSvd};

const CONVERGENCE: f64 = 1e-10;

/// Top-`k` singular triplets of a tall (`m >= n`) matrix.
pub(crate) fn lanczos_svd(a: &Matrix, k: usize, seed: u64) -> DenseSvd {
    let (m, n) = a.shape();
    debug_assert!(m >= n && k >= 1 && k <= n);
    let at = a.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = a.frobenius_norm();
    let tiny = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let mut us: Vec<Vec<f64>> = Vec::new();
    let mut vs: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = random_orthogonal(&mut rng, n, &vs);
    let mut p = n.min((2 * k + 10).max(24));
    loop {
        while vs.len() < p {
            vs.push(v.clone());
            let j = vs.len() - 1;
            let mut u = a.mul_vec(&vs[j]).expect("shape");
            if j > 0 {
                axpy(-betas[j - 1], &us[j - 1], &mut u);
            }
            reorthogonalize(&mut u, &us);
            let mut alpha = norm2(&u);
            if alpha <= tiny {
                alpha = 0.0;
                u = random_orthogonal(&mut rng, m, &us);
            } else {
                u.iter_mut().for_each(|x| *x /= alpha);
            }
            us.push(u);
            alphas.push(alpha);

            let mut w = at.mul_vec(&us[j]).expect("shape");
            axpy(-alpha, &vs[j], &mut w);
            reorthogonalize(&mut w, &vs);
            let mut beta = norm2(&w);
            if vs.len() == n {
                beta = 0.0;
                w = vec![0.0; n];
            } else if beta <= tiny {
                beta = 0.0;
                w = random_orthogonal(&mut rng, n, &vs);
            } else {
                w.iter_mut().for_each(|x| *x /= beta);
            }
            betas.push(beta);
            v = w;
        }

        let bmat = Matrix::from_fn(p, p, |i, j| {
            if i == j {
                alphas[i]
            } else if j == i + 1 {
                betas[i]
            } else {
                0.0
            }
        });
        let small = jacobi_svd(&bmat);
        let residual = betas[p - 1];
        let s1 = small.s[0];
        let converged = p == n
            || residual == 0.0
            || (0..k).all(|c| residual * small.u[(p - 1, c)].abs() <= CONVERGENCE * s1.max(f64::MIN_POSITIVE));
        if converged {
            let u = Matrix::from_fn(m, k, |i, c| (0..p).map(|t| us[t][i] * small.u[(t, c)]).sum());
            let vv = Matrix::from_fn(n, k, |i, c| (0..p).map(|t| vs[t][i] * small.v[(t, c)]).sum());
            return DenseSvd { u, s: small.s[..k].to_vec(), v: vv };
        }
        p = n.min(2 * p);
    }
}

fn reorthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let d = dot(x, b);
            axpy(-d, b, x);
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, len: usize, basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        reorthogonalize(&mut x, basis);
        let nrm = norm2(&x);
        if nrm > 1e-8 {
            x.iter_mut().for_each(|v| *v /= nrm);
            return x;
        }
    }
}

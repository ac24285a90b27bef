//! One-sided (Hestenes) Jacobi SVD for small dense matrices.

use crate::linalg::{dot, norm2, Matrix};

/// Full thin SVD `A = U diag(S) Vᵀ` with `U` m×p, `V` n×p, `p = min(m, n)`,
/// singular values sorted descending.
pub(crate) struct DenseSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub(crate) fn jacobi_svd(a: &Matrix) -> DenseSvd {
    if a.rows() < a.cols() {
        let t = jacobi_svd(&a.transpose());
        return DenseSvd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = a.shape();
    // work on columns
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    const EPS: f64 = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]).then(i.cmp(&j)));

    let smax = sig.iter().copied().fold(0.0, f64::max);
    let tiny = smax * (m.max(n) as f64) * f64::EPSILON;
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    let mut s = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for (pos, &j) in order.iter().enumerate() {
        s.push(sig[j]);
        vs.push(vcols[j].clone());
        if sig[j] > tiny && sig[j] > 0.0 {
            ucols.push(cols[j].iter().map(|x| x / sig[j]).collect());
        } else {
            ucols.push(vec![0.0; m]);
            missing.push(pos);
        }
    }
    complete_orthonormal(&mut ucols, &missing);

    DenseSvd {
        u: Matrix::from_columns(m, &ucols).expect("consistent"),
        s,
        v: Matrix::from_columns(n, &vs).expect("consistent"),
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the listed columns with unit vectors orthogonal to all others.
pub(crate) fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = cols[0].len();
    let mut candidate = 0usize;
    for &pos in missing {
        loop {
            assert!(candidate < m, "cannot complete orthonormal basis");
            let mut e = vec![0.0; m];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k == pos || (missing.contains(&k) && norm2(c) == 0.0) {
                        continue;
                    }
                    let d = dot(&e, c);
                    for (ei, ci) in e.iter_mut().zip(c) {
                        *ei -= d * ci;
                    }
                }
            }
            let nrm = norm2(&e);
            if nrm > 1e-8 {
                cols[pos] = e.into_iter().map(|x| x / nrm).collect();
                break;
            }
        }
    }
}

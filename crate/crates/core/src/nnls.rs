//! Nonnegativity-constrained least squares, `min ½‖Ax − b‖² s.t. x ≥ 0`.
//!
//! Lawson–Hanson active-set iteration on the normal equations. The free
//! (passive) subproblem is solved with a Cholesky factorization of the
//! corresponding block of `AᵀA`; when that block is numerically singular the
//! variable whose pivot collapsed is returned to the active set.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix, Vector};

/// Default KKT tolerance on gradient components.
pub const DEFAULT_TOL: f64 = 1e-10;

const PIVOT_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct NnlsSolution {
    /// Minimizer, nonnegative with exact zeros on the active set.
    pub x: Vector,
    /// `‖Ax − b‖₂`.
    pub residual_norm: f64,
    /// Outer active-set iterations.
    pub iterations: usize,
    /// Indices held at zero.
    pub active_set: Vec<usize>,
}

/// Solves a single NNLS problem.
pub fn nnls_solve(a: &Matrix, b: &[f64], tol: f64) -> Result<NnlsSolution> {
    validate(a, b.len(), tol)?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }
    let gram = a.gram();
    let atb = a.tr_mul_vec(b)?;
    let (x, iterations, _) = solve_normal(&gram, &atb, tol, false);
    Ok(finish(a, b, x, iterations))
}

/// Solves one NNLS problem per column of `rhs` with a shared `AᵀA`.
/// Column `j` of the result is the solution for column `j` of `rhs`.
pub fn nnls_multi(a: &Matrix, rhs: &Matrix, tol: f64) -> Result<Matrix> {
    validate(a, rhs.rows(), tol)?;
    rhs.ensure_finite("right-hand side")?;
    let gram = a.gram();
    let n = a.cols();
    let columns: Vec<Vector> = (0..rhs.cols())
        .into_par_iter()
        .map(|j| {
            let b = rhs.column(j);
            let atb = a.tr_mul_vec(&b).expect("shape checked");
            solve_normal(&gram, &atb, tol, false).0
        })
        .collect();
    Matrix::from_columns(n, &columns)
}

/// Like [`nnls_solve`] but also returns the passive set entered at each
/// outer iteration. Used to check that no set is visited twice.
#[doc(hidden)]
pub fn nnls_solve_traced(a: &Matrix, b: &[f64], tol: f64) -> Result<(NnlsSolution, Vec<Vec<usize>>)> {
    validate(a, b.len(), tol)?;
    let gram = a.gram();
    let atb = a.tr_mul_vec(b)?;
    let (x, iterations, trace) = solve_normal(&gram, &atb, tol, true);
    Ok((finish(a, b, x, iterations), trace))
}

fn validate(a: &Matrix, b_len: usize, tol: f64) -> Result<()> {
    if a.rows() != b_len {
        return Err(Error::dims("nnls", format!("A has {} rows, b has length {b_len}", a.rows())));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("nnls tolerance must be positive, got {tol}")));
    }
    a.ensure_finite("nnls matrix")
}

fn finish(a: &Matrix, b: &[f64], x: Vector, iterations: usize) -> NnlsSolution {
    let ax = a.mul_vec(&x).expect("shape checked");
    let residual_norm = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let active_set = x.iter().enumerate().filter(|(_, &v)| v == 0.0).map(|(i, _)| i).collect();
    NnlsSolution { x, residual_norm, iterations, active_set }
}

/// Active-set loop on the normal equations `G x = Aᵀb`.
fn solve_normal(gram: &Matrix, atb: &[f64], tol: f64, trace: bool) -> (Vector, usize, Vec<Vec<usize>>) {
    let n = atb.len();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    // variables that failed to enter since the last productive step
    let mut blocked = vec![false; n];
    let mut visited = Vec::new();
    let max_outer = 3 * n + 10;
    let mut iterations = 0;

    while iterations < max_outer {
        let w = gradient_dual(gram, atb, &x);
        let entering = (0..n)
            .filter(|&i| !passive[i] && !blocked[i] && w[i] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = entering else { break };
        iterations += 1;
        passive[j] = true;

        let mut progressed = false;
        let mut inner = 0;
        loop {
            inner += 1;
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            if idx.is_empty() {
                break;
            }
            let z = match solve_passive(gram, atb, &idx) {
                Ok(z) => z,
                Err(pos) => {
                    let k = idx[pos];
                    passive[k] = false;
                    x[k] = 0.0;
                    blocked[k] = true;
                    continue;
                }
            };
            if z.iter().all(|&v| v > 0.0) {
                for (&i, &v) in idx.iter().zip(&z) {
                    x[i] = v;
                }
                progressed = true;
                break;
            }
            // step toward z until the first passive variable hits zero
            let mut alpha = f64::INFINITY;
            let mut hit = None;
            for (&i, &zi) in idx.iter().zip(&z) {
                if zi <= 0.0 {
                    let t = x[i] / (x[i] - zi);
                    if t < alpha {
                        alpha = t;
                        hit = Some(i);
                    }
                }
            }
            if alpha > 0.0 {
                progressed = true;
            }
            for (&i, &zi) in idx.iter().zip(&z) {
                x[i] += alpha * (zi - x[i]);
            }
            for &i in &idx {
                if x[i] <= 0.0 || Some(i) == hit {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if inner > 3 * n + 10 {
                break;
            }
        }

        if progressed {
            blocked.iter_mut().for_each(|b| *b = false);
        }
        if !passive[j] && x[j] == 0.0 && !progressed {
            blocked[j] = true;
        }
        if trace {
            visited.push((0..n).filter(|&i| passive[i]).collect());
        }
    }
    (x, iterations, visited)
}

fn gradient_dual(gram: &Matrix, atb: &[f64], x: &[f64]) -> Vector {
    // w = Aᵀb − AᵀA x, the negative gradient
    (0..atb.len())
        .map(|i| {
            let gi = gram.row(i);
            atb[i] - gi.iter().zip(x).filter(|(_, &xv)| xv != 0.0).map(|(g, xv)| g * xv).sum::<f64>()
        })
        .collect()
}

/// Unconstrained least squares on the passive variables, with one step of
/// iterative refinement. `Err(pos)` names the collapsed pivot.
fn solve_passive(gram: &Matrix, atb: &[f64], idx: &[usize]) -> std::result::Result<Vector, usize> {
    let ch = Cholesky::of_submatrix(gram, idx, PIVOT_TOL)?;
    let rhs: Vector = idx.iter().map(|&i| atb[i]).collect();
    let mut z = ch.solve(&rhs);
    let r: Vector = idx
        .iter()
        .enumerate()
        .map(|(p, &i)| rhs[p] - idx.iter().zip(&z).map(|(&k, zk)| gram[(i, k)] * zk).sum::<f64>())
        .collect();
    let dz = ch.solve(&r);
    for (zi, d) in z.iter_mut().zip(dz) {
        *zi += d;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// KKT residuals: gradient g = Aᵀ(Ax − b).
    fn kkt_ok(a: &Matrix, b: &[f64], x: &[f64], tol: f64) -> bool {
        let ax = a.mul_vec(x).unwrap();
        let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
        let g = a.tr_mul_vec(&r).unwrap();
        x.iter().zip(&g).all(|(&xi, &gi)| xi >= 0.0 && if xi > 0.0 { gi.abs() <= tol } else { gi >= -tol })
    }

    #[test]
    fn unconstrained_optimum_feasible() {
        let s = nnls_solve(&Matrix::identity(2), &[3.0, 4.0], DEFAULT_TOL).unwrap();
        assert_eq!(s.x, vec![3.0, 4.0]);
        assert!(s.residual_norm < 1e-15);
        assert!(s.active_set.is_empty());
    }

    #[test]
    fn negative_correlation_forces_zero() {
        let a = Matrix::from_rows(&[[1.0], [1.0]]).unwrap();
        let s = nnls_solve(&a, &[-1.0, -1.0], DEFAULT_TOL).unwrap();
        assert_eq!(s.x, vec![0.0]);
        assert_eq!(s.active_set, vec![0]);
        assert!((s.residual_norm - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_variable_case_matches_enumeration() {
        // enumerating the four active sets by hand: only x = [1, 0] satisfies KKT
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let b = [1.0, -1.0];
        let s = nnls_solve(&a, &b, DEFAULT_TOL).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-14);
        assert_eq!(s.x[1], 0.0);
        assert!(kkt_ok(&a, &b, &s.x, 1e-10));
    }

    #[test]
    fn multi_matches_single_column_bitwise() {
        let a = Matrix::from_rows(&[
            [0.9, 0.1, 0.3],
            [0.2, 0.8, 0.5],
            [0.4, 0.4, 0.9],
            [0.7, 0.3, 0.1],
            [0.1, 0.6, 0.2],
            [0.5, 0.2, 0.7],
        ])
        .unwrap();
        let rhs = Matrix::from_fn(6, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5);
        let all = nnls_multi(&a, &rhs, DEFAULT_TOL).unwrap();
        for j in 0..4 {
            let single = nnls_solve(&a, &rhs.column(j), DEFAULT_TOL).unwrap();
            assert_eq!(all.column(j), single.x);
        }
        assert_eq!(nnls_multi(&Matrix::identity(2), &Matrix::identity(2), DEFAULT_TOL).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn zero_column_never_enters() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let s = nnls_solve(&a, &[2.0, 5.0], DEFAULT_TOL).unwrap();
        assert_eq!(s.x, vec![2.0, 0.0]);
    }

    #[test]
    fn rank_deficient_duplicate_columns() {
        let a = Matrix::from_rows(&[[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let b = [2.0, 2.0, 1.0];
        let s = nnls_solve(&a, &b, DEFAULT_TOL).unwrap();
        assert!(s.residual_norm < 1e-12);
        assert!(kkt_ok(&a, &b, &s.x, 1e-10));
    }

    #[test]
    fn errors() {
        let a = Matrix::identity(2);
        assert!(matches!(nnls_solve(&a, &[1.0], DEFAULT_TOL), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(nnls_solve(&a, &[1.0, f64::NAN], DEFAULT_TOL), Err(Error::NonFinite(_))));
        assert!(nnls_solve(&a, &[1.0, 1.0], 0.0).is_err());
        let bad = Matrix::from_rows(&[[f64::INFINITY, 0.0], [0.0, 1.0]]).unwrap();
        assert!(nnls_solve(&bad, &[1.0, 1.0], DEFAULT_TOL).is_err());
    }
}

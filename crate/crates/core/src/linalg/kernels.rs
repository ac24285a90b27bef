use crate::error::{Error, Result};

use super::Matrix;

/// Gaussian affinity between the rows of `points` (one point per row):
/// `exp(-‖xᵢ - xⱼ‖² / (2α²))` off the diagonal, zero on it.
///
/// Only the upper triangle is evaluated; the lower one is a copy, so the
/// result is symmetric bit for bit.
pub fn gaussian_affinity(points: &Matrix, alpha: f64) -> Result<Matrix> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("kernel width alpha must be positive, got {alpha}")));
    }
    let n = points.rows();
    if n < 2 {
        return Err(Error::invalid("affinity needs at least two points"));
    }
    points.ensure_finite("points")?;
    let denom = 2.0 * alpha * alpha;
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        let xi = points.row(i);
        for j in i + 1..n {
            let d2: f64 = xi.iter().zip(points.row(j)).map(|(p, q)| (p - q) * (p - q)).sum();
            let v = (-d2 / denom).exp();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// Symmetric degree normalization `D^{-1/2} A D^{-1/2}` with `Dᵢᵢ = Σⱼ aᵢⱼ`.
pub fn degree_normalize(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::dims("degree_normalize", format!("{}x{} is not square", a.rows(), a.cols())));
    }
    a.ensure_nonnegative("affinity")?;
    let inv_sqrt: Vec<f64> = a
        .row_sums()
        .into_iter()
        .enumerate()
        .map(|(i, d)| if d > 0.0 { Ok(1.0 / d.sqrt()) } else { Err(Error::ZeroDegree(i)) })
        .collect::<Result<_>>()?;
    let n = a.rows();
    // s_i * s_j is commutative, so a symmetric input stays exactly symmetric
    Ok(Matrix::from_fn(n, n, |i, j| a[(i, j)] * (inv_sqrt[i] * inv_sqrt[j])))
}

/// Column scaling `A D^{-1/2}` with `D = diag(AᵀAe)`.
pub fn xu_normalize(a: &Matrix) -> Result<Matrix> {
    a.ensure_nonnegative("term-document matrix")?;
    let row_sums = a.row_sums();
    let d = a.tr_mul_vec(&row_sums)?;
    let scale: Vec<f64> = d
        .into_iter()
        .enumerate()
        .map(|(j, dj)| if dj > 0.0 { Ok(1.0 / dj.sqrt()) } else { Err(Error::ZeroColumn(j)) })
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] * scale[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_points_have_unit_affinity() {
        let p = Matrix::from_rows(&[[0.3, -1.0], [0.3, -1.0]]).unwrap();
        let a = gaussian_affinity(&p, 0.7).unwrap();
        assert_eq!(a[(0, 1)], 1.0);
        assert_eq!(a[(0, 0)], 0.0);
    }

    #[test]
    fn kernel_value_at_alpha_sqrt2() {
        let alpha = 0.4;
        let p = Matrix::from_rows(&[[0.0, 0.0], [0.0, alpha * 2f64.sqrt()]]).unwrap();
        let a = gaussian_affinity(&p, alpha).unwrap();
        assert!((a[(0, 1)] - (-1f64).exp()).abs() < 1e-15);
        assert!((a[(0, 1)] - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn affinity_is_bitwise_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Matrix::from_fn(30, 3, |_, _| rng.random_range(-2.0..2.0));
        let a = gaussian_affinity(&p, 0.5).unwrap();
        assert_eq!(a, a.transpose());
        assert!(a.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn affinity_rejects_bad_alpha() {
        let p = Matrix::zeros(3, 2);
        assert!(gaussian_affinity(&p, 0.0).is_err());
        assert!(gaussian_affinity(&p, -1.0).is_err());
        assert!(gaussian_affinity(&Matrix::zeros(1, 2), 1.0).is_err());
    }

    #[test]
    fn degree_normalize_examples() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(degree_normalize(&a).unwrap(), a);
        let b = Matrix::from_rows(&[[0.0, 2.0], [2.0, 0.0]]).unwrap();
        assert!(degree_normalize(&b).unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn degree_normalize_zero_row_is_error() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(matches!(degree_normalize(&a), Err(Error::ZeroDegree(1))));
    }

    #[test]
    fn degree_normalize_fixes_unit_degree_matrices() {
        // doubly stochastic: every row sums to one, so normalization is the identity map
        let a = Matrix::from_rows(&[[0.0, 0.25, 0.75], [0.25, 0.5, 0.25], [0.75, 0.25, 0.0]]).unwrap();
        let once = degree_normalize(&a).unwrap();
        let twice = degree_normalize(&once).unwrap();
        assert!(once.max_abs_diff(&a) <= 1e-12);
        assert!(once.max_abs_diff(&twice) <= 1e-12);
    }

    #[test]
    fn xu_normalize_single_column() {
        let a = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
        let n = xu_normalize(&a).unwrap();
        assert!((n[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((n[(1, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn xu_normalize_identity_is_unchanged() {
        let a = Matrix::identity(3);
        assert_eq!(xu_normalize(&a).unwrap(), a);
    }

    #[test]
    fn xu_normalize_zero_column_is_error() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert!(matches!(xu_normalize(&a), Err(Error::ZeroColumn(1))));
        let neg = Matrix::from_rows(&[[1.0, -1.0]]).unwrap();
        assert!(xu_normalize(&neg).is_err());
    }
}

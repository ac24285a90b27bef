use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{matmul, Cholesky, Matrix};

use super::check_shapes;

const SINGULAR_TOL: f64 = 1e-12;

/// First-order optimality diagnostics for `min ½‖A − BC‖²` over `B, C ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `BCCᵀ − ACᵀ`, the multiplier estimate for `B ≥ 0`.
    #[serde(skip)]
    pub gamma_b: Matrix,
    /// `BᵀBC − BᵀA`, the multiplier estimate for `C ≥ 0`.
    #[serde(skip)]
    pub gamma_c_t: Matrix,
    /// `‖Γ_B ⊙ B‖_∞`.
    pub comp_slack_b: f64,
    /// `‖Γ_Cᵀ ⊙ C‖_∞`.
    pub comp_slack_c: f64,
    /// `max(0, −min Γ_B)`.
    pub dual_feas_b: f64,
    /// `max(0, −min Γ_Cᵀ)`.
    pub dual_feas_c: f64,
    /// `‖B − (ACᵀ + Γ_B)(CCᵀ)⁻¹‖_F / ‖B‖_F`, `None` when `CCᵀ` is singular.
    pub reconstruction_b: Option<f64>,
    /// `‖C − (BᵀB)⁻¹(BᵀA + Γ_Cᵀ)‖_F / ‖C‖_F`, `None` when `BᵀB` is singular.
    pub reconstruction_c: Option<f64>,
}

impl KktReport {
    /// Largest of the four scalar residuals.
    pub fn max_residual(&self) -> f64 {
        self.comp_slack_b.max(self.comp_slack_c).max(self.dual_feas_b).max(self.dual_feas_c)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Evaluates the multiplier estimates and residuals at `(B, C)`.
pub fn kkt_report(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<KktReport> {
    check_shapes(a, b, c)?;
    let cct = matmul(c, &c.transpose())?;
    let btb = b.gram();
    let act = matmul(a, &c.transpose())?;
    let bta = matmul(&b.transpose(), a)?;
    let gamma_b = matmul(b, &cct)?.sub(&act)?;
    let gamma_c_t = matmul(&btb, c)?.sub(&bta)?;

    let comp_slack_b = gamma_b.hadamard(b)?.max_abs();
    let comp_slack_c = gamma_c_t.hadamard(c)?.max_abs();
    let dual_feas_b = (-gamma_b.min_value()).max(0.0);
    let dual_feas_c = (-gamma_c_t.min_value()).max(0.0);

    // B = (ACᵀ + Γ_B)(CCᵀ)⁻¹, solved row by row since CCᵀ is symmetric
    let reconstruction_b = Cholesky::new(&cct, SINGULAR_TOL).ok().map(|ch| {
        let rhs = act.add(&gamma_b).expect("same shape");
        let rows: Vec<Vec<f64>> = (0..rhs.rows()).map(|i| ch.solve(rhs.row(i))).collect();
        let rebuilt = Matrix::from_rows(&rows).expect("consistent");
        relative(&rebuilt, b)
    });
    let reconstruction_c = Cholesky::new(&btb, SINGULAR_TOL).ok().map(|ch| {
        let rhs = bta.add(&gamma_c_t).expect("same shape");
        let cols: Vec<Vec<f64>> = (0..rhs.cols()).map(|j| ch.solve(&rhs.column(j))).collect();
        let rebuilt = Matrix::from_columns(rhs.rows(), &cols).expect("consistent");
        relative(&rebuilt, c)
    });

    Ok(KktReport {
        gamma_b,
        gamma_c_t,
        comp_slack_b,
        comp_slack_c,
        dual_feas_b,
        dual_feas_c,
        reconstruction_b,
        reconstruction_c,
    })
}

fn relative(rebuilt: &Matrix, original: &Matrix) -> f64 {
    let diff = rebuilt.sub(original).expect("same shape").frobenius_norm();
    let scale = original.frobenius_norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_factorization_is_stationary() {
        let b = Matrix::from_rows(&[[1.0, 0.5], [0.2, 2.0], [0.0, 1.0]]).unwrap();
        let c = Matrix::from_rows(&[[1.0, 0.0, 3.0, 0.5], [0.5, 1.0, 0.0, 2.0]]).unwrap();
        let a = matmul(&b, &c).unwrap();
        let r = kkt_report(&a, &b, &c).unwrap();
        assert!(r.max_residual() <= 1e-10);
        assert!(r.reconstruction_b.unwrap() < 1e-12);
        assert!(r.reconstruction_c.unwrap() < 1e-12);
    }

    #[test]
    fn random_point_is_not_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Matrix::from_fn(6, 5, |_, _| rng.random::<f64>());
        let b = Matrix::from_fn(6, 2, |_, _| rng.random::<f64>());
        let c = Matrix::from_fn(2, 5, |_, _| rng.random::<f64>());
        assert!(kkt_report(&a, &b, &c).unwrap().max_residual() > 1e-3);
    }

    #[test]
    fn singular_gram_is_flagged() {
        let a = Matrix::identity(2);
        let b = Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        let c = Matrix::from_rows(&[[1.0, 1.0], [0.0, 0.0]]).unwrap();
        let r = kkt_report(&a, &b, &c).unwrap();
        assert!(r.reconstruction_b.is_none() && r.reconstruction_c.is_none());
        assert!(r.max_residual().is_finite());
    }
}

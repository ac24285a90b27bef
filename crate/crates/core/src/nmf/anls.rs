use crate::error::Result;
use crate::linalg::Matrix;
use crate::nnls::{nnls_multi, DEFAULT_TOL};

use super::{kkt_report, objective, resolve_init, validate_problem, FactorPair, NmfInit, StopReason};

/// Iterate of alternating nonnegative least squares.
#[derive(Clone, Debug)]
pub struct AnlsState<'a> {
    a: &'a Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl<'a> AnlsState<'a> {
    pub fn new(a: &'a Matrix, k: usize, init: NmfInit) -> Result<Self> {
        validate_problem(a, k)?;
        let (b, c) = resolve_init(a, k, init, false)?;
        Ok(AnlsState { a, b, c })
    }

    /// `B ← argmin_{B ≥ 0} ½‖A − BC‖²`, one NNLS problem per row of `B`.
    pub fn update_b(&mut self) -> Result<()> {
        self.b = nnls_multi(&self.c.transpose(), &self.a.transpose(), DEFAULT_TOL)?.transpose();
        Ok(())
    }

    /// `C ← argmin_{C ≥ 0} ½‖A − BC‖²`, one NNLS problem per column of `C`.
    pub fn update_c(&mut self) -> Result<()> {
        self.c = nnls_multi(&self.b, self.a, DEFAULT_TOL)?;
        Ok(())
    }

    pub fn objective(&self) -> f64 {
        objective(self.a, &self.b, &self.c).expect("shape")
    }
}

/// Alternating exact NNLS solves until every KKT residual is at most
/// `kkt_tol` or `max_iter` sweeps have run.
pub fn nmf_anls(a: &Matrix, k: usize, init: impl Into<NmfInit>, max_iter: usize, kkt_tol: f64) -> Result<FactorPair> {
    let mut st = AnlsState::new(a, k, init.into())?;
    let mut trace = vec![st.objective()];
    let mut stop_reason = StopReason::MaxIter;
    let mut iterations = 0;
    while iterations < max_iter {
        st.update_b()?;
        st.update_c()?;
        iterations += 1;
        trace.push(st.objective());
        if kkt_report(a, &st.b, &st.c)?.within(kkt_tol) {
            stop_reason = StopReason::KktTol;
            break;
        }
    }
    log::debug!("ANLS NMF: {iterations} iterations, {stop_reason:?}");
    Ok(FactorPair { b: st.b, c: st.c, rank: k, objective_trace: trace, iterations, stop_reason })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factorizes_exactly() {
        let a = Matrix::identity(2);
        let f = nmf_anls(&a, 2, 0, 100, 1e-12).unwrap();
        assert!(f.final_objective() <= 1e-10);
        assert_eq!(f.stop_reason, StopReason::KktTol);
    }

    #[test]
    fn half_steps_descend() {
        let a = Matrix::from_fn(8, 6, |i, j| ((i * 5 + j * 3) % 7) as f64);
        let mut st = AnlsState::new(&a, 2, NmfInit::Seed(4)).unwrap();
        let mut prev = st.objective();
        for _ in 0..20 {
            st.update_b().unwrap();
            let mid = st.objective();
            st.update_c().unwrap();
            let cur = st.objective();
            assert!(mid <= prev + 1e-10 && cur <= mid + 1e-10);
            prev = cur;
        }
    }
}

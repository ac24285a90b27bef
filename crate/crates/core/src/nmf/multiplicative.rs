use crate::error::Result;
use crate::linalg::{matmul, Matrix};

use super::{objective, resolve_init, validate_problem, FactorPair, NmfInit, StopReason};

/// Denominator guard.
pub const DELTA: f64 = 1e-12;

/// Iterate of the multiplicative update scheme.
#[derive(Clone, Debug)]
pub struct MultiplicativeState<'a> {
    a: &'a Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl<'a> MultiplicativeState<'a> {
    pub fn new(a: &'a Matrix, k: usize, init: NmfInit) -> Result<Self> {
        validate_problem(a, k)?;
        let (b, c) = resolve_init(a, k, init, true)?;
        Ok(MultiplicativeState { a, b, c })
    }

    /// `B ← B ⊙ (ACᵀ) ⊘ (BCCᵀ + δ)`.
    pub fn update_b(&mut self) {
        let ct = self.c.transpose();
        let num = matmul(self.a, &ct).expect("shape");
        let den = matmul(&self.b, &matmul(&self.c, &ct).expect("shape")).expect("shape");
        apply(&mut self.b, &num, &den);
    }

    /// `C ← C ⊙ (BᵀA) ⊘ (BᵀBC + δ)`.
    pub fn update_c(&mut self) {
        let bt = self.b.transpose();
        let num = matmul(&bt, self.a).expect("shape");
        let den = matmul(&self.b.gram(), &self.c).expect("shape");
        apply(&mut self.c, &num, &den);
    }

    pub fn objective(&self) -> f64 {
        objective(self.a, &self.b, &self.c).expect("shape")
    }
}

fn apply(x: &mut Matrix, num: &Matrix, den: &Matrix) {
    for ((xv, n), d) in x.as_mut_slice().iter_mut().zip(num.as_slice()).zip(den.as_slice()) {
        *xv *= n / (d + DELTA);
    }
}

/// Alternates `B` and `C` updates until `max_iter` or until the relative
/// objective decrease falls below `stall_tol`.
pub fn nmf_multiplicative(
    a: &Matrix,
    k: usize,
    init: impl Into<NmfInit>,
    max_iter: usize,
    stall_tol: f64,
) -> Result<FactorPair> {
    let mut st = MultiplicativeState::new(a, k, init.into())?;
    let mut trace = vec![st.objective()];
    let mut stop_reason = StopReason::MaxIter;
    let mut iterations = 0;
    while iterations < max_iter {
        st.update_b();
        st.update_c();
        iterations += 1;
        let prev = *trace.last().expect("nonempty");
        let cur = st.objective();
        trace.push(cur);
        if prev <= 0.0 || (prev - cur) / prev < stall_tol {
            stop_reason = StopReason::ObjectiveStall;
            break;
        }
    }
    log::debug!("multiplicative NMF: {iterations} iterations, {stop_reason:?}");
    Ok(FactorPair { b: st.b, c: st.c, rank: k, objective_trace: trace, iterations, stop_reason })
}

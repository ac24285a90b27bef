//! Nonnegative matrix factorization `A ≈ BC` under the Frobenius loss.
//!
//! Two solvers are provided: Lee–Seung multiplicative updates and
//! alternating nonnegative least squares, where every half-step is solved
//! exactly by [`crate::nnls`]. Both are exposed as step-wise state machines
//! as well as run-to-completion functions.

mod anls;
pub mod io;
mod kkt;
mod multiplicative;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix};

pub use anls::{nmf_anls, AnlsState};
pub use kkt::{kkt_report, KktReport};
pub use multiplicative::{nmf_multiplicative, MultiplicativeState, DELTA};

pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_STALL_TOL: f64 = 1e-6;
/// Relative KKT tolerance; the absolute threshold is this times `‖A‖_F`.
pub const DEFAULT_KKT_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIter,
    ObjectiveStall,
    KktTol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmfSolver {
    /// Lee–Seung multiplicative updates.
    Multiplicative,
    /// Alternating nonnegative least squares.
    Anls,
}

/// Starting point for a solver.
#[derive(Clone, Debug, PartialEq)]
pub enum NmfInit {
    /// Random factors drawn from the seeded generator.
    Seed(u64),
    /// Explicit factors.
    Given { b: Matrix, c: Matrix },
}

impl From<u64> for NmfInit {
    fn from(seed: u64) -> Self {
        NmfInit::Seed(seed)
    }
}

/// Output of an NMF run.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorPair {
    /// M×K basis, nonnegative.
    pub b: Matrix,
    /// K×N coefficients, nonnegative.
    pub c: Matrix,
    pub rank: usize,
    /// `½‖A − BC‖²` at the starting point followed by one value per iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

impl FactorPair {
    pub fn product(&self) -> Matrix {
        matmul(&self.b, &self.c).expect("consistent factors")
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts with the initial objective")
    }
}

/// Parameters shared by [`factorize`].
#[derive(Clone, Debug, PartialEq)]
pub struct NmfOptions {
    pub max_iter: usize,
    pub stall_tol: f64,
    /// Absolute KKT tolerance; `None` means `1e-6·‖A‖_F`.
    pub kkt_tol: Option<f64>,
}

impl Default for NmfOptions {
    fn default() -> Self {
        NmfOptions { max_iter: DEFAULT_MAX_ITER, stall_tol: DEFAULT_STALL_TOL, kkt_tol: None }
    }
}

/// Runs the selected solver with the given options.
pub fn factorize(a: &Matrix, k: usize, solver: NmfSolver, init: NmfInit, opts: &NmfOptions) -> Result<FactorPair> {
    match solver {
        NmfSolver::Multiplicative => nmf_multiplicative(a, k, init, opts.max_iter, opts.stall_tol),
        NmfSolver::Anls => {
            let tol = opts.kkt_tol.unwrap_or_else(|| default_kkt_tol(a));
            nmf_anls(a, k, init, opts.max_iter, tol)
        }
    }
}

pub fn default_kkt_tol(a: &Matrix) -> f64 {
    DEFAULT_KKT_REL_TOL * a.frobenius_norm()
}

/// `½‖A − BC‖²_F`.
pub fn objective(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<f64> {
    check_shapes(a, b, c)?;
    Ok(0.5 * a.sub(&matmul(b, c)?)?.frobenius_norm_sq())
}

/// Random strictly positive factors: entries uniform on (0, 1] times
/// `√(mean(A)/K)`.
pub fn random_init(a: &Matrix, k: usize, seed: u64) -> (Matrix, Matrix) {
    let mean = a.mean();
    let scale = if mean > 0.0 { (mean / k as f64).sqrt() } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || (1.0 - rng.random::<f64>()) * scale;
    let b = Matrix::from_fn(a.rows(), k, |_, _| draw());
    let c = Matrix::from_fn(k, a.cols(), |_, _| draw());
    (b, c)
}

pub(crate) fn validate_problem(a: &Matrix, k: usize) -> Result<()> {
    let (m, n) = a.shape();
    if k == 0 || k > m.min(n) {
        return Err(Error::invalid(format!("rank {k} outside [1, {}]", m.min(n))));
    }
    a.ensure_finite("data matrix")?;
    a.ensure_nonnegative("data matrix")
}

pub(crate) fn resolve_init(a: &Matrix, k: usize, init: NmfInit, strict: bool) -> Result<(Matrix, Matrix)> {
    match init {
        NmfInit::Seed(seed) => Ok(random_init(a, k, seed)),
        NmfInit::Given { b, c } => {
            check_shapes(a, &b, &c)?;
            if b.cols() != k {
                return Err(Error::dims("nmf init", format!("factors have rank {}, expected {k}", b.cols())));
            }
            b.ensure_finite("initial B")?;
            c.ensure_finite("initial C")?;
            b.ensure_nonnegative("initial B")?;
            c.ensure_nonnegative("initial C")?;
            if strict && (b.as_slice().contains(&0.0) || c.as_slice().contains(&0.0)) {
                return Err(Error::invalid("multiplicative updates need a strictly positive start"));
            }
            Ok((b, c))
        }
    }
}

pub(crate) fn check_shapes(a: &Matrix, b: &Matrix, c: &Matrix) -> Result<()> {
    if b.rows() != a.rows() || c.cols() != a.cols() || b.cols() != c.rows() {
        return Err(Error::dims(
            "nmf",
            format!("A is {}x{}, B is {}x{}, C is {}x{}", a.rows(), a.cols(), b.rows(), b.cols(), c.rows(), c.cols()),
        ));
    }
    Ok(())
}

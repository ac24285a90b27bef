//! Embedded synonymy and polysemy examples with their reference rank-2
//! reconstructions and query scores, and a self-checking runner.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::nmf::{factorize, NmfInit, NmfOptions, NmfSolver};
use crate::svd::truncated_svd;

/// Seeds tried per NMF solver; the best run is reported.
pub const DEMO_SEEDS: u64 = 10;
/// Default per-entry tolerance.
pub const DEFAULT_TOL: f64 = 0.05;
/// Bound on reference entries given as a small negative number.
pub const SMALL_NEGATIVE_BOUND: f64 = 0.1;

pub const SYNONYMY_TERMS: [&str; 6] = ["mark", "twain", "samuel", "clemens", "purple", "colour"];
pub const POLYSEMY_TERMS: [&str; 5] = ["money", "bed", "river", "bank", "interest"];

const SYNONYMY: [[f64; 5]; 6] = [
    [15.0, 0.0, 0.0, 0.0, 0.0],
    [15.0, 0.0, 20.0, 0.0, 0.0],
    [0.0, 10.0, 5.0, 0.0, 0.0],
    [0.0, 20.0, 10.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 20.0, 10.0],
    [0.0, 0.0, 0.0, 15.0, 0.0],
];

const POLYSEMY: [[f64; 6]; 5] = [
    [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
    [0.0, 1.0, 0.0, 1.0, 0.0, 0.0],
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
];

/// A reference table entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expected {
    Value(f64),
    /// Printed as −ε: any value with magnitude at most
    /// [`SMALL_NEGATIVE_BOUND`] is accepted.
    SmallNegative,
}

use Expected::{SmallNegative as NE, Value as V};

pub const SYNONYMY_SVD: [[Expected; 5]; 6] = [
    [V(3.7), V(3.5), V(5.5), NE, NE],
    [V(11.0), V(10.0), V(16.0), NE, NE],
    [V(4.1), V(3.9), V(6.1), NE, NE],
    [V(8.3), V(7.8), V(12.0), NE, NE],
    [NE, NE, NE, V(21.0), V(7.1)],
    [NE, NE, NE, V(13.0), V(4.5)],
];

pub const SYNONYMY_MU: [[f64; 5]; 6] = [
    [3.72, 3.50, 5.45, 0.0, 0.0],
    [11.0, 10.4, 16.2, 0.0, 0.0],
    [4.15, 3.90, 6.08, 0.0, 0.0],
    [8.29, 7.79, 12.1, 0.0, 0.0],
    [0.0, 0.0, 0.0, 21.0, 7.08],
    [0.0, 0.0, 0.0, 13.5, 4.55],
];

#[allow(clippy::approx_constant)]
pub const SYNONYMY_ANLS: [[f64; 5]; 6] = [
    [3.14, 2.95, 4.60, 0.0, 0.0],
    [9.27, 8.71, 13.6, 0.0, 0.0],
    [3.50, 3.29, 5.13, 0.0, 0.0],
    [7.00, 6.58, 10.3, 0.0, 0.0],
    [0.0, 0.0, 0.0, 17.3, 5.83],
    [0.0, 0.0, 0.0, 11.1, 3.74],
];

pub const POLYSEMY_SVD: [[f64; 6]; 5] = [
    [0.80882, -0.054983, 0.80882, -0.054983, 0.547139, 0.062068],
    [-0.023949, 1.08239, -0.023949, 1.08239, 0.117052, 0.738319],
    [-0.054983, 0.80882, -0.054983, 0.80882, 0.062068, 0.547139],
    [1.05844, 1.05844, 1.05844, 1.05844, 0.855371, 0.855371],
    [1.08239, -0.023949, 1.08239, -0.023949, 0.738319, 0.117052],
];

pub const POLYSEMY_MU: [[f64; 6]; 5] = [
    [0.801054, 0.013549, 0.800924, 0.013018, 0.558518, 0.082122],
    [0.013619, 1.082496, 0.014032, 1.082806, 0.098272, 0.748645],
    [0.010063, 0.804439, 0.01037, 0.80467, 0.072989, 0.556338],
    [1.067149, 1.063328, 1.067377, 1.062928, 0.829791, 0.831112],
    [1.080788, 0.018281, 1.080612, 0.017564, 0.753557, 0.110799],
];

pub const POLYSEMY_ANLS: [[f64; 6]; 5] = [
    [0.63733, 0.040462, 0.63733, 0.040462, 0.441459, 0.098975],
    [0.054469, 0.858063, 0.054469, 0.858063, 0.133246, 0.594351],
    [0.040458, 0.637333, 0.040458, 0.637333, 0.09897, 0.441459],
    [0.877087, 0.877088, 0.877087, 0.877088, 0.699338, 0.699339],
    [0.85806, 0.054476, 0.85806, 0.054476, 0.594352, 0.133253],
];

/// Query on mark and twain against the synonymy matrix.
pub const SYNONYMY_QUERY: [f64; 6] = [1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
pub const SYNONYMY_QUERY_RAW: [f64; 5] = [30.0, 0.0, 20.0, 0.0, 0.0];

/// Queries on money+bank and river+bank against the polysemy matrix.
pub const POLYSEMY_Q1: [f64; 5] = [1.0, 0.0, 0.0, 1.0, 0.0];
pub const POLYSEMY_Q2: [f64; 5] = [0.0, 0.0, 1.0, 1.0, 0.0];
pub const POLYSEMY_Q1_RELEVANT: [usize; 3] = [0, 2, 4];
pub const POLYSEMY_Q2_RELEVANT: [usize; 3] = [1, 3, 5];

pub const POLYSEMY_Q1_SVD: [f64; 6] = [1.86726, 1.00346, 1.86726, 1.00346, 1.40251, 0.91744];
pub const POLYSEMY_Q2_SVD: [f64; 6] = [1.00346, 1.86726, 1.00346, 1.86726, 0.91744, 1.40251];
pub const POLYSEMY_Q1_MU: [f64; 6] = [1.8682, 1.07688, 1.8683, 1.07595, 1.38831, 0.91323];
pub const POLYSEMY_Q2_MU: [f64; 6] = [1.07721, 1.86777, 1.07775, 1.8676, 0.90278, 1.38745];
pub const POLYSEMY_Q1_ANLS: [f64; 6] = [1.51442, 0.91755, 1.51442, 0.91755, 1.1408, 0.79831];
pub const POLYSEMY_Q2_ANLS: [f64; 6] = [0.91754, 1.51442, 0.91754, 1.51442, 0.79831, 1.1408];

pub fn synonymy_matrix() -> Matrix {
    Matrix::from_rows(&SYNONYMY).expect("static shape")
}

pub fn polysemy_matrix() -> Matrix {
    Matrix::from_rows(&POLYSEMY).expect("static shape")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoKind {
    Synonymy,
    Polysemy,
}

/// Entry outside tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryDiff {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub actual: f64,
}

/// Comparison of one computed table or vector with its reference value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoCheck {
    pub name: String,
    /// Largest deviation from a numeric entry.
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
    /// Seed of the reported run, for seeded solvers.
    pub seed: Option<u64>,
    pub diffs: Vec<EntryDiff>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub kind: DemoKind,
    pub checks: Vec<DemoCheck>,
    /// Human-readable listing of every reconstruction and query score.
    #[serde(skip)]
    pub listing: String,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&DemoCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check, followed by the failing entries.
    pub fn diff_report(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let seed = c.seed.map(|s| format!(" seed={s}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{} {} max_dev={:.6} tol={}{seed}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tol
            );
            for d in &c.diffs {
                let _ = writeln!(s, "    [{}, {}] expected {} got {:.6}", d.row, d.col, d.expected, d.actual);
            }
        }
        s
    }
}

/// Compares `actual` with a table; returns the largest numeric deviation
/// and the entries outside tolerance.
pub fn compare(actual: &Matrix, expected: &[&[Expected]], tol: f64) -> (f64, Vec<EntryDiff>) {
    let mut max_dev: f64 = 0.0;
    let mut diffs = Vec::new();
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let x = actual[(i, j)];
            let (ok, label) = match *e {
                Expected::Value(v) => {
                    let d = (x - v).abs();
                    max_dev = max_dev.max(d);
                    (d <= tol, format!("{v}"))
                }
                Expected::SmallNegative => (x.abs() <= SMALL_NEGATIVE_BOUND, "-eps".to_string()),
            };
            if !ok {
                diffs.push(EntryDiff { row: i, col: j, expected: label, actual: x });
            }
        }
    }
    (max_dev, diffs)
}

fn values<const N: usize>(rows: &[[f64; N]]) -> Vec<Vec<Expected>> {
    rows.iter().map(|r| r.iter().map(|&v| Expected::Value(v)).collect()).collect()
}

fn as_rows(t: &[Vec<Expected>]) -> Vec<&[Expected]> {
    t.iter().map(Vec::as_slice).collect()
}

/// `qᵀ A`.
pub fn query_scores(q: &[f64], a: &Matrix) -> Vec<f64> {
    a.tr_mul_vec(q).expect("query length matches row count")
}

/// Every listed document scores strictly above every other document.
pub fn relevant_first(scores: &[f64], relevant: &[usize]) -> bool {
    let lowest_relevant = relevant.iter().map(|&i| scores[i]).fold(f64::INFINITY, f64::min);
    (0..scores.len()).filter(|i| !relevant.contains(i)).all(|i| scores[i] < lowest_relevant)
}

fn nmf_products(a: &Matrix, solver: NmfSolver, seed: u64) -> Result<Vec<(u64, Matrix)>> {
    (seed..seed + DEMO_SEEDS)
        .map(|s| Ok((s, factorize(a, 2, solver, NmfInit::Seed(s), &NmfOptions::default())?.product())))
        .collect()
}

fn row_vector(v: &[f64]) -> Matrix {
    Matrix::from_rows(&[v.to_vec()]).expect("one row")
}

struct Checker {
    tol: f64,
    checks: Vec<DemoCheck>,
}

impl Checker {
    fn table(&mut self, name: &str, actual: &Matrix, expected: &[&[Expected]], tol: f64, seed: Option<u64>) {
        let (max_deviation, diffs) = compare(actual, expected, tol);
        self.checks.push(DemoCheck { name: name.into(), max_deviation, tol, passed: diffs.is_empty(), seed, diffs });
    }

    /// Keeps the run with the smallest largest deviation.
    fn best_of(
        &mut self,
        name: &str,
        runs: &[(u64, Matrix)],
        expected: &[&[Expected]],
        map: impl Fn(&Matrix) -> Matrix,
    ) {
        let mut best: Option<(u64, f64, Vec<EntryDiff>)> = None;
        for (s, m) in runs {
            let (dev, diffs) = compare(&map(m), expected, self.tol);
            let better = match &best {
                None => true,
                Some((_, bd, bdiffs)) => (diffs.len(), dev) < (bdiffs.len(), *bd),
            };
            if better {
                best = Some((*s, dev, diffs));
            }
        }
        let (seed, max_deviation, diffs) = best.expect("at least one run");
        self.checks.push(DemoCheck {
            name: name.into(),
            max_deviation,
            tol: self.tol,
            passed: diffs.is_empty(),
            seed: Some(seed),
            diffs,
        });
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.checks.push(DemoCheck {
            name: name.into(),
            max_deviation: 0.0,
            tol: 0.0,
            passed: ok,
            seed: None,
            diffs: vec![],
        });
    }
}

fn write_matrix(out: &mut String, title: &str, terms: &[&str], m: &Matrix) {
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<10}", "");
    for j in 0..m.cols() {
        let _ = write!(out, "{:>11}", format!("Doc{}", j + 1));
    }
    out.push('\n');
    for (i, t) in terms.iter().enumerate() {
        let _ = write!(out, "{t:<10}");
        for j in 0..m.cols() {
            let _ = write!(out, "{:>11.5}", m[(i, j)]);
        }
        out.push('\n');
    }
    out.push('\n');
}

fn write_vector(out: &mut String, title: &str, v: &[f64]) {
    let body: Vec<String> = v.iter().map(|x| format!("{x:.5}")).collect();
    let _ = writeln!(out, "{title} = [{}]", body.join(" "));
}

/// Runs rank-2 SVD and both NMF solvers on the embedded matrix and checks
/// the results against the reference values. NMF solvers run with seeds
/// `seed..seed + DEMO_SEEDS`; each check reports its best run.
pub fn run_demo(kind: DemoKind, seed: u64, tol: f64) -> Result<DemoReport> {
    match kind {
        DemoKind::Synonymy => synonymy(seed, tol),
        DemoKind::Polysemy => polysemy(seed, tol),
    }
}

fn synonymy(seed: u64, tol: f64) -> Result<DemoReport> {
    let a = synonymy_matrix();
    let svd = truncated_svd(&a, 2, seed)?.low_rank_approx();
    let mu = nmf_products(&a, NmfSolver::Multiplicative, seed)?;
    let anls = nmf_products(&a, NmfSolver::Anls, seed)?;

    let mut c = Checker { tol, checks: Vec::new() };
    let raw = query_scores(&SYNONYMY_QUERY, &a);
    c.flag("raw_query", raw == SYNONYMY_QUERY_RAW);
    let svd_table: Vec<&[Expected]> = SYNONYMY_SVD.iter().map(|r| &r[..]).collect();
    c.table("svd", &svd, &svd_table, tol, None);
    c.best_of("nmf_mu", &mu, &as_rows(&values(&SYNONYMY_MU)), Matrix::clone);
    c.best_of("nmf_anls", &anls, &as_rows(&values(&SYNONYMY_ANLS)), Matrix::clone);

    let mut out = String::new();
    write_matrix(&mut out, "A", &SYNONYMY_TERMS, &a);
    write_vector(&mut out, "q'A", &raw);
    out.push('\n');
    write_matrix(&mut out, "SVD rank 2", &SYNONYMY_TERMS, &svd);
    for (label, runs, check) in [("NMF-MU rank 2", &mu, "nmf_mu"), ("NMF-ANLS rank 2", &anls, "nmf_anls")] {
        let s = c.checks.iter().find(|x| x.name == check).and_then(|x| x.seed).expect("seeded");
        let m = &runs.iter().find(|(rs, _)| *rs == s).expect("seed run").1;
        write_matrix(&mut out, &format!("{label} (seed {s})"), &SYNONYMY_TERMS, m);
    }
    Ok(DemoReport { kind: DemoKind::Synonymy, checks: c.checks, listing: out })
}

fn polysemy(seed: u64, tol: f64) -> Result<DemoReport> {
    let a = polysemy_matrix();
    let svd = truncated_svd(&a, 2, seed)?.low_rank_approx();
    let mu = nmf_products(&a, NmfSolver::Multiplicative, seed)?;
    let anls = nmf_products(&a, NmfSolver::Anls, seed)?;

    let mut c = Checker { tol, checks: Vec::new() };
    c.table("svd", &svd, &as_rows(&values(&POLYSEMY_SVD)), tol, None);
    c.best_of("nmf_mu", &mu, &as_rows(&values(&POLYSEMY_MU)), Matrix::clone);
    c.best_of("nmf_anls", &anls, &as_rows(&values(&POLYSEMY_ANLS)), Matrix::clone);

    let svd_runs = [(seed, svd.clone())];
    let queries = [("q1", &POLYSEMY_Q1, &POLYSEMY_Q1_RELEVANT), ("q2", &POLYSEMY_Q2, &POLYSEMY_Q2_RELEVANT)];
    let reference = [
        ("svd", &svd_runs[..], [&POLYSEMY_Q1_SVD, &POLYSEMY_Q2_SVD]),
        ("nmf_mu", &mu[..], [&POLYSEMY_Q1_MU, &POLYSEMY_Q2_MU]),
        ("nmf_anls", &anls[..], [&POLYSEMY_Q1_ANLS, &POLYSEMY_Q2_ANLS]),
    ];
    for (method, runs, expected) in &reference {
        for ((qname, q, _), e) in queries.iter().zip(expected) {
            let name = format!("{method}_{qname}");
            c.best_of(&name, runs, &as_rows(&values(&[**e])), |m| row_vector(&query_scores(&q[..], m)));
        }
    }
    for (method, runs, _) in &reference {
        let ok = runs
            .iter()
            .any(|(_, m)| queries.iter().all(|(_, q, rel)| relevant_first(&query_scores(&q[..], m), &rel[..])));
        c.flag(&format!("{method}_relevant_first"), ok);
    }

    let mut out = String::new();
    write_matrix(&mut out, "A", &POLYSEMY_TERMS, &a);
    for (qname, q, _) in &queries {
        write_vector(&mut out, &format!("{qname}'A"), &query_scores(&q[..], &a));
    }
    out.push('\n');
    for (method, runs, _) in &reference {
        let s = c.checks.iter().find(|x| x.name == *method).and_then(|x| x.seed).unwrap_or(seed);
        let m = &runs.iter().find(|(rs, _)| *rs == s).expect("seed run").1;
        write_matrix(&mut out, &format!("{method} rank 2 (seed {s})"), &POLYSEMY_TERMS, m);
        for (qname, q, _) in &queries {
            write_vector(&mut out, &format!("{qname}'A_{method}"), &query_scores(&q[..], m));
        }
        out.push('\n');
    }
    Ok(DemoReport { kind: DemoKind::Polysemy, checks: c.checks, listing: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_queries() {
        assert_eq!(query_scores(&SYNONYMY_QUERY, &synonymy_matrix()), SYNONYMY_QUERY_RAW);
        assert_eq!(query_scores(&POLYSEMY_Q1, &polysemy_matrix()), vec![2.0, 1.0, 2.0, 1.0, 1.0, 1.0]);
        assert_eq!(query_scores(&POLYSEMY_Q2, &polysemy_matrix()), vec![1.0, 2.0, 1.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn compare_small_negative() {
        let m = Matrix::from_rows(&[[-0.05, 1.0]]).unwrap();
        let (dev, diffs) = compare(&m, &[&[NE, V(1.02)]], 0.05);
        assert!((dev - 0.02).abs() < 1e-12 && diffs.is_empty());
        let m = Matrix::from_rows(&[[-0.2, 1.1]]).unwrap();
        assert_eq!(compare(&m, &[&[NE, V(1.0)]], 0.05).1.len(), 2);
    }

    #[test]
    fn relevance_ordering() {
        assert!(relevant_first(&POLYSEMY_Q1_SVD, &POLYSEMY_Q1_RELEVANT));
        assert!(!relevant_first(&[2.0, 1.0, 2.0, 1.0, 1.0, 1.0], &POLYSEMY_Q1_RELEVANT));
    }

    #[test]
    fn deterministic() {
        let a = run_demo(DemoKind::Polysemy, 3, DEFAULT_TOL).unwrap();
        let b = run_demo(DemoKind::Polysemy, 3, DEFAULT_TOL).unwrap();
        assert_eq!(a.listing, b.listing);
        assert_eq!(a.diff_report(), b.diff_report());
    }
}

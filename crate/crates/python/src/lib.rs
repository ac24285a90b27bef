#![allow(clippy::too_many_arguments)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nmfkit::clustering::{self, PointSet2D};
use nmfkit::lsi::{self, QuerySet, RelevanceJudgments};
use nmfkit::metrics::MetricReport as CoreMetrics;
use nmfkit::nmf::{self, FactorPair, NmfInit, NmfOptions, NmfSolver, StopReason};
use nmfkit::textprep::{self, BuildOptions, Corpus};
use nmfkit::{svd, Matrix};

type Rows = Vec<Vec<f64>>;

fn err(e: nmfkit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: &Rows) -> PyResult<Matrix> {
    if rows.is_empty() {
        return Err(PyValueError::new_err("matrix has no rows"));
    }
    Matrix::from_rows(rows).map_err(err)
}

fn solver(name: &str) -> PyResult<NmfSolver> {
    match name {
        "mu" | "multiplicative" => Ok(NmfSolver::Multiplicative),
        "anls" => Ok(NmfSolver::Anls),
        other => Err(PyValueError::new_err(format!("unknown solver {other:?}, expected \"mu\" or \"anls\""))),
    }
}

fn points(rows: &Rows) -> PyResult<PointSet2D> {
    let coords = rows
        .iter()
        .map(|r| match r.as_slice() {
            [x, y] => Ok([*x, *y]),
            _ => Err(PyValueError::new_err("points must have two coordinates")),
        })
        .collect::<PyResult<Vec<_>>>()?;
    let labels = vec![0; coords.len()];
    PointSet2D::new(coords, labels).map_err(err)
}

fn point_rows(p: &PointSet2D) -> (Rows, Vec<usize>) {
    (p.coords.iter().map(|c| c.to_vec()).collect(), p.labels.clone())
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct Factorization {
    b: Rows,
    c: Rows,
    rank: usize,
    iterations: usize,
    stop_reason: String,
    objective_trace: Vec<f64>,
}

#[pymethods]
impl Factorization {
    #[getter]
    fn final_objective(&self) -> f64 {
        *self.objective_trace.last().unwrap_or(&f64::NAN)
    }

    fn product(&self) -> PyResult<Rows> {
        Ok(matrix(&self.b)?.matmul(&matrix(&self.c)?).map_err(err)?.to_rows())
    }

    fn __repr__(&self) -> String {
        format!(
            "Factorization(rank={}, iterations={}, stop_reason={:?}, objective={:.6e})",
            self.rank,
            self.iterations,
            self.stop_reason,
            self.final_objective()
        )
    }
}

impl From<FactorPair> for Factorization {
    fn from(f: FactorPair) -> Self {
        let stop_reason = match f.stop_reason {
            StopReason::MaxIter => "max_iter",
            StopReason::ObjectiveStall => "objective_stall",
            StopReason::KktTol => "kkt_tol",
        };
        Factorization {
            b: f.b.to_rows(),
            c: f.c.to_rows(),
            rank: f.rank,
            iterations: f.iterations,
            stop_reason: stop_reason.to_string(),
            objective_trace: f.objective_trace,
        }
    }
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct Svd {
    u: Rows,
    s: Vec<f64>,
    v: Rows,
    rank: usize,
}

#[pymethods]
impl Svd {
    fn low_rank_approx(&self) -> PyResult<Rows> {
        let t = svd::SvdTruncation { u: matrix(&self.u)?, s: self.s.clone(), v: matrix(&self.v)?, rank: self.rank };
        Ok(t.low_rank_approx().to_rows())
    }

    fn __repr__(&self) -> String {
        format!("Svd(rank={}, s={:?})", self.rank, self.s)
    }
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct KktReport {
    comp_slack_b: f64,
    comp_slack_c: f64,
    dual_feas_b: f64,
    dual_feas_c: f64,
    reconstruction_b: Option<f64>,
    reconstruction_c: Option<f64>,
    max_residual: f64,
}

#[pymethods]
impl KktReport {
    fn within(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }

    fn __repr__(&self) -> String {
        format!("KktReport(max_residual={:.3e})", self.max_residual)
    }
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct MetricReport {
    mi: f64,
    entropy: f64,
    purity: f64,
    fmeasure: f64,
    clusters: usize,
    classes: usize,
    items: u64,
}

#[pymethods]
impl MetricReport {
    fn __repr__(&self) -> String {
        format!(
            "MetricReport(mi={:.4}, entropy={:.4}, purity={:.4}, fmeasure={:.4})",
            self.mi, self.entropy, self.purity, self.fmeasure
        )
    }
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct TermDocMatrix {
    matrix: Rows,
    vocabulary: Vec<String>,
    doc_ids: Vec<String>,
    preset: String,
}

impl TermDocMatrix {
    fn options(&self) -> BuildOptions {
        preset(&self.preset).expect("validated on construction")
    }

    fn core(&self) -> PyResult<textprep::TermDocMatrix> {
        Ok(textprep::TermDocMatrix {
            matrix: matrix(&self.matrix)?,
            vocabulary: self.vocabulary.clone(),
            doc_ids: self.doc_ids.clone(),
        })
    }
}

fn preset(name: &str) -> PyResult<BuildOptions> {
    match name {
        "lsi" => Ok(BuildOptions::lsi()),
        "clustering" => Ok(BuildOptions::clustering()),
        other => Err(PyValueError::new_err(format!("unknown preset {other:?}, expected \"lsi\" or \"clustering\""))),
    }
}

#[pymethods]
impl TermDocMatrix {
    #[new]
    #[pyo3(signature = (documents, preset = "lsi"))]
    fn new(documents: Vec<(String, String)>, preset: &str) -> PyResult<Self> {
        let options = self::preset(preset)?;
        let corpus = Corpus::from_pairs(documents).map_err(err)?;
        let t = textprep::build_matrix(&corpus, &options).map_err(err)?;
        Ok(TermDocMatrix {
            matrix: t.matrix.to_rows(),
            vocabulary: t.vocabulary,
            doc_ids: t.doc_ids,
            preset: preset.to_string(),
        })
    }

    fn query_vector(&self, text: &str) -> PyResult<Vec<f64>> {
        Ok(self.core()?.query_vector(text, &self.options()))
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.vocabulary.len(), self.doc_ids.len())
    }

    fn __repr__(&self) -> String {
        format!(
            "TermDocMatrix(terms={}, documents={}, preset={:?})",
            self.vocabulary.len(),
            self.doc_ids.len(),
            self.preset
        )
    }
}

#[pyclass(frozen, get_all, module = "pynmfkit")]
struct RetrievalRun {
    mean_average_precision: f64,
    average_precision: Vec<(String, f64)>,
    rankings: Vec<(String, Vec<usize>)>,
    skipped: Vec<String>,
}

#[pymethods]
impl RetrievalRun {
    fn __repr__(&self) -> String {
        format!(
            "RetrievalRun(mean_average_precision={:.4}, queries={}, skipped={})",
            self.mean_average_precision,
            self.average_precision.len(),
            self.skipped.len()
        )
    }
}

/// Nonnegative factorization `A ≈ BC` with `B` M×k and `C` k×N.
#[pyfunction]
#[pyo3(signature = (a, k, solver = "anls", seed = 0, max_iter = nmf::DEFAULT_MAX_ITER, stall_tol = nmf::DEFAULT_STALL_TOL, kkt_tol = None))]
fn factorize(
    py: Python<'_>,
    a: Rows,
    k: usize,
    solver: &str,
    seed: u64,
    max_iter: usize,
    stall_tol: f64,
    kkt_tol: Option<f64>,
) -> PyResult<Factorization> {
    let a = matrix(&a)?;
    let solver = self::solver(solver)?;
    let opts = NmfOptions { max_iter, stall_tol, kkt_tol };
    let f = py.detach(|| nmf::factorize(&a, k, solver, NmfInit::Seed(seed), &opts)).map_err(err)?;
    Ok(f.into())
}

/// Leading `k` singular triplets.
#[pyfunction]
#[pyo3(signature = (a, k, seed = 0))]
fn truncated_svd(py: Python<'_>, a: Rows, k: usize, seed: u64) -> PyResult<Svd> {
    let a = matrix(&a)?;
    let t = py.detach(|| svd::truncated_svd(&a, k, seed)).map_err(err)?;
    Ok(Svd { u: t.u.to_rows(), s: t.s, v: t.v.to_rows(), rank: t.rank })
}

/// First-order optimality residuals of `(B, C)` for `½‖A − BC‖²`.
#[pyfunction]
fn kkt_report(a: Rows, b: Rows, c: Rows) -> PyResult<KktReport> {
    let r = nmf::kkt_report(&matrix(&a)?, &matrix(&b)?, &matrix(&c)?).map_err(err)?;
    Ok(KktReport {
        comp_slack_b: r.comp_slack_b,
        comp_slack_c: r.comp_slack_c,
        dual_feas_b: r.dual_feas_b,
        dual_feas_c: r.dual_feas_c,
        reconstruction_b: r.reconstruction_b,
        reconstruction_c: r.reconstruction_c,
        max_residual: r.max_residual(),
    })
}

/// `argmin ‖Ax − b‖` over `x ≥ 0`; returns `(x, residual_norm)`.
#[pyfunction]
#[pyo3(signature = (a, b, tol = 1e-10))]
fn nnls(a: Rows, b: Vec<f64>, tol: f64) -> PyResult<(Vec<f64>, f64)> {
    let s = nmfkit::nnls::nnls_solve(&matrix(&a)?, &b, tol).map_err(err)?;
    Ok((s.x, s.residual_norm))
}

/// Mutual information, entropy, purity and F-measure of a labeling.
#[pyfunction]
fn metrics(labels: Vec<usize>, reference: Vec<usize>) -> PyResult<MetricReport> {
    let m = CoreMetrics::from_labels(&labels, &reference).map_err(err)?;
    Ok(MetricReport {
        mi: m.mi,
        entropy: m.entropy,
        purity: m.purity,
        fmeasure: m.fmeasure,
        clusters: m.r,
        classes: m.s,
        items: m.n,
    })
}

/// Clusters 2-D points with `"njw"` or `"nmf_kernel"`.
#[pyfunction]
#[pyo3(signature = (points, k, alpha, method = "njw", solver = "anls", seed = 0))]
fn cluster_points(
    py: Python<'_>,
    points: Rows,
    k: usize,
    alpha: f64,
    method: &str,
    solver: &str,
    seed: u64,
) -> PyResult<Vec<usize>> {
    let p = self::points(&points)?;
    let solver = self::solver(solver)?;
    let r = match method {
        "njw" => py.detach(|| clustering::njw_cluster(&p, k, alpha, seed)),
        "nmf_kernel" => py.detach(|| clustering::nmf_kernel_cluster(&p, k, alpha, solver, seed)),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(r.map_err(err)?.labels)
}

/// Clusters the columns of a term-document matrix with `"nmf"` or `"svd"`.
#[pyfunction]
#[pyo3(signature = (a, k, method = "nmf", solver = "anls", seed = 0))]
fn cluster_documents(py: Python<'_>, a: Rows, k: usize, method: &str, solver: &str, seed: u64) -> PyResult<Vec<usize>> {
    let a = matrix(&a)?;
    let solver = self::solver(solver)?;
    let r = match method {
        "nmf" => py.detach(|| clustering::nmf_doc_cluster(&a, k, solver, seed)),
        "svd" => py.detach(|| clustering::svd_doc_cluster(&a, k, seed)),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(r.map_err(err)?.labels)
}

/// Concentric noisy rings; returns `(points, labels)`.
#[pyfunction]
#[pyo3(signature = (n_per_ring, radii, noise = 0.05, seed = 0))]
fn make_rings(n_per_ring: usize, radii: Vec<f64>, noise: f64, seed: u64) -> PyResult<(Rows, Vec<usize>)> {
    Ok(point_rows(&clustering::make_rings(n_per_ring, &radii, noise, seed).map_err(err)?))
}

/// Two interleaved half circles; returns `(points, labels)`.
#[pyfunction]
#[pyo3(signature = (n_per_moon, noise = 0.05, seed = 0))]
fn make_moons(n_per_moon: usize, noise: f64, seed: u64) -> PyResult<(Rows, Vec<usize>)> {
    Ok(point_rows(&clustering::make_moons(n_per_moon, noise, seed).map_err(err)?))
}

/// Isotropic Gaussian blobs; returns `(points, labels)`.
#[pyfunction]
#[pyo3(signature = (n_per_blob, centers, sd = 1.0, seed = 0))]
fn make_blobs(n_per_blob: usize, centers: Vec<(f64, f64)>, sd: f64, seed: u64) -> PyResult<(Rows, Vec<usize>)> {
    let centers: Vec<[f64; 2]> = centers.into_iter().map(|(x, y)| [x, y]).collect();
    Ok(point_rows(&clustering::make_blobs(n_per_blob, &centers, sd, seed).map_err(err)?))
}

#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    textprep::tokenize(text)
}

#[pyfunction]
fn porter_stem(word: &str) -> String {
    textprep::porter_stem(word)
}

/// Ranks documents by `q · a_hat` and reports interpolated average precision.
#[pyfunction]
#[pyo3(signature = (a_hat, doc_ids, queries, judgments, levels = lsi::DEFAULT_LEVELS))]
fn evaluate(
    a_hat: Rows,
    doc_ids: Vec<String>,
    queries: Vec<(String, Vec<f64>)>,
    judgments: Vec<(String, String)>,
    levels: usize,
) -> PyResult<RetrievalRun> {
    let (ids, rows): (Vec<String>, Rows) = queries.into_iter().unzip();
    let qs = QuerySet::new(matrix(&rows)?, ids).map_err(err)?;
    let j = RelevanceJudgments::from_pairs(judgments);
    let run = lsi::evaluate_run(&qs, &j, &matrix(&a_hat)?, &doc_ids, levels).map_err(err)?;
    Ok(RetrievalRun {
        mean_average_precision: run.mean_average_precision,
        average_precision: run.queries.iter().map(|q| (q.query_id.clone(), q.average_precision)).collect(),
        rankings: run.queries.into_iter().map(|q| (q.query_id, q.ranking)).collect(),
        skipped: run.skipped,
    })
}

/// Mean average precision per rank for `"svd"`, `"nmf_mu"` or `"nmf_anls"`
/// approximations; returns `(rank, trial, mean_ap)` rows.
#[pyfunction]
#[pyo3(signature = (tdm, queries, judgments, method, ranks, trials = 1, seed = 0))]
fn rank_sweep(
    py: Python<'_>,
    tdm: &TermDocMatrix,
    queries: Vec<(String, String)>,
    judgments: Vec<(String, String)>,
    method: &str,
    ranks: Vec<usize>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<(usize, usize, f64)>> {
    let method = match method {
        "svd" => lsi::LsiMethod::Svd,
        "nmf_mu" => lsi::LsiMethod::NmfMu,
        "nmf_anls" => lsi::LsiMethod::NmfAnls,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let core = tdm.core()?;
    let qs = QuerySet::from_texts(&queries, &core, &tdm.options()).map_err(err)?;
    let j = RelevanceJudgments::from_pairs(judgments);
    let table = py
        .detach(|| lsi::rank_sweep(&core, &qs, &j, method, &ranks, trials, seed, &NmfOptions::default()))
        .map_err(err)?;
    Ok(table.rows.iter().map(|r| (r.rank, r.trial, r.mean_ap)).collect())
}

#[pymodule]
fn pynmfkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Factorization>()?;
    m.add_class::<Svd>()?;
    m.add_class::<KktReport>()?;
    m.add_class::<MetricReport>()?;
    m.add_class::<TermDocMatrix>()?;
    m.add_class::<RetrievalRun>()?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_svd, m)?)?;
    m.add_function(wrap_pyfunction!(kkt_report, m)?)?;
    m.add_function(wrap_pyfunction!(nnls, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_points, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_documents, m)?)?;
    m.add_function(wrap_pyfunction!(make_rings, m)?)?;
    m.add_function(wrap_pyfunction!(make_moons, m)?)?;
    m.add_function(wrap_pyfunction!(make_blobs, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(porter_stem, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(rank_sweep, m)?)?;
    Ok(())
}

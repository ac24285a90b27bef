//! Retrieval against low-rank approximations: query scoring, precision at
//! n, pseudo-precision and interpolated average precision, and rank sweeps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matmul, Matrix};
use crate::nmf::{factorize, NmfInit, NmfOptions, NmfSolver};
use crate::svd::truncated_svd;
use crate::textprep::{read_two_column, BuildOptions, TermDocMatrix};

/// Default number of interpolation points.
pub const DEFAULT_LEVELS: usize = 11;

/// Query vectors as the rows of a Q×M matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuerySet {
    pub q: Matrix,
    pub ids: Vec<String>,
}

impl QuerySet {
    pub fn new(q: Matrix, ids: Vec<String>) -> Result<Self> {
        if q.rows() != ids.len() {
            return Err(Error::dims("QuerySet", format!("{} query rows, {} ids", q.rows(), ids.len())));
        }
        q.ensure_nonnegative("query matrix")?;
        Ok(QuerySet { q, ids })
    }

    /// Builds query vectors from `(id, text)` pairs against a matrix.
    pub fn from_texts(queries: &[(String, String)], tdm: &TermDocMatrix, options: &BuildOptions) -> Result<Self> {
        let rows: Vec<Vec<f64>> = queries.iter().map(|(_, t)| tdm.query_vector(t, options)).collect();
        let q = if rows.is_empty() { Matrix::zeros(0, tdm.vocabulary.len()) } else { Matrix::from_rows(&rows)? };
        QuerySet::new(q, queries.iter().map(|(id, _)| id.clone()).collect())
    }

    /// Reads `query_id<TAB>text` lines.
    pub fn read(path: impl AsRef<Path>, tdm: &TermDocMatrix, options: &BuildOptions) -> Result<Self> {
        let path = path.as_ref();
        let rows = read_two_column(path)?;
        if rows.is_empty() {
            return Err(Error::parse(path, "no queries"));
        }
        QuerySet::from_texts(&rows, tdm, options)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Relevant document ids per query id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelevanceJudgments {
    pub relevant: BTreeMap<String, BTreeSet<String>>,
}

impl RelevanceJudgments {
    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut relevant: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (q, d) in pairs {
            relevant.entry(q.into()).or_default().insert(d.into());
        }
        RelevanceJudgments { relevant }
    }

    /// Reads `query_id<TAB>doc_id` lines.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(RelevanceJudgments::from_pairs(read_two_column(path)?))
    }

    /// Every referenced document must exist in the collection.
    pub fn validate(&self, doc_ids: &[String]) -> Result<()> {
        let known: BTreeSet<&str> = doc_ids.iter().map(String::as_str).collect();
        for docs in self.relevant.values() {
            if let Some(d) = docs.iter().find(|d| !known.contains(d.as_str())) {
                return Err(Error::UnknownDocument(d.clone()));
            }
        }
        Ok(())
    }
}

/// `Q · Â`, one row of document scores per query.
pub fn score_queries(qs: &QuerySet, a_hat: &Matrix) -> Result<Matrix> {
    if qs.q.cols() != a_hat.rows() {
        return Err(Error::dims(
            "score_queries",
            format!("queries span {} terms, matrix has {}", qs.q.cols(), a_hat.rows()),
        ));
    }
    matmul(&qs.q, a_hat)
}

/// Document indices by descending score, ties by ascending index.
pub fn rank_documents(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order
}

/// Fraction of relevant documents among the first `n`.
pub fn precision_at(ranked_relevance: &[bool], n: usize) -> Result<f64> {
    if n == 0 || n > ranked_relevance.len() {
        return Err(Error::invalid(format!("cutoff {n} outside [1, {}]", ranked_relevance.len())));
    }
    Ok(ranked_relevance[..n].iter().filter(|&&r| r).count() as f64 / n as f64)
}

fn relevant_total(ranked_relevance: &[bool]) -> Result<usize> {
    match ranked_relevance.iter().filter(|&&r| r).count() {
        0 => Err(Error::NoRelevantDocuments),
        n => Ok(n),
    }
}

/// Best precision `r_n / n` over the cutoffs whose recall `r_n / r_N`
/// reaches `x`.
pub fn pseudo_precision(ranked_relevance: &[bool], x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("recall level {x} outside [0, 1]")));
    }
    let total = relevant_total(ranked_relevance)? as f64;
    Ok(max_precision_where(ranked_relevance, |r_n| x <= r_n as f64 / total + 1e-12))
}

fn max_precision_where(ranked_relevance: &[bool], reaches: impl Fn(usize) -> bool) -> f64 {
    let mut hits = 0;
    let mut best: f64 = 0.0;
    for (i, &rel) in ranked_relevance.iter().enumerate() {
        hits += rel as usize;
        if reaches(hits) {
            best = best.max(hits as f64 / (i + 1) as f64);
        }
    }
    best
}

/// Mean pseudo-precision at the `levels` evenly spaced recall levels
/// `0, 1/(levels−1), …, 1`.
pub fn average_precision(ranked_relevance: &[bool], levels: usize) -> Result<f64> {
    if levels < 2 {
        return Err(Error::invalid("at least two recall levels are required"));
    }
    let total = relevant_total(ranked_relevance)?;
    let steps = levels - 1;
    let sum: f64 = (0..levels)
        // level i/steps is reached once r_n/total >= i/steps, compared in integers
        .map(|i| max_precision_where(ranked_relevance, |r_n| i * total <= r_n * steps))
        .sum();
    Ok(sum / levels as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query_id: String,
    /// Document indices, best first.
    pub ranking: Vec<usize>,
    /// Scores in ranking order.
    pub scores: Vec<f64>,
    pub average_precision: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRun {
    pub queries: Vec<QueryResult>,
    pub mean_average_precision: f64,
    /// Queries left out because no relevant document was judged.
    pub skipped: Vec<String>,
}

/// Scores every query against `a_hat`, ranks the documents and averages the
/// interpolated average precision over queries with judged relevant
/// documents.
pub fn evaluate_run(
    qs: &QuerySet,
    judgments: &RelevanceJudgments,
    a_hat: &Matrix,
    doc_ids: &[String],
    levels: usize,
) -> Result<RetrievalRun> {
    if doc_ids.len() != a_hat.cols() {
        return Err(Error::dims("evaluate_run", format!("{} doc ids for {} columns", doc_ids.len(), a_hat.cols())));
    }
    judgments.validate(doc_ids)?;
    let scores = score_queries(qs, a_hat)?;
    let index: HashMap<&str, usize> = doc_ids.iter().enumerate().map(|(i, d)| (d.as_str(), i)).collect();
    let outcomes: Vec<Result<Option<QueryResult>>> = (0..qs.len())
        .into_par_iter()
        .map(|qi| {
            let id = &qs.ids[qi];
            let relevant: Vec<bool> = {
                let mut r = vec![false; doc_ids.len()];
                if let Some(docs) = judgments.relevant.get(id) {
                    for d in docs {
                        r[index[d.as_str()]] = true;
                    }
                }
                r
            };
            if !relevant.contains(&true) {
                return Ok(None);
            }
            let row = scores.row(qi);
            let ranking = rank_documents(row);
            let ranked_rel: Vec<bool> = ranking.iter().map(|&d| relevant[d]).collect();
            let ap = average_precision(&ranked_rel, levels)?;
            Ok(Some(QueryResult {
                query_id: id.clone(),
                scores: ranking.iter().map(|&d| row[d]).collect(),
                ranking,
                average_precision: ap,
            }))
        })
        .collect();
    let mut queries = Vec::new();
    let mut skipped = Vec::new();
    for (qi, o) in outcomes.into_iter().enumerate() {
        match o? {
            Some(r) => queries.push(r),
            None => skipped.push(qs.ids[qi].clone()),
        }
    }
    if !skipped.is_empty() {
        log::warn!("{} queries without judged relevant documents were skipped", skipped.len());
    }
    if queries.is_empty() {
        return Err(Error::NoRelevantDocuments);
    }
    let mean_average_precision = queries.iter().map(|q| q.average_precision).sum::<f64>() / queries.len() as f64;
    Ok(RetrievalRun { queries, mean_average_precision, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsiMethod {
    Svd,
    NmfMu,
    NmfAnls,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rank: usize,
    pub trial: usize,
    pub mean_ap: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub method: LsiMethod,
    /// Rank with the highest mean AP in the first trial.
    pub best_rank: usize,
    /// Mean AP at `best_rank` averaged over trials.
    pub value: f64,
    /// `value(best_rank)` with four decimals.
    pub formatted: String,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub method: LsiMethod,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn summary(&self) -> Option<SweepSummary> {
        let first: Vec<&SweepRow> = self.rows.iter().filter(|r| r.trial == 0).collect();
        let best = first.iter().copied().reduce(|a, b| if b.mean_ap > a.mean_ap { b } else { a })?;
        let at: Vec<f64> = self.rows.iter().filter(|r| r.rank == best.rank).map(|r| r.mean_ap).collect();
        let value = at.iter().sum::<f64>() / at.len() as f64;
        Some(SweepSummary {
            method: self.method,
            best_rank: best.rank,
            value,
            formatted: format!("{value:.4}({})", best.rank),
            trials: at.len(),
        })
    }

    /// `rank,trial,mean_ap` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,trial,mean_ap\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.rank, r.trial, r.mean_ap));
        }
        s
    }

    /// `rank,trial,seconds` with a header line.
    pub fn timing_csv(&self) -> String {
        let mut s = String::from("rank,trial,seconds\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:.6}\n", r.rank, r.trial, r.seconds));
        }
        s
    }
}

/// Evaluates retrieval over low-rank approximations at every rank. SVD runs
/// once per rank; NMF runs `trials` times per rank with seeds
/// `seed + trial`.
#[allow(clippy::too_many_arguments)]
pub fn rank_sweep(
    tdm: &TermDocMatrix,
    qs: &QuerySet,
    judgments: &RelevanceJudgments,
    method: LsiMethod,
    ranks: &[usize],
    trials: usize,
    seed: u64,
    nmf_options: &NmfOptions,
) -> Result<SweepTable> {
    let a = &tdm.matrix;
    let max_rank = a.rows().min(a.cols());
    if ranks.is_empty() {
        return Err(Error::invalid("rank list is empty"));
    }
    if let Some(&r) = ranks.iter().find(|&&r| r == 0 || r > max_rank) {
        return Err(Error::invalid(format!("rank {r} outside [1, {max_rank}]")));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    judgments.validate(&tdm.doc_ids)?;
    let trials = if method == LsiMethod::Svd { 1 } else { trials };
    let jobs: Vec<(usize, usize)> = ranks.iter().flat_map(|&r| (0..trials).map(move |t| (r, t))).collect();
    let rows = jobs
        .into_par_iter()
        .map(|(rank, trial)| {
            let start = Instant::now();
            let s = seed.wrapping_add(trial as u64);
            let a_hat = match method {
                LsiMethod::Svd => truncated_svd(a, rank, seed)?.low_rank_approx(),
                LsiMethod::NmfMu => {
                    factorize(a, rank, NmfSolver::Multiplicative, NmfInit::Seed(s), nmf_options)?.product()
                }
                LsiMethod::NmfAnls => factorize(a, rank, NmfSolver::Anls, NmfInit::Seed(s), nmf_options)?.product(),
            };
            let run = evaluate_run(qs, judgments, &a_hat, &tdm.doc_ids, DEFAULT_LEVELS)?;
            Ok(SweepRow { rank, trial, mean_ap: run.mean_average_precision, seconds: start.elapsed().as_secs_f64() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { method, rows })
}

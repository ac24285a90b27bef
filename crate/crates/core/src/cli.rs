//! Command-line front end: `decompose`, `cluster`, `lsi-eval`,
//! `paper-demo` and `gen-data`.
//!
//! Every subcommand accepts `--config FILE`, a TOML file whose keys are the
//! flag names; flags given on the command line override it and unknown keys
//! are rejected. Inputs are validated before anything is computed, and
//! nothing is written until the computation has succeeded.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    kmeans, make_blobs, make_moons, make_rings, njw_cluster, nmf_doc_cluster, nmf_kernel_cluster, svd_doc_cluster,
    ClusteringResult, PointSet2D, DEFAULT_RESTARTS,
};
use crate::demo::{run_demo, DemoKind, DemoReport};
use crate::error::Error;
use crate::linalg::io::{read_matrix, write_csv};
use crate::linalg::xu_normalize;
use crate::lsi::{rank_sweep, LsiMethod, QuerySet, RelevanceJudgments};
use crate::metrics::MetricReport;
use crate::nmf::io::save_factors;
use crate::nmf::{factorize, kkt_report, NmfInit, NmfOptions, NmfSolver, StopReason};
use crate::svd::{truncated_svd, SvdTruncation};
use crate::textprep::{
    build_matrix, read_labels_tsv, read_stoplist, BuildOptions, Corpus, Normalization, TermDocMatrix,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NMFKIT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nmfkit", version, about = "NMF, truncated SVD, clustering and LSI experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factorize a matrix with SVD or NMF and write the factors.
    Decompose(DecomposeArgs),
    /// Cluster a point set or a labeled corpus over seeded trials and score
    /// the result against the reference classes.
    Cluster(ClusterArgs),
    /// Sweep decomposition ranks and report retrieval average precision.
    LsiEval(LsiEvalArgs),
    /// Run the embedded synonymy and polysemy examples and check them
    /// against the reference values.
    #[command(name = "paper-demo")]
    Demo(DemoArgs),
    /// Generate a labeled synthetic point set.
    GenData(GenDataArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposeMethod {
    Svd,
    NmfMu,
    NmfAnls,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMethodArg {
    Njw,
    NmfKernel,
    SvdCocluster,
    NmfDoc,
    Kmeans,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverArg {
    Mu,
    Anls,
}

impl From<SolverArg> for NmfSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Mu => NmfSolver::Multiplicative,
            SolverArg::Anls => NmfSolver::Anls,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    Lsi,
    Clustering,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoArg {
    Synonymy,
    Polysemy,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetArg {
    Rings,
    Moons,
    Blobs,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DecomposeArgs {
    /// TOML file with default values for the flags below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Matrix file: CSV, or Matrix Market with a `.mtx` extension.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<DecomposeMethod>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub stall_tol: Option<f64>,
    /// Absolute KKT tolerance; defaults to 1e-6·‖A‖_F.
    #[arg(long)]
    pub kkt_tol: Option<f64>,
    /// Exit with status 1 when NMF stops at the iteration cap.
    #[arg(long)]
    pub require_convergence: bool,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ClusterArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Point set CSV with `x,y,class` rows.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Corpus directory or `id<TAB>text` file.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// `doc_id<TAB>class` file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<ClusterMethodArg>,
    /// NMF solver for nmf-kernel and nmf-doc.
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// Cluster count; defaults to the number of reference classes.
    #[arg(long)]
    pub k: Option<usize>,
    /// Gaussian kernel width for njw and nmf-kernel.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Stop word file, one word per line; replaces the built-in list.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LsiEvalArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// `query_id<TAB>text` file.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// `query_id<TAB>doc_id` file.
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<DecomposeMethod>,
    /// Comma-separated ranks, each either `r` or `start:stop[:step]`.
    #[arg(long)]
    pub ranks: Option<String>,
    /// NMF trials per rank; SVD always runs once.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DemoArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(value_enum)]
    pub which: Option<DemoArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Absolute per-entry tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory for `report.json` and `listing.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenDataArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<DatasetArg>,
    /// Points per ring, moon or blob.
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Comma-separated ring radii.
    #[arg(long)]
    pub radii: Option<String>,
    /// Blob centers as `x,y;x,y;…`.
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! merge_with_file {
    ($t:ident { $($f:ident),* $(,)? } $(bools { $($b:ident),* })?) => {
        impl $t {
            fn resolve(self) -> Outcome<Self> {
                let file: $t = load_config(self.config.as_deref())?;
                Ok($t { config: self.config, $($f: self.$f.or(file.$f),)* $($($b: self.$b || file.$b,)*)? })
            }
        }
    };
}

merge_with_file!(DecomposeArgs { input, method, rank, out, seed, max_iter, stall_tol, kkt_tol } bools { require_convergence });
merge_with_file!(ClusterArgs { points, corpus, labels, method, solver, k, alpha, trials, seed, preset, stoplist, out });
merge_with_file!(LsiEvalArgs {
    corpus,
    queries,
    judgments,
    method,
    ranks,
    trials,
    seed,
    preset,
    stoplist,
    max_iter,
    out
});
merge_with_file!(DemoArgs { which, seed, tol, out });
merge_with_file!(GenDataArgs { kind, n, noise, radii, centers, seed, out });

/// Reason a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Invalid invocation, input or configuration.
    Usage(String),
    /// A check or convergence requirement failed.
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Check(_) => EXIT_CHECK,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(String::from)).unwrap_or_default()
}

fn required<T>(v: Option<T>, flag: &str) -> Outcome<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required")))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Outcome<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Outcome<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e).into())
}

fn create_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).into())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Builds the global thread pool from `NMFKIT_THREADS` when set.
pub fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
        log::debug!("thread pool already initialized");
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| execute(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Check(m) => eprintln!("check failed: {m}"),
            }
            f.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Outcome<()> {
    match command {
        Command::Decompose(a) => cmd_decompose(a.resolve()?),
        Command::Cluster(a) => cmd_cluster(a.resolve()?),
        Command::LsiEval(a) => cmd_lsi_eval(a.resolve()?),
        Command::Demo(a) => cmd_demo(a.resolve()?),
        Command::GenData(a) => cmd_gen_data(a.resolve()?),
    }
}

fn check_positive(v: Option<f64>, flag: &str) -> Outcome<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(usage(format!("--{flag} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn nmf_options(max_iter: Option<usize>, stall_tol: Option<f64>, kkt_tol: Option<f64>) -> Outcome<NmfOptions> {
    check_positive(stall_tol, "stall-tol")?;
    check_positive(kkt_tol, "kkt-tol")?;
    let d = NmfOptions::default();
    let opts =
        NmfOptions { max_iter: max_iter.unwrap_or(d.max_iter), stall_tol: stall_tol.unwrap_or(d.stall_tol), kkt_tol };
    if opts.max_iter == 0 {
        return Err(usage("--max-iter must be at least 1"));
    }
    Ok(opts)
}

#[derive(Serialize)]
struct SvdSummary<'a> {
    method: &'static str,
    rows: usize,
    cols: usize,
    rank: usize,
    singular_values: &'a [f64],
}

pub fn cmd_decompose(args: DecomposeArgs) -> Outcome<()> {
    let input = required(args.input, "input")?;
    let method = required(args.method, "method")?;
    let rank = required(args.rank, "rank")?;
    let out = required(args.out, "out")?;
    let seed = args.seed.unwrap_or(0);
    let opts = nmf_options(args.max_iter, args.stall_tol, args.kkt_tol)?;
    if rank == 0 {
        return Err(usage("--rank must be at least 1"));
    }
    let a = read_matrix(&input)?;
    let limit = a.rows().min(a.cols());
    if method == DecomposeMethod::Svd && rank > limit {
        return Err(usage(format!("--rank {rank} exceeds min(rows, cols) = {limit}")));
    }
    match method {
        DecomposeMethod::Svd => {
            let t: SvdTruncation = truncated_svd(&a, rank, seed)?;
            create_dir(&out)?;
            write_csv(out.join("U.csv"), &t.u)?;
            write_csv(out.join("V.csv"), &t.v)?;
            let sv: String = t.s.iter().map(|s| format!("{s}\n")).collect();
            write_file(&out.join("singular_values.csv"), &sv)?;
            let summary = SvdSummary { method: "svd", rows: a.rows(), cols: a.cols(), rank, singular_values: &t.s };
            write_file(&out.join("summary.json"), &to_json(&summary))?;
            println!("svd rank {rank}: singular values {:?}", t.s);
            Ok(())
        }
        DecomposeMethod::NmfMu | DecomposeMethod::NmfAnls => {
            let solver = if method == DecomposeMethod::NmfMu { NmfSolver::Multiplicative } else { NmfSolver::Anls };
            let f = factorize(&a, rank, solver, NmfInit::Seed(seed), &opts)?;
            let kkt = kkt_report(&a, &f.b, &f.c)?;
            create_dir(&out)?;
            save_factors(&out, &f, Some(&kkt))?;
            let mut trace = String::from("iteration,objective\n");
            for (i, v) in f.objective_trace.iter().enumerate() {
                let _ = writeln!(trace, "{i},{v}");
            }
            write_file(&out.join("objective_trace.csv"), &trace)?;
            println!(
                "{method:?} rank {rank}: {} iterations, stop {:?}, objective {}, max KKT residual {:e}",
                f.iterations,
                f.stop_reason,
                f.final_objective(),
                kkt.max_residual()
            );
            if args.require_convergence && f.stop_reason == StopReason::MaxIter {
                return Err(Failure::Check(format!("no convergence within {} iterations", f.iterations)));
            }
            Ok(())
        }
    }
}

enum ClusterInput {
    Points(PointSet2D),
    Docs { tdm: TermDocMatrix, classes: Vec<usize> },
}

impl ClusterInput {
    fn reference(&self) -> &[usize] {
        match self {
            ClusterInput::Points(p) => &p.labels,
            ClusterInput::Docs { classes, .. } => classes,
        }
    }

    fn item_ids(&self) -> Vec<String> {
        match self {
            ClusterInput::Points(p) => (0..p.len()).map(|i| i.to_string()).collect(),
            ClusterInput::Docs { tdm, .. } => tdm.doc_ids.clone(),
        }
    }
}

fn preset_options(preset: PresetArg, stoplist: Option<&Path>) -> Outcome<BuildOptions> {
    let mut o = match preset {
        PresetArg::Lsi => BuildOptions::lsi(),
        PresetArg::Clustering => BuildOptions::clustering(),
    };
    if let Some(p) = stoplist {
        o.stoplist = Some(read_stoplist(p)?);
    }
    Ok(o)
}

#[derive(Serialize)]
struct MeanMetrics {
    mi: f64,
    entropy: f64,
    purity: f64,
    fmeasure: f64,
}

#[derive(Serialize)]
struct ClusterSummary {
    method: ClusterMethodArg,
    solver: Option<SolverArg>,
    k: usize,
    alpha: Option<f64>,
    seed: u64,
    trials: usize,
    items: usize,
    mean: MeanMetrics,
    per_trial: Vec<MetricReport>,
}

pub fn cmd_cluster(args: ClusterArgs) -> Outcome<()> {
    let method = required(args.method, "method")?;
    let trials = args.trials.unwrap_or(10);
    let seed = args.seed.unwrap_or(0);
    let solver = args.solver.unwrap_or(SolverArg::Anls);
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    check_positive(args.alpha, "alpha")?;
    let point_method = matches!(method, ClusterMethodArg::Njw | ClusterMethodArg::NmfKernel);
    let doc_method = matches!(method, ClusterMethodArg::SvdCocluster | ClusterMethodArg::NmfDoc);
    let input = match (&args.points, &args.corpus) {
        (Some(_), Some(_)) => return Err(usage("give either --points or --corpus, not both")),
        (None, None) => return Err(usage("one of --points or --corpus is required")),
        (Some(p), None) => {
            if doc_method {
                return Err(usage(format!("method {method:?} needs --corpus")));
            }
            ClusterInput::Points(PointSet2D::read_csv(p)?)
        }
        (None, Some(c)) => {
            if point_method {
                return Err(usage(format!("method {method:?} needs --points")));
            }
            let labels_path = required(args.labels.as_ref(), "labels")?;
            let labels = read_labels_tsv(labels_path)?;
            let corpus = Corpus::read(c)?;
            let (classes, _) = corpus.class_indices(&labels)?;
            let mut opts = preset_options(args.preset.unwrap_or(PresetArg::Clustering), args.stoplist.as_deref())?;
            // the document clustering functions normalize internally
            opts.normalize = Normalization::None;
            ClusterInput::Docs { tdm: build_matrix(&corpus, &opts)?, classes }
        }
    };
    let alpha = if point_method { Some(required(args.alpha, "alpha")?) } else { args.alpha };
    let n_classes = {
        let mut c = input.reference().to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    let k = args.k.unwrap_or(n_classes);
    let items = input.reference().len();
    if k == 0 || k > items {
        return Err(usage(format!("--k must lie in [1, {items}], got {k}")));
    }
    let nmf_solver: NmfSolver = solver.into();
    let doc_kmeans_rows = match (&input, method) {
        (ClusterInput::Docs { tdm, .. }, ClusterMethodArg::Kmeans) => Some(xu_normalize(&tdm.matrix)?.transpose()),
        _ => None,
    };

    let outcomes: Vec<Outcome<(ClusteringResult, MetricReport, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t as u64);
            let start = Instant::now();
            let r = match (&input, method) {
                (ClusterInput::Points(p), ClusterMethodArg::Njw) => njw_cluster(p, k, alpha.expect("checked"), s)?,
                (ClusterInput::Points(p), ClusterMethodArg::NmfKernel) => {
                    nmf_kernel_cluster(p, k, alpha.expect("checked"), nmf_solver, s)?
                }
                (ClusterInput::Points(p), ClusterMethodArg::Kmeans) => kmeans(&p.to_matrix(), k, s, DEFAULT_RESTARTS)?,
                (ClusterInput::Docs { tdm, .. }, ClusterMethodArg::SvdCocluster) => svd_doc_cluster(&tdm.matrix, k, s)?,
                (ClusterInput::Docs { tdm, .. }, ClusterMethodArg::NmfDoc) => {
                    nmf_doc_cluster(&tdm.matrix, k, nmf_solver, s)?
                }
                (ClusterInput::Docs { .. }, ClusterMethodArg::Kmeans) => {
                    kmeans(doc_kmeans_rows.as_ref().expect("built"), k, s, DEFAULT_RESTARTS)?
                }
                _ => unreachable!("method/input pairing validated"),
            };
            let secs = start.elapsed().as_secs_f64();
            let m = MetricReport::from_labels(&r.labels, input.reference())?;
            Ok((r, m, secs))
        })
        .collect();
    let runs: Vec<(ClusteringResult, MetricReport, f64)> = outcomes.into_iter().collect::<Outcome<_>>()?;

    let n = trials as f64;
    let mean = MeanMetrics {
        mi: runs.iter().map(|r| r.1.mi).sum::<f64>() / n,
        entropy: runs.iter().map(|r| r.1.entropy).sum::<f64>() / n,
        purity: runs.iter().map(|r| r.1.purity).sum::<f64>() / n,
        fmeasure: runs.iter().map(|r| r.1.fmeasure).sum::<f64>() / n,
    };
    let uses_solver = matches!(method, ClusterMethodArg::NmfKernel | ClusterMethodArg::NmfDoc);
    let summary = ClusterSummary {
        method,
        solver: uses_solver.then_some(solver),
        k,
        alpha,
        seed,
        trials,
        items,
        mean,
        per_trial: runs.iter().map(|r| r.1.clone()).collect(),
    };
    let mean_secs = runs.iter().map(|r| r.2).sum::<f64>() / n;
    println!(
        "{}: mean over {trials} trials  MI {:.4}  entropy {:.4}  purity {:.4}  Fmeasure {:.4}  ({mean_secs:.3} s/trial)",
        label(&method),
        summary.mean.mi, summary.mean.entropy, summary.mean.purity, summary.mean.fmeasure
    );
    if let Some(out) = &args.out {
        create_dir(out)?;
        let mut metrics = String::from("trial,seed,mi,entropy,purity,fmeasure\n");
        let mut timing = String::from("trial,seconds\n");
        for (t, (_, m, secs)) in runs.iter().enumerate() {
            let _ = writeln!(
                metrics,
                "{t},{},{},{},{},{}",
                seed.wrapping_add(t as u64),
                m.mi,
                m.entropy,
                m.purity,
                m.fmeasure
            );
            let _ = writeln!(timing, "{t},{secs:.6}");
        }
        write_file(&out.join("metrics.csv"), &metrics)?;
        write_file(&out.join("timing.csv"), &timing)?;
        write_file(&out.join("summary.json"), &to_json(&summary))?;
        runs[0].0.write_csv(out.join("labels.csv"), &input.item_ids())?;
    }
    Ok(())
}

/// Parses `2,4,10:50:10,60` into a rank list.
pub fn parse_ranks(spec: &str) -> Outcome<Vec<usize>> {
    let bad = || usage(format!("invalid rank list `{spec}`"));
    let mut ranks = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<usize> = part.split(':').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Outcome<_>>()?;
        match nums[..] {
            [r] => ranks.push(r),
            [a, b] => ranks.extend(a..=b),
            [a, b, step] if step > 0 => ranks.extend((a..=b).step_by(step)),
            _ => return Err(bad()),
        }
    }
    if ranks.is_empty() {
        return Err(usage("rank list is empty"));
    }
    Ok(ranks)
}

#[derive(Serialize)]
struct LsiSummary {
    method: LsiMethod,
    best_rank: usize,
    value: f64,
    formatted: String,
    trials: usize,
    ranks: Vec<usize>,
    documents: usize,
    terms: usize,
    queries: usize,
    evaluated_queries: usize,
    skipped_queries: usize,
}

pub fn cmd_lsi_eval(args: LsiEvalArgs) -> Outcome<()> {
    let corpus_path = required(args.corpus, "corpus")?;
    let queries_path = required(args.queries, "queries")?;
    let judgments_path = required(args.judgments, "judgments")?;
    let method = match required(args.method, "method")? {
        DecomposeMethod::Svd => LsiMethod::Svd,
        DecomposeMethod::NmfMu => LsiMethod::NmfMu,
        DecomposeMethod::NmfAnls => LsiMethod::NmfAnls,
    };
    let ranks = parse_ranks(&required(args.ranks, "ranks")?)?;
    let trials = args.trials.unwrap_or(10);
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let seed = args.seed.unwrap_or(0);
    let opts = nmf_options(args.max_iter, None, None)?;
    let build = preset_options(args.preset.unwrap_or(PresetArg::Lsi), args.stoplist.as_deref())?;

    let corpus = Corpus::read(&corpus_path)?;
    let judgments = RelevanceJudgments::read(&judgments_path)?;
    let tdm = build_matrix(&corpus, &build)?;
    judgments.validate(&tdm.doc_ids)?;
    let qs = QuerySet::read(&queries_path, &tdm, &build)?;
    let limit = tdm.matrix.rows().min(tdm.matrix.cols());
    if let Some(&r) = ranks.iter().find(|&&r| r == 0 || r > limit) {
        return Err(usage(format!("rank {r} outside [1, {limit}]")));
    }
    let evaluated = qs.ids.iter().filter(|id| judgments.relevant.get(*id).is_some_and(|d| !d.is_empty())).count();
    if evaluated == 0 {
        return Err(Error::NoRelevantDocuments.into());
    }

    let table = rank_sweep(&tdm, &qs, &judgments, method, &ranks, trials, seed, &opts)?;
    let s = table.summary().expect("nonempty sweep");
    let summary = LsiSummary {
        method,
        best_rank: s.best_rank,
        value: s.value,
        formatted: s.formatted.clone(),
        trials: s.trials,
        ranks: ranks.clone(),
        documents: tdm.doc_ids.len(),
        terms: tdm.vocabulary.len(),
        queries: qs.len(),
        evaluated_queries: evaluated,
        skipped_queries: qs.len() - evaluated,
    };
    println!("{}: best mean average precision {}", label(&method), s.formatted);
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_file(&out.join("sweep.csv"), &table.to_csv())?;
        write_file(&out.join("timing.csv"), &table.timing_csv())?;
        write_file(&out.join("summary.json"), &to_json(&summary))?;
    }
    Ok(())
}

pub fn cmd_demo(args: DemoArgs) -> Outcome<()> {
    let which = args.which.unwrap_or(DemoArg::All);
    let seed = args.seed.unwrap_or(0);
    let tol = args.tol.unwrap_or(crate::demo::DEFAULT_TOL);
    check_positive(Some(tol), "tol")?;
    let kinds: &[DemoKind] = match which {
        DemoArg::Synonymy => &[DemoKind::Synonymy],
        DemoArg::Polysemy => &[DemoKind::Polysemy],
        DemoArg::All => &[DemoKind::Synonymy, DemoKind::Polysemy],
    };
    let reports: Vec<DemoReport> = kinds.iter().map(|&k| run_demo(k, seed, tol)).collect::<crate::Result<_>>()?;
    let mut listing = String::new();
    for r in &reports {
        let _ = writeln!(listing, "== {:?} ==\n", r.kind);
        listing.push_str(&r.listing);
        listing.push_str(&r.diff_report());
        listing.push('\n');
    }
    print!("{listing}");
    if let Some(out) = &args.out {
        create_dir(out)?;
        write_file(&out.join("report.json"), &to_json(&reports))?;
        write_file(&out.join("listing.txt"), &listing)?;
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("{:?}/{}", r.kind, c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} of the reference values not reproduced: {}", failed.len(), failed.join(", "))))
    }
}

fn parse_floats(s: &str, what: &str) -> Outcome<Vec<f64>> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("invalid {what} `{s}`")))).collect()
}

fn parse_centers(s: &str) -> Outcome<Vec<[f64; 2]>> {
    s.split(';')
        .map(|c| match parse_floats(c, "center")?[..] {
            [x, y] => Ok([x, y]),
            _ => Err(usage(format!("center `{c}` needs two coordinates"))),
        })
        .collect()
}

pub fn cmd_gen_data(args: GenDataArgs) -> Outcome<()> {
    let kind = required(args.kind, "kind")?;
    let out = required(args.out, "out")?;
    let n = args.n.unwrap_or(200);
    let noise = args.noise.unwrap_or(0.05);
    let seed = args.seed.unwrap_or(0);
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let points = match kind {
        DatasetArg::Rings => {
            make_rings(n, &parse_floats(args.radii.as_deref().unwrap_or("1,3"), "radii")?, noise, seed)?
        }
        DatasetArg::Moons => make_moons(n, noise, seed)?,
        DatasetArg::Blobs => {
            make_blobs(n, &parse_centers(args.centers.as_deref().unwrap_or("0,0;10,10"))?, noise, seed)?
        }
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    points.write_csv(&out)?;
    println!("wrote {} points to {}", points.len(), out.display());
    Ok(())
}

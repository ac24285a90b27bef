use nmfkit::demo::{polysemy_matrix, synonymy_matrix};
use nmfkit::lsi::{evaluate_run, rank_sweep, score_queries, LsiMethod, QuerySet, RelevanceJudgments};
use nmfkit::nmf::NmfOptions;
use nmfkit::svd::truncated_svd;
use nmfkit::textprep::{remove_stopwords, tokenize, TermDocMatrix};
use nmfkit::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn synonymy_setup() -> (TermDocMatrix, QuerySet, RelevanceJudgments) {
    let tdm = TermDocMatrix {
        matrix: synonymy_matrix(),
        vocabulary: ["mark", "twain", "samuel", "clemens", "purple", "colour"].map(String::from).to_vec(),
        doc_ids: ids("d", 5),
    };
    let q = Matrix::from_rows(&[[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]]).unwrap();
    let qs = QuerySet::new(q, vec!["authors".into(), "colour".into()]).unwrap();
    let j = RelevanceJudgments::from_pairs([
        ("authors", "d1"),
        ("authors", "d2"),
        ("authors", "d3"),
        ("colour", "d4"),
        ("colour", "d5"),
    ]);
    (tdm, qs, j)
}

#[test]
fn polysemy_svd_query_scores() {
    let a_hat = truncated_svd(&polysemy_matrix(), 2, 0).unwrap().low_rank_approx();
    let qs = QuerySet::new(Matrix::from_rows(&[[1.0, 0.0, 0.0, 1.0, 0.0]]).unwrap(), vec!["q1".into()]).unwrap();
    let s = score_queries(&qs, &a_hat).unwrap();
    let expected = [1.86726, 1.00346, 1.86726, 1.00346, 1.40251, 0.91744];
    for (x, e) in s.row(0).iter().zip(expected) {
        assert!((x - e).abs() <= 5e-5, "{x} vs {e}");
    }
}

#[test]
fn rank_two_svd_retrieves_synonyms() {
    let (tdm, qs, j) = synonymy_setup();
    let a_hat = truncated_svd(&tdm.matrix, 2, 0).unwrap().low_rank_approx();
    let run = evaluate_run(&qs, &j, &a_hat, &tdm.doc_ids, 11).unwrap();
    assert_eq!(run.queries[1].ranking[..2], [3, 4]);
    assert_eq!(run.queries[1].average_precision, 1.0);
    assert_eq!(run.mean_average_precision, 1.0);
    let sweep = rank_sweep(&tdm, &qs, &j, LsiMethod::Svd, &[2], 5, 0, &NmfOptions::default()).unwrap();
    assert_eq!(sweep.rows.len(), 1);
    assert_eq!(sweep.rows[0].mean_ap, 1.0);
}

#[test]
fn full_rank_svd_matches_raw_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (m, n) = (12, 9);
    let tdm = TermDocMatrix {
        matrix: Matrix::from_fn(m, n, |_, _| rng.random::<f64>()),
        vocabulary: ids("t", m),
        doc_ids: ids("d", n),
    };
    let q = Matrix::from_fn(4, m, |_, _| if rng.random::<f64>() < 0.4 { 1.0 } else { 0.0 });
    let qs = QuerySet::new(q, ids("q", 4)).unwrap();
    let pairs: Vec<(String, String)> = (0..4)
        .flat_map(|i| {
            (0..n).filter(move |j| (i + j) % 3 == 0).map(move |j| (format!("q{}", i + 1), format!("d{}", j + 1)))
        })
        .collect();
    let j = RelevanceJudgments::from_pairs(pairs);
    let raw = evaluate_run(&qs, &j, &tdm.matrix, &tdm.doc_ids, 11).unwrap().mean_average_precision;
    let sweep = rank_sweep(&tdm, &qs, &j, LsiMethod::Svd, &[n], 1, 0, &NmfOptions::default()).unwrap();
    assert!((sweep.rows[0].mean_ap - raw).abs() < 1e-12, "{} vs {raw}", sweep.rows[0].mean_ap);
}

#[test]
fn nmf_sweep_reproducible() {
    let (tdm, qs, j) = synonymy_setup();
    let run = || rank_sweep(&tdm, &qs, &j, LsiMethod::NmfAnls, &[1, 2, 3], 3, 9, &NmfOptions::default()).unwrap();
    let a = run();
    assert_eq!(a.rows.len(), 9);
    assert_eq!(a.to_csv(), run().to_csv());
    assert!(rank_sweep(&tdm, &qs, &j, LsiMethod::Svd, &[6], 1, 0, &NmfOptions::default()).is_err());
    assert!(rank_sweep(&tdm, &qs, &j, LsiMethod::Svd, &[], 1, 0, &NmfOptions::default()).is_err());
}

#[test]
fn token_examples() {
    assert_eq!(tokenize("Mark Twain's bank"), vec!["mark", "twain", "bank"]);
    assert!(tokenize("").is_empty());
    let stop = ["the".to_string()].into_iter().collect();
    assert_eq!(remove_stopwords(&["the".into(), "bank".into()], &stop), vec!["bank"]);
}

//! Corpus to term-document matrix: tokenization, stop-word removal, Porter
//! stemming, singleton pruning and weighting.

mod porter;
mod stopwords;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{xu_normalize, Matrix};

pub use porter::porter_stem;
pub use stopwords::{default_stoplist, remove_stopwords, SNOWBALL_ENGLISH};

/// Lowercase runs of ASCII letters of length two or more.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphabetic()).filter(|t| t.len() >= 2).map(|t| t.to_ascii_lowercase()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
}

/// Documents with unique ids, in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::invalid(format!("duplicate document id `{}`", d.id)));
            }
        }
        Ok(Corpus { documents })
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Corpus::new(pairs.into_iter().map(|(id, text)| Document { id: id.into(), text: text.into() }).collect())
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }

    /// Reads a directory of text files (id = file name, sorted) or a
    /// two-column `id<TAB>text` file.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if path.is_dir() {
            read_corpus_dir(path)
        } else {
            read_corpus_tsv(path)
        }
    }

    /// Class index per document, classes numbered in sorted name order.
    /// Every document needs a label and every label a document.
    pub fn class_indices(&self, labels: &[(String, String)]) -> Result<(Vec<usize>, Vec<String>)> {
        let by_id: HashMap<&str, &str> = labels.iter().map(|(d, c)| (d.as_str(), c.as_str())).collect();
        let known: HashSet<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();
        if let Some((d, _)) = labels.iter().find(|(d, _)| !known.contains(d.as_str())) {
            return Err(Error::UnknownDocument(d.clone()));
        }
        let names: Vec<String> = labels.iter().map(|(_, c)| c.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let idx = self
            .documents
            .iter()
            .map(|d| {
                let c = by_id
                    .get(d.id.as_str())
                    .ok_or_else(|| Error::invalid(format!("document `{}` has no class label", d.id)))?;
                Ok(names.binary_search_by(|n| n.as_str().cmp(c)).expect("present"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((idx, names))
    }
}

pub fn read_corpus_dir(dir: impl AsRef<Path>) -> Result<Corpus> {
    let dir = dir.as_ref();
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(dir, e))?
        .into_iter()
        .filter(|e| e.path().is_file())
        .collect();
    entries.sort_by_key(|e| e.file_name());
    let mut docs = Vec::with_capacity(entries.len());
    for e in entries {
        let p = e.path();
        let bytes = fs::read(&p).map_err(|err| Error::io(&p, err))?;
        docs.push(Document {
            id: e.file_name().to_string_lossy().into_owned(),
            text: String::from_utf8_lossy(&bytes).into_owned(),
        });
    }
    if docs.is_empty() {
        return Err(Error::parse(dir, "no documents"));
    }
    Corpus::new(docs)
}

/// Lines of `key<TAB>value`; blank lines are skipped.
pub fn read_two_column(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, format!("line {}: expected two tab-separated columns", no + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::parse(path, format!("line {}: empty key", no + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_corpus_tsv(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let rows = read_two_column(path)?;
    if rows.is_empty() {
        return Err(Error::parse(path, "no documents"));
    }
    Corpus::from_pairs(rows).map_err(|e| Error::parse(path, e.to_string()))
}

/// `doc_id<TAB>class` pairs.
pub fn read_labels_tsv(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    read_two_column(path)
}

/// One term per line, lowercased.
pub fn read_stoplist(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim().to_ascii_lowercase()).filter(|l| !l.is_empty()).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Raw,
    /// `log(count + 1)`.
    #[default]
    Log,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// Column scaling by `diag(AᵀAe)^{-1/2}`.
    Xu,
}

/// Preprocessing switches. [`BuildOptions::default`] is the retrieval
/// recipe; [`BuildOptions::clustering`] the document-clustering one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub stem: bool,
    pub prune_singletons: bool,
    pub weighting: Weighting,
    pub normalize: Normalization,
    /// Terms to drop; `None` keeps everything.
    pub stoplist: Option<HashSet<String>>,
}

impl BuildOptions {
    /// No stemming, no pruning, log weighting, no normalization.
    pub fn lsi() -> Self {
        BuildOptions {
            stem: false,
            prune_singletons: false,
            weighting: Weighting::Log,
            normalize: Normalization::None,
            stoplist: Some(default_stoplist()),
        }
    }

    /// Stemming, singleton pruning, raw counts, column normalization.
    pub fn clustering() -> Self {
        BuildOptions {
            stem: true,
            prune_singletons: true,
            weighting: Weighting::Raw,
            normalize: Normalization::Xu,
            stoplist: Some(default_stoplist()),
        }
    }

    /// Tokenize, drop stop words, optionally stem.
    pub fn terms(&self, text: &str) -> Vec<String> {
        let mut t = tokenize(text);
        if let Some(s) = &self.stoplist {
            t = remove_stopwords(&t, s);
        }
        if self.stem {
            t = t.iter().map(|w| porter_stem(w)).collect();
        }
        t
    }

    fn weigh(&self, count: f64) -> f64 {
        match self.weighting {
            Weighting::Raw => count,
            Weighting::Log => count.ln_1p(),
        }
    }
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions::lsi()
    }
}

/// Term-by-document matrix with its row and column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct TermDocMatrix {
    /// M×N, nonnegative.
    pub matrix: Matrix,
    /// Sorted, unique.
    pub vocabulary: Vec<String>,
    pub doc_ids: Vec<String>,
}

impl TermDocMatrix {
    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.vocabulary.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    /// Query vector over the vocabulary with the same term processing and
    /// weighting as the matrix, never normalized. Unknown terms are ignored.
    pub fn query_vector(&self, text: &str, options: &BuildOptions) -> Vec<f64> {
        let mut q = vec![0.0; self.vocabulary.len()];
        for t in options.terms(text) {
            if let Some(i) = self.term_index(&t) {
                q[i] += 1.0;
            }
        }
        q.iter_mut().for_each(|v| *v = options.weigh(*v));
        q
    }
}

pub fn build_matrix(corpus: &Corpus, options: &BuildOptions) -> Result<TermDocMatrix> {
    if corpus.is_empty() {
        return Err(Error::invalid("corpus holds no documents"));
    }
    let counts: Vec<BTreeMap<String, usize>> = corpus
        .documents
        .par_iter()
        .map(|d| {
            let mut m = BTreeMap::new();
            for t in options.terms(&d.text) {
                *m.entry(t).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &counts {
        for t in m.keys() {
            *df.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let vocabulary: Vec<String> =
        df.into_iter().filter(|&(_, n)| !options.prune_singletons || n >= 2).map(|(t, _)| t.to_string()).collect();
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index: HashMap<&str, usize> = vocabulary.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let mut matrix = Matrix::zeros(vocabulary.len(), corpus.len());
    for (j, m) in counts.iter().enumerate() {
        for (t, &c) in m {
            if let Some(&i) = index.get(t.as_str()) {
                matrix[(i, j)] = options.weigh(c as f64);
            }
        }
    }
    if options.normalize == Normalization::Xu {
        matrix = xu_normalize(&matrix)?;
    }
    Ok(TermDocMatrix { matrix, vocabulary, doc_ids: corpus.ids() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw() -> BuildOptions {
        BuildOptions { weighting: Weighting::Raw, ..BuildOptions::lsi() }
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("Mark Twain's bank"), vec!["mark", "twain", "bank"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("a I x").is_empty());
        assert_eq!(tokenize("caf\u{e9}-au-lait 42go"), vec!["caf", "au", "lait", "go"]);
    }

    #[test]
    fn pruning_keeps_shared_terms() {
        let c = Corpus::from_pairs([("d1", "bank money"), ("d2", "bank river")]).unwrap();
        let opts = BuildOptions { prune_singletons: true, ..raw() };
        let t = build_matrix(&c, &opts).unwrap();
        assert_eq!(t.vocabulary, vec!["bank"]);
        let c = Corpus::from_pairs([("d1", "money"), ("d2", "river")]).unwrap();
        assert!(matches!(build_matrix(&c, &opts), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn log_weighting() {
        let c = Corpus::from_pairs([("d1", "bank bank"), ("d2", "river")]).unwrap();
        let t = build_matrix(&c, &BuildOptions::lsi()).unwrap();
        assert!((t.matrix[(0, 0)] - 3f64.ln()).abs() < 1e-15);
        assert_eq!(t.matrix[(0, 1)], 0.0);
        assert!((BuildOptions::lsi().weigh(std::f64::consts::E - 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stemming_and_stopwords() {
        let c = Corpus::from_pairs([("a", "The connected rivers"), ("b", "connecting the river")]).unwrap();
        let t = build_matrix(&c, &BuildOptions::clustering()).unwrap();
        assert_eq!(t.vocabulary, vec!["connect", "river"]);
        let col_norm: f64 = (0..2).map(|i| t.matrix[(i, 0)]).sum();
        assert!(col_norm > 0.0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(Corpus::from_pairs([("a", "x"), ("a", "y")]).is_err());
    }

    #[test]
    fn query_vectors_use_matrix_weighting() {
        let c = Corpus::from_pairs([("d1", "mark twain"), ("d2", "samuel clemens")]).unwrap();
        let t = build_matrix(&c, &raw()).unwrap();
        assert_eq!(t.query_vector("Mark the twain unknown", &raw()), vec![0.0, 1.0, 0.0, 1.0]);
        let logged = t.query_vector("mark", &BuildOptions::lsi());
        assert_eq!(logged[1], 2f64.ln());
    }

    #[test]
    fn class_indices_sorted_names() {
        let c = Corpus::from_pairs([("a", "x"), ("b", "y"), ("c", "z")]).unwrap();
        let labels = vec![("a".into(), "river".into()), ("b".into(), "bank".into()), ("c".into(), "river".into())];
        let (idx, names) = c.class_indices(&labels).unwrap();
        assert_eq!(names, vec!["bank", "river"]);
        assert_eq!(idx, vec![1, 0, 1]);
        let bad = vec![("zz".into(), "bank".into())];
        assert!(matches!(c.class_indices(&bad), Err(Error::UnknownDocument(_))));
    }
}

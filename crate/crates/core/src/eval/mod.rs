//! Similarity benchmarks and clustering evaluation.

mod cluster;
mod rank;

pub use cluster::{ari, kmeans, nmi, KMeans};
pub use rank::{average_ranks, kendall, pearson, spearman};

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use serde::Serialize;

use crate::corpus::tokenize;
use crate::embedding::{cosine, doc_vector_tokens, EmbeddingMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WordPair {
    pub first: String,
    pub second: String,
    pub score: f64,
}

/// Word pairs with human similarity ratings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimilarityDataset {
    pub pairs: Vec<WordPair>,
}

impl SimilarityDataset {
    /// Rejects non-finite scores and duplicate unordered pairs.
    pub fn new(pairs: Vec<WordPair>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, p) in pairs.iter().enumerate() {
            if !p.score.is_finite() {
                return Err(Error::Format {
                    line: i + 1,
                    message: "score is not finite".into(),
                });
            }
            let key = if p.first <= p.second {
                (p.first.clone(), p.second.clone())
            } else {
                (p.second.clone(), p.first.clone())
            };
            if !seen.insert(key) {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("duplicate pair {} / {}", p.first, p.second),
                });
            }
        }
        Ok(Self { pairs })
    }

    /// Parses `word1<TAB>word2<TAB>score` lines. Blank and `#` lines are
    /// skipped, as is a leading header whose score column is not numeric.
    /// Words are lowercased.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        let mut first_record = true;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            let fmt = |message: String| Error::Format { line: lineno, message };
            if fields.len() != 3 {
                return Err(fmt(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let score = match fields[2].trim().parse::<f64>() {
                Ok(s) => s,
                Err(_) if first_record => {
                    first_record = false;
                    continue;
                }
                Err(_) => return Err(fmt(format!("bad score `{}`", fields[2]))),
            };
            first_record = false;
            if !score.is_finite() {
                return Err(fmt("score is not finite".into()));
            }
            let (a, b) = (fields[0].trim().to_lowercase(), fields[1].trim().to_lowercase());
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if !seen.insert(key) {
                return Err(fmt(format!("duplicate pair {a} / {b}")));
            }
            pairs.push(WordPair {
                first: a,
                second: b,
                score,
            });
        }
        Ok(Self { pairs })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub spearman: Option<f64>,
    pub kendall: Option<f64>,
    pub pairs_total: usize,
    pub pairs_covered: usize,
    /// Set when fewer than two pairs are covered or a side has no rank
    /// variance.
    pub undefined: bool,
}

/// Correlates cosine similarity with human scores over pairs whose words
/// both have embeddings; other pairs are skipped and counted.
pub fn run_similarity_benchmark(matrix: &EmbeddingMatrix, dataset: &SimilarityDataset) -> BenchmarkResult {
    let mut human = Vec::new();
    let mut model = Vec::new();
    for p in &dataset.pairs {
        let (Some(a), Some(b)) = (matrix.get(&p.first), matrix.get(&p.second)) else {
            continue;
        };
        human.push(p.score);
        model.push(cosine(a, b).expect("rows share the matrix dimension"));
    }
    let spearman = spearman(&human, &model).ok();
    let kendall = kendall(&human, &model).ok();
    BenchmarkResult {
        undefined: spearman.is_none() || kendall.is_none(),
        spearman,
        kendall,
        pairs_total: dataset.pairs.len(),
        pairs_covered: human.len(),
    }
}

/// Documents with gold cluster labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDocuments {
    pub labels: Vec<String>,
    pub docs: Vec<Vec<String>>,
}

impl LabeledDocuments {
    /// Parses `label<TAB>document text` lines; blank and `#` lines skipped.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut out = Self::default();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((label, text)) = line.split_once('\t') else {
                return Err(Error::Format {
                    line: i + 1,
                    message: "expected `label<TAB>text`".into(),
                });
            };
            out.labels.push(label.trim().to_string());
            out.docs.push(tokenize(text));
        }
        Ok(out)
    }

    /// Gold labels as dense ids in first-seen order.
    pub fn label_ids(&self) -> Vec<usize> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        self.labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.as_str()).or_insert(next)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult {
    pub k: usize,
    pub nmi: f64,
    pub ari: f64,
    #[serde(skip)]
    pub predicted: Vec<usize>,
}

/// Mean-pooled document vectors, k-means, and agreement with gold labels.
pub fn cluster_documents(
    matrix: &EmbeddingMatrix,
    docs: &LabeledDocuments,
    k: usize,
    max_iters: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let vectors: Vec<Vec<f64>> = docs.docs.iter().map(|d| doc_vector_tokens(d, matrix)).collect();
    let fit = kmeans(&vectors, k, max_iters, seed)?;
    let gold = docs.label_ids();
    Ok(ClusterResult {
        k,
        nmi: nmi(&gold, &fit.labels)?,
        ari: ari(&gold, &fit.labels)?,
        predicted: fit.labels,
    })
}

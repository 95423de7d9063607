//! Read-only views of a trained model: per-clause literal states, corpus
//! co-occurrence counts and shared embedding evidence between two words.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::autoencoder::TrainedModel;
use crate::corpus::{DocumentIndex, Vocabulary};
use crate::embedding::embedding_for;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Original,
    Negated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiteralEntry {
    pub literal: usize,
    pub token: String,
    pub polarity: Polarity,
    pub state: u16,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseReport {
    pub target: String,
    pub clause_id: usize,
    pub weight_for_target: i32,
    pub threshold: u16,
    pub entries: Vec<LiteralEntry>,
}

fn literal_entry(model: &TrainedModel, clause: usize, literal: usize) -> LiteralEntry {
    let d = model.vocab.len();
    let (feature, polarity) = if literal < d {
        (literal, Polarity::Original)
    } else {
        (literal - d, Polarity::Negated)
    };
    let state = model.bank.state(clause, literal);
    LiteralEntry {
        literal,
        token: model.vocab.token(feature as u32).unwrap_or_default().to_string(),
        polarity,
        state,
        included: state > model.bank.half(),
    }
}

/// Literals of clause `clause` sorted by state descending (ties by literal
/// id), truncated to `top_k` unless it is 0.
pub fn clause_report(model: &TrainedModel, word: &str, clause: usize, top_k: usize) -> Result<ClauseReport> {
    let position = model.require_output(word)?;
    if clause >= model.bank.clauses() {
        return Err(Error::UnknownClause {
            clause,
            clauses: model.bank.clauses(),
        });
    }
    let mut entries: Vec<LiteralEntry> = (0..model.bank.literals())
        .map(|l| literal_entry(model, clause, l))
        .collect();
    entries.sort_by(|a, b| b.state.cmp(&a.state).then(a.literal.cmp(&b.literal)));
    if top_k > 0 {
        entries.truncate(top_k);
    }
    Ok(ClauseReport {
        target: word.to_string(),
        clause_id: clause,
        weight_for_target: model.weights.get(clause, position),
        threshold: model.bank.half(),
        entries,
    })
}

/// Reports for every clause with positive weight for `word`, by clause id.
pub fn positive_clause_reports(model: &TrainedModel, word: &str, top_k: usize) -> Result<Vec<ClauseReport>> {
    let position = model.require_output(word)?;
    (0..model.bank.clauses())
        .filter(|&j| model.weights.get(j, position) > 0)
        .map(|j| clause_report(model, word, j, top_k))
        .collect()
}

impl fmt::Display for ClauseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "clause {} for `{}` (weight {}, N = {})",
            self.clause_id, self.target, self.weight_for_target, self.threshold
        )?;
        let width = self
            .entries
            .iter()
            .map(|e| e.token.chars().count() + 1)
            .max()
            .unwrap_or(0)
            .max("literal".len());
        writeln!(f, "{:<width$}  {:>5}  included", "literal", "state")?;
        for e in &self.entries {
            let name = match e.polarity {
                Polarity::Original => e.token.clone(),
                Polarity::Negated => format!("¬{}", e.token),
            };
            writeln!(
                f,
                "{:<width$}  {:>5}  {}",
                name,
                e.state,
                if e.included { "yes" } else { "no" }
            )?;
        }
        Ok(())
    }
}

/// Writes `clause_id,weight_for_target,literal,token,polarity,state,included`
/// rows covering every literal of every clause, as seen from `word`.
pub fn write_clause_csv<W: Write>(model: &TrainedModel, word: &str, mut out: W) -> Result<()> {
    let position = model.require_output(word)?;
    writeln!(out, "clause_id,weight_for_target,literal,token,polarity,state,included")?;
    for j in 0..model.bank.clauses() {
        let w = model.weights.get(j, position);
        for l in 0..model.bank.literals() {
            let e = literal_entry(model, j, l);
            let polarity = match e.polarity {
                Polarity::Original => "original",
                Polarity::Negated => "negated",
            };
            writeln!(
                out,
                "{j},{w},{l},{},{polarity},{},{}",
                csv_field(&e.token),
                e.state,
                e.included as u8
            )?;
        }
    }
    out.flush().map_err(Error::from)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Number of documents containing both words.
pub fn cooccurrence(index: &DocumentIndex, vocab: &Vocabulary, first: &str, second: &str) -> Result<usize> {
    let a = index.postings(vocab.require(first)?);
    let b = index.postings(vocab.require(second)?);
    Ok(intersection_size(a, b))
}

/// Size of the intersection of two ascending lists.
pub fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedContributor {
    pub feature: u32,
    pub token: String,
    pub first: i32,
    pub second: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimilarityExplanation {
    pub first: String,
    pub second: String,
    /// Always `"min-of-components"`: features are ranked by
    /// `min(e_first[i], e_second[i])`, keeping only positive minima.
    pub method: &'static str,
    pub contributors: Vec<SharedContributor>,
}

impl fmt::Display for SimilarityExplanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "shared positive evidence for `{}` and `{}` (ranked by min of components)",
            self.first, self.second
        )?;
        let width = self
            .contributors
            .iter()
            .map(|c| c.token.chars().count())
            .max()
            .unwrap_or(0)
            .max("feature".len());
        writeln!(f, "{:<width$}  {:>8}  {:>8}", "feature", self.first, self.second)?;
        for c in &self.contributors {
            writeln!(f, "{:<width$}  {:>8}  {:>8}", c.token, c.first, c.second)?;
        }
        Ok(())
    }
}

/// Features both embeddings weigh positively, strongest shared value first.
pub fn explain_similarity(model: &TrainedModel, first: &str, second: &str, top_k: usize) -> Result<SimilarityExplanation> {
    let a = embedding_for(model, first)?;
    let b = embedding_for(model, second)?;
    let mut contributors: Vec<SharedContributor> = a
        .values
        .iter()
        .zip(&b.values)
        .enumerate()
        .filter(|(_, (&x, &y))| x.min(y) > 0)
        .map(|(i, (&x, &y))| SharedContributor {
            feature: i as u32,
            token: model.vocab.token(i as u32).unwrap_or_default().to_string(),
            first: x,
            second: y,
        })
        .collect();
    contributors.sort_by(|p, q| {
        q.first
            .min(q.second)
            .cmp(&p.first.min(p.second))
            .then(p.feature.cmp(&q.feature))
    });
    if top_k > 0 {
        contributors.truncate(top_k);
    }
    Ok(SimilarityExplanation {
        first: first.to_string(),
        second: second.to_string(),
        method: "min-of-components",
        contributors,
    })
}

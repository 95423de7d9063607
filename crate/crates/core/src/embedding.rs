//! Word embeddings read from the full automaton state matrix.
//!
//! For a target word, every clause with strictly positive weight contributes
//! `state(x_i) - state(¬x_i)` for each feature `i`, included or not. The sum
//! is divided by the number of such clauses and floored.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;

use crate::autoencoder::TrainedModel;
use crate::error::{Error, Result};

/// Integer embedding of one output word, one component per vocabulary feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingVector {
    pub owner: u32,
    pub values: Vec<i32>,
}

/// Embedding of the output at `position` in `model.outputs`.
pub fn extract_embedding(model: &TrainedModel, position: usize) -> EmbeddingVector {
    let bank = &model.bank;
    let d = bank.dim();
    let mut sums = vec![0i64; d];
    let mut positive = 0i64;
    for j in 0..bank.clauses() {
        if model.weights.get(j, position) <= 0 {
            continue;
        }
        positive += 1;
        let (orig, neg) = bank.row(j).split_at(d);
        for ((acc, &a), &b) in sums.iter_mut().zip(orig).zip(neg) {
            *acc += a as i64 - b as i64;
        }
    }
    let values = if positive == 0 {
        vec![0; d]
    } else {
        sums.into_iter()
            .map(|v| v.div_euclid(positive) as i32)
            .collect()
    };
    EmbeddingVector {
        owner: model.outputs[position],
        values,
    }
}

/// Embedding for a word, looked up by token.
pub fn embedding_for(model: &TrainedModel, word: &str) -> Result<EmbeddingVector> {
    Ok(extract_embedding(model, model.require_output(word)?))
}

/// One row per output word, in output order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingMatrix {
    dim: usize,
    tokens: Vec<String>,
    owners: Vec<u32>,
    values: Vec<i32>,
    rows_by_token: HashMap<String, usize>,
}

impl EmbeddingMatrix {
    /// Rows must all have length `dim`; `owners` are the rows' vocabulary ids.
    pub fn new(dim: usize, tokens: Vec<String>, owners: Vec<u32>, rows: Vec<Vec<i32>>) -> Result<Self> {
        if tokens.len() != rows.len() || owners.len() != rows.len() {
            return Err(Error::DimensionError {
                left: tokens.len(),
                right: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(dim * rows.len());
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionError {
                    left: row.len(),
                    right: dim,
                });
            }
            values.extend_from_slice(row);
        }
        let rows_by_token = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Self {
            dim,
            tokens,
            owners,
            values,
            rows_by_token,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn owner(&self, row: usize) -> u32 {
        self.owners[row]
    }

    pub fn row(&self, row: usize) -> &[i32] {
        &self.values[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_of(&self, token: &str) -> Option<usize> {
        self.rows_by_token.get(token).copied()
    }

    pub fn get(&self, token: &str) -> Option<&[i32]> {
        self.row_of(token).map(|r| self.row(r))
    }

    /// Row whose owner is `feature`.
    pub fn row_of_feature(&self, feature: u32) -> Option<usize> {
        self.owners.iter().position(|&o| o == feature)
    }

    /// Reads the vector text format. Owners are assigned by row position.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let fmt = |line: usize, message: String| Error::Format { line, message };
        let (_, header) = lines
            .next()
            .ok_or_else(|| fmt(1, "missing header".into()))?;
        let header = header?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| fmt(1, format!("bad header `{header}`")))?;
        let [m, d] = nums[..] else {
            return Err(fmt(1, format!("header must be `m d`, got `{header}`")));
        };
        let mut tokens = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let token = parts.next().unwrap_or_default().to_string();
            let row: Vec<i32> = parts
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| fmt(lineno, format!("bad component: {e}")))?;
            if row.len() != d {
                return Err(fmt(lineno, format!("expected {d} components, found {}", row.len())));
            }
            tokens.push(token);
            rows.push(row);
        }
        if rows.len() != m {
            return Err(fmt(1, format!("header declares {m} rows, found {}", rows.len())));
        }
        let owners = (0..m as u32).collect();
        Self::new(d, tokens, owners, rows).map_err(|e| fmt(1, e.to_string()))
    }

    /// Writes `m d` then one `token v1 … vd` line per row.
    pub fn write_text<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (r, token) in self.tokens.iter().enumerate() {
            out.write_all(token.as_bytes())?;
            for v in self.row(r) {
                write!(out, " {v}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn export_text(&self, path: &Path) -> Result<()> {
        self.write_text(fs::File::create(path)?)?;
        Ok(())
    }

    pub fn load_text(path: &Path) -> Result<Self> {
        Self::read_text(io::BufReader::new(fs::File::open(path)?))
    }
}

/// Embeddings for every output of `model`.
pub fn extract_all(model: &TrainedModel) -> EmbeddingMatrix {
    let rows = (0..model.outputs.len())
        .map(|p| extract_embedding(model, p).values)
        .collect();
    let tokens = (0..model.outputs.len())
        .map(|p| model.output_token(p).to_string())
        .collect();
    EmbeddingMatrix::new(model.vocab.len(), tokens, model.outputs.clone(), rows)
        .expect("rows have vocabulary length")
}

/// Cosine similarity; 0 when either vector is all zero.
pub fn cosine(a: &[i32], b: &[i32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionError {
            left: a.len(),
            right: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0f64, 0f64, 0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub token: String,
    pub owner: u32,
    pub score: f64,
}

/// Top-`k` rows by cosine to `word`, excluding the word itself. Ties go to
/// the lower vocabulary id.
pub fn nearest_neighbors(matrix: &EmbeddingMatrix, word: &str, k: usize) -> Result<Vec<Neighbor>> {
    let query = matrix
        .row_of(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let q = matrix.row(query);
    let mut scored: Vec<(f64, u32, usize)> = (0..matrix.len())
        .filter(|&r| r != query)
        .map(|r| Ok((cosine(q, matrix.row(r))?, matrix.owner(r), r)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .map(|(score, owner, r)| Neighbor {
            token: matrix.tokens()[r].clone(),
            owner,
            score,
        })
        .collect())
}

/// Mean of the rows owned by `doc`'s features; the zero vector when none
/// of them has a row.
pub fn doc_vector(doc: &[u32], matrix: &EmbeddingMatrix) -> Vec<f64> {
    let by_owner: HashMap<u32, usize> = (0..matrix.len()).map(|r| (matrix.owner(r), r)).collect();
    mean_rows(doc.iter().filter_map(|f| by_owner.get(f).copied()), matrix)
}

/// Like [`doc_vector`], keyed by token.
pub fn doc_vector_tokens<S: AsRef<str>>(tokens: &[S], matrix: &EmbeddingMatrix) -> Vec<f64> {
    mean_rows(tokens.iter().filter_map(|t| matrix.row_of(t.as_ref())), matrix)
}

fn mean_rows(rows: impl Iterator<Item = usize>, matrix: &EmbeddingMatrix) -> Vec<f64> {
    let mut acc = vec![0f64; matrix.dim()];
    let mut n = 0usize;
    for r in rows {
        n += 1;
        for (a, &v) in acc.iter_mut().zip(matrix.row(r)) {
            *a += v as f64;
        }
    }
    if n > 0 {
        acc.iter_mut().for_each(|a| *a /= n as f64);
    }
    acc
}

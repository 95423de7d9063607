//! Corpus ingestion: tokenization, vocabulary, document index and
//! training-example generation.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Lowercases `text` and splits it on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Reads a corpus from a file (one document per line) or a directory of
/// `.txt` files (one document per file, visited in file-name order).
pub fn read_corpus(path: &Path) -> Result<Vec<Vec<String>>> {
    if path.is_dir() {
        let mut files = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
            .collect::<Vec<_>>();
        files.sort();
        files
            .iter()
            .map(|f| Ok(tokenize(&fs::read_to_string(f)?)))
            .collect()
    } else {
        Ok(fs::read_to_string(path)?.lines().map(tokenize).collect())
    }
}

/// Ordered set of distinct tokens; ids are positions in `tokens`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from tokens already in id order.
    ///
    /// Duplicates and empty tokens are rejected.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::InvalidConfig("empty token in vocabulary".into()));
            }
            if ids.insert(t.clone(), i as u32).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate token `{t}`")));
            }
        }
        Ok(Self { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Looks up a word, failing with [`Error::UnknownWord`].
    pub fn require(&self, token: &str) -> Result<u32> {
        self.id(token)
            .ok_or_else(|| Error::UnknownWord(token.to_string()))
    }
}

/// Keeps the `size` tokens with the highest document frequency.
///
/// Ties are broken lexicographically. A corpus with fewer distinct tokens
/// yields a smaller vocabulary.
pub fn build_vocabulary<S: AsRef<str>>(docs: &[Vec<S>], size: usize) -> Vocabulary {
    let mut df: HashMap<String, u32> = HashMap::new();
    for doc in docs {
        let mut seen: Vec<String> = doc
            .iter()
            .map(|t| t.as_ref().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u32)> = df.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(size);
    let tokens = ranked.into_iter().map(|(t, _)| t).collect();
    Vocabulary::from_tokens(tokens).expect("ranked tokens are distinct and non-empty")
}

/// Documents as sorted feature-id sets plus word → document postings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentIndex {
    dim: usize,
    docs: Vec<Vec<u32>>,
    postings: Vec<Vec<u32>>,
}

impl DocumentIndex {
    /// Builds an index from feature-id sets. Ids must be `< dim`.
    pub fn from_feature_sets(dim: usize, sets: Vec<Vec<u32>>) -> Result<Self> {
        let mut docs = Vec::with_capacity(sets.len());
        let mut postings = vec![Vec::new(); dim];
        for (doc_id, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &f in &set {
                if f as usize >= dim {
                    return Err(Error::EncodingRange { id: f, dim });
                }
                postings[f as usize].push(doc_id as u32);
            }
            docs.push(set);
        }
        Ok(Self {
            dim,
            docs,
            postings,
        })
    }

    /// Vocabulary size the index was built against.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn doc(&self, id: usize) -> &[u32] {
        &self.docs[id]
    }

    pub fn docs(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn postings(&self, feature: u32) -> &[u32] {
        &self.postings[feature as usize]
    }

    pub fn doc_frequency(&self, feature: u32) -> usize {
        self.postings[feature as usize].len()
    }

    /// Documents that do not contain `feature`, in ascending order.
    pub fn lacking(&self, feature: u32) -> Vec<u32> {
        let containing = &self.postings[feature as usize];
        let mut out = Vec::with_capacity(self.docs.len() - containing.len());
        let mut next = containing.iter().peekable();
        for doc in 0..self.docs.len() as u32 {
            if next.peek() == Some(&&doc) {
                next.next();
            } else {
                out.push(doc);
            }
        }
        out
    }

    /// Draws a training example for `target`. See [`sample_from`].
    pub fn sample_example<R: Rng + ?Sized>(
        &self,
        target: u32,
        label: bool,
        accumulation: usize,
        rng: &mut R,
    ) -> Result<InputVector> {
        if target as usize >= self.dim {
            return Err(Error::EncodingRange {
                id: target,
                dim: self.dim,
            });
        }
        if label {
            self.sample_from(self.postings(target), target, label, accumulation, rng)
        } else {
            let lacking = self.lacking(target);
            self.sample_from(&lacking, target, label, accumulation, rng)
        }
    }

    /// Unions `accumulation` documents drawn uniformly with replacement from
    /// `qualifying`, then masks `target` to absent.
    ///
    /// Consumes exactly `accumulation` calls to `rng.random_range(0..len)`.
    pub fn sample_from<R: Rng + ?Sized>(
        &self,
        qualifying: &[u32],
        target: u32,
        label: bool,
        accumulation: usize,
        rng: &mut R,
    ) -> Result<InputVector> {
        if qualifying.is_empty() {
            return Err(Error::SamplingUnsatisfiable {
                target: format!("feature {target}"),
                label: label as u8,
            });
        }
        let mut x = InputVector::empty(self.dim);
        for _ in 0..accumulation.max(1) {
            let doc = qualifying[rng.random_range(0..qualifying.len())];
            for &f in &self.docs[doc as usize] {
                x.set_feature(f, true);
            }
        }
        x.set_feature(target, false);
        Ok(x)
    }

    /// Writes `token<TAB>id<TAB>doc_frequency` rows in id order.
    pub fn write_vocab_tsv<W: Write>(&self, vocab: &Vocabulary, mut out: W) -> io::Result<()> {
        for (id, token) in vocab.tokens().iter().enumerate() {
            writeln!(out, "{token}\t{id}\t{}", self.doc_frequency(id as u32))?;
        }
        Ok(())
    }
}

/// Maps tokens through `vocab`, dropping out-of-vocabulary tokens.
pub fn build_index<S: AsRef<str>>(docs: &[Vec<S>], vocab: &Vocabulary) -> DocumentIndex {
    let sets = docs
        .iter()
        .map(|doc| {
            doc.iter()
                .filter_map(|t| vocab.id(&t.as_ref().to_lowercase()))
                .collect()
        })
        .collect();
    DocumentIndex::from_feature_sets(vocab.len(), sets).expect("vocabulary ids are in range")
}

/// Binary input of `2d` literals: features in `[0, d)`, negations in `[d, 2d)`.
///
/// Stored as packed 64-bit words so clause evaluation can test whole words
/// of literals at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputVector {
    dim: usize,
    words: Vec<u64>,
}

impl InputVector {
    /// All features absent (every negation literal set).
    pub fn empty(dim: usize) -> Self {
        let mut x = Self {
            dim,
            words: vec![0; (2 * dim).div_ceil(64)],
        };
        for i in dim..2 * dim {
            x.words[i / 64] |= 1 << (i % 64);
        }
        x
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of literals, `2d`.
    pub fn len(&self) -> usize {
        2 * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    #[inline]
    pub fn literal(&self, l: usize) -> bool {
        self.words[l / 64] >> (l % 64) & 1 == 1
    }

    pub fn feature(&self, i: u32) -> bool {
        self.literal(i as usize)
    }

    /// Sets feature `i` and its negation consistently.
    pub fn set_feature(&mut self, i: u32, present: bool) {
        let (pos, neg) = (i as usize, self.dim + i as usize);
        if present {
            self.words[pos / 64] |= 1 << (pos % 64);
            self.words[neg / 64] &= !(1 << (neg % 64));
        } else {
            self.words[pos / 64] &= !(1 << (pos % 64));
            self.words[neg / 64] |= 1 << (neg % 64);
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|l| self.literal(l) as u8).collect()
    }

    pub fn present_features(&self) -> Vec<u32> {
        (0..self.dim as u32).filter(|&i| self.feature(i)).collect()
    }
}

/// Encodes a feature set as an input vector over `dim` features.
pub fn encode(features: &[u32], dim: usize) -> Result<InputVector> {
    let mut x = InputVector::empty(dim);
    for &f in features {
        if f as usize >= dim {
            return Err(Error::EncodingRange { id: f, dim });
        }
        x.set_feature(f, true);
    }
    Ok(x)
}

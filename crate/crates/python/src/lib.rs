//! Python bindings: configuration, training, model files, embeddings,
//! clause inspection and the evaluation metrics.

use std::path::PathBuf;

use omni_tmae::embedding::{embedding_for, nearest_neighbors};
use omni_tmae::eval;
use omni_tmae::inspect::{self, Polarity};
use omni_tmae::{build_index, build_vocabulary, persist, Error};
use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::UnknownWord(w) => PyKeyError::new_err(w),
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "TmConfig", skip_from_py_object)]
#[derive(Clone)]
struct PyTmConfig {
    inner: omni_tmae::TmConfig,
}

#[pymethods]
impl PyTmConfig {
    #[new]
    #[pyo3(signature = (
        clauses = 32,
        threshold = 20000,
        specificity = 1.0,
        state_bits = 8,
        epochs = 4,
        number_of_examples = 2000,
        accumulation = 24,
        boost_true_positive = true,
        seed = 42,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        clauses: usize,
        threshold: u32,
        specificity: f64,
        state_bits: u32,
        epochs: usize,
        number_of_examples: usize,
        accumulation: usize,
        boost_true_positive: bool,
        seed: u64,
    ) -> PyResult<Self> {
        let inner = omni_tmae::TmConfig {
            clauses,
            threshold,
            specificity,
            state_bits,
            epochs,
            number_of_examples,
            accumulation,
            boost_true_positive,
            seed,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn clauses(&self) -> usize {
        self.inner.clauses
    }
    #[getter]
    fn threshold(&self) -> u32 {
        self.inner.threshold
    }
    #[getter]
    fn specificity(&self) -> f64 {
        self.inner.specificity
    }
    #[getter]
    fn state_bits(&self) -> u32 {
        self.inner.state_bits
    }
    #[getter]
    fn epochs(&self) -> usize {
        self.inner.epochs
    }
    #[getter]
    fn number_of_examples(&self) -> usize {
        self.inner.number_of_examples
    }
    #[getter]
    fn accumulation(&self) -> usize {
        self.inner.accumulation
    }
    #[getter]
    fn boost_true_positive(&self) -> bool {
        self.inner.boost_true_positive
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        format!("TmConfig({})", self.inner.echo())
    }
}

#[pyclass(name = "Model", skip_from_py_object)]
struct PyModel {
    inner: omni_tmae::TrainedModel,
}

#[pymethods]
impl PyModel {
    /// Trains on tokenized documents. `outputs` defaults to the whole
    /// vocabulary.
    #[staticmethod]
    #[pyo3(signature = (docs, config, vocab_size = 40000, outputs = None))]
    fn train(
        py: Python<'_>,
        docs: Vec<Vec<String>>,
        config: &PyTmConfig,
        vocab_size: usize,
        outputs: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let vocab = build_vocabulary(&docs, vocab_size);
        let index = build_index(&docs, &vocab);
        let ids: Vec<u32> = match outputs {
            Some(words) => words.iter().map(|w| vocab.require(w)).collect::<Result<_, _>>().map_err(to_py)?,
            None => (0..vocab.len() as u32).collect(),
        };
        let config = config.inner.clone();
        let inner = py
            .detach(|| omni_tmae::train(&index, &vocab, &ids, &config))
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: persist::load(&path).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(Self {
            inner: persist::from_bytes(data).map_err(to_py)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        persist::save(&self.inner, &path).map_err(to_py)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &persist::to_bytes(&self.inner))
    }

    #[getter]
    fn vocabulary(&self) -> Vec<String> {
        self.inner.vocab.tokens().to_vec()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        (0..self.inner.outputs.len())
            .map(|k| self.inner.output_token(k).to_string())
            .collect()
    }

    #[getter]
    fn config(&self) -> PyTmConfig {
        PyTmConfig {
            inner: self.inner.config.clone(),
        }
    }

    /// Clause `j`'s literal states, `2·d` values with negations second.
    fn clause_states(&self, clause: usize) -> PyResult<Vec<u16>> {
        if clause >= self.inner.bank.clauses() {
            return Err(to_py(Error::UnknownClause {
                clause,
                clauses: self.inner.bank.clauses(),
            }));
        }
        Ok(self.inner.bank.row(clause).to_vec())
    }

    fn weights(&self, word: &str) -> PyResult<Vec<i32>> {
        let k = self.inner.require_output(word).map_err(to_py)?;
        Ok((0..self.inner.bank.clauses()).map(|j| self.inner.weights.get(j, k)).collect())
    }

    fn embedding(&self, word: &str) -> PyResult<Vec<i32>> {
        Ok(embedding_for(&self.inner, word).map_err(to_py)?.values)
    }

    fn embeddings(&self) -> PyEmbeddings {
        PyEmbeddings {
            inner: omni_tmae::extract_all(&self.inner),
        }
    }

    #[pyo3(signature = (word, clause, top_k = 10))]
    fn clause_report<'py>(&self, py: Python<'py>, word: &str, clause: usize, top_k: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = inspect::clause_report(&self.inner, word, clause, top_k).map_err(to_py)?;
        let entries = r
            .entries
            .iter()
            .map(|e| {
                let d = PyDict::new(py);
                d.set_item("literal", e.literal)?;
                d.set_item("token", &e.token)?;
                d.set_item("negated", e.polarity == Polarity::Negated)?;
                d.set_item("state", e.state)?;
                d.set_item("included", e.included)?;
                Ok(d)
            })
            .collect::<PyResult<Vec<_>>>()?;
        let d = PyDict::new(py);
        d.set_item("target", r.target)?;
        d.set_item("clause_id", r.clause_id)?;
        d.set_item("weight_for_target", r.weight_for_target)?;
        d.set_item("threshold", r.threshold)?;
        d.set_item("entries", entries)?;
        Ok(d)
    }

    /// `(token, first, second)` for features both embeddings weigh
    /// positively, strongest shared value first.
    #[pyo3(signature = (first, second, top_k = 10))]
    fn explain(&self, first: &str, second: &str, top_k: usize) -> PyResult<Vec<(String, i32, i32)>> {
        let e = inspect::explain_similarity(&self.inner, first, second, top_k).map_err(to_py)?;
        Ok(e.contributors.into_iter().map(|c| (c.token, c.first, c.second)).collect())
    }
}

#[pyclass(name = "Embeddings", skip_from_py_object)]
struct PyEmbeddings {
    inner: omni_tmae::EmbeddingMatrix,
}

#[pymethods]
impl PyEmbeddings {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: omni_tmae::EmbeddingMatrix::load_text(&path).map_err(to_py)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.export_text(&path).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn tokens(&self) -> Vec<String> {
        self.inner.tokens().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, word: &str) -> bool {
        self.inner.get(word).is_some()
    }

    fn __getitem__(&self, word: &str) -> PyResult<Vec<i32>> {
        self.inner
            .get(word)
            .map(<[i32]>::to_vec)
            .ok_or_else(|| PyKeyError::new_err(word.to_string()))
    }

    #[pyo3(signature = (word, k = 5))]
    fn nearest(&self, word: &str, k: usize) -> PyResult<Vec<(String, f64)>> {
        let n = nearest_neighbors(&self.inner, word, k).map_err(to_py)?;
        Ok(n.into_iter().map(|n| (n.token, n.score)).collect())
    }

    fn similarity(&self, first: &str, second: &str) -> PyResult<f64> {
        let a = self.inner.get(first).ok_or_else(|| PyKeyError::new_err(first.to_string()))?;
        let b = self.inner.get(second).ok_or_else(|| PyKeyError::new_err(second.to_string()))?;
        omni_tmae::cosine(a, b).map_err(to_py)
    }
}

#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    omni_tmae::tokenize(text)
}

#[pyfunction]
fn read_corpus(path: PathBuf) -> PyResult<Vec<Vec<String>>> {
    omni_tmae::corpus::read_corpus(&path).map_err(to_py)
}

/// Most frequent `size` words by document frequency.
#[pyfunction]
fn build_vocab(docs: Vec<Vec<String>>, size: usize) -> Vec<String> {
    build_vocabulary(&docs, size).tokens().to_vec()
}

#[pyfunction]
fn cosine(a: Vec<i32>, b: Vec<i32>) -> PyResult<f64> {
    omni_tmae::cosine(&a, &b).map_err(to_py)
}

#[pyfunction]
fn spearman(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    eval::spearman(&xs, &ys).map_err(to_py)
}

#[pyfunction]
fn kendall(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    eval::kendall(&xs, &ys).map_err(to_py)
}

#[pyfunction]
fn nmi(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    eval::nmi(&a, &b).map_err(to_py)
}

#[pyfunction]
fn ari(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    eval::ari(&a, &b).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (vectors, k, max_iters = 300, seed = 42))]
fn kmeans(vectors: Vec<Vec<f64>>, k: usize, max_iters: usize, seed: u64) -> PyResult<Vec<usize>> {
    Ok(eval::kmeans(&vectors, k, max_iters, seed).map_err(to_py)?.labels)
}

#[pymodule]
#[pyo3(name = "omni_tmae")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTmConfig>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyEmbeddings>()?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(read_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(build_vocab, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(kendall, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(ari, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    Ok(())
}

//! Tsetlin machine autoencoder that trains one coalesced clause bank over a
//! corpus and reads integer word embeddings from the full automaton state
//! matrix, with similarity/clustering evaluation and inspection tools.

pub mod autoencoder;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod inspect;
pub mod persist;
pub mod tm;

pub use autoencoder::{train, training_schedule, TrainedModel};
pub use corpus::{build_index, build_vocabulary, encode, tokenize, DocumentIndex, InputVector, Vocabulary};
pub use embedding::{cosine, extract_all, extract_embedding, EmbeddingMatrix, EmbeddingVector};
pub use error::{Error, Result};
pub use tm::{ClauseBank, Mode, TmConfig, WeightMatrix};

//! Training orchestration: preparation, evaluation and update over a fixed
//! schedule of (epoch, output word, example) steps.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{DocumentIndex, Vocabulary};
use crate::error::{Error, Result};
use crate::tm::{update_for_output, ClauseBank, TmConfig, WeightMatrix};

/// A trained coalesced machine together with the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub vocab: Vocabulary,
    pub bank: ClauseBank,
    pub weights: WeightMatrix,
    pub config: TmConfig,
    pub outputs: Vec<u32>,
}

impl TrainedModel {
    /// Position of `feature` among the outputs.
    pub fn output_position(&self, feature: u32) -> Option<usize> {
        self.outputs.iter().position(|&o| o == feature)
    }

    /// Resolves a word to its output position.
    pub fn require_output(&self, word: &str) -> Result<usize> {
        self.vocab
            .id(word)
            .and_then(|id| self.output_position(id))
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    pub fn output_token(&self, position: usize) -> &str {
        self.vocab
            .token(self.outputs[position])
            .expect("outputs are vocabulary ids")
    }
}

/// One step of the training schedule. `epoch` and `example` are 1-based;
/// `output` is the output's position in the output list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub epoch: usize,
    pub output: usize,
    pub example: usize,
}

impl Step {
    /// Labels alternate 1, 0, 1, 0, … within each output's block.
    pub fn label(&self) -> bool {
        self.example % 2 == 1
    }
}

/// Steps in lexicographic (epoch, output, example) order.
pub fn training_schedule(
    outputs: usize,
    epochs: usize,
    number_of_examples: usize,
) -> impl Iterator<Item = Step> {
    (1..=epochs).flat_map(move |epoch| {
        (0..outputs).flat_map(move |output| {
            (1..=number_of_examples).map(move |example| Step {
                epoch,
                output,
                example,
            })
        })
    })
}

/// Fresh machine: all states at N, weights ±1 drawn from `rng` in
/// clause-major order.
pub fn initialize<R: Rng + ?Sized>(
    dim: usize,
    outputs: usize,
    config: &TmConfig,
    rng: &mut R,
) -> (ClauseBank, WeightMatrix) {
    let bank = ClauseBank::new(config.clauses, dim, config.half_states());
    let weights = (0..config.clauses * outputs)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    let weights = WeightMatrix::from_vec(config.clauses, outputs, weights).expect("sized");
    (bank, weights)
}

pub fn train(
    index: &DocumentIndex,
    vocab: &Vocabulary,
    outputs: &[u32],
    config: &TmConfig,
) -> Result<TrainedModel> {
    train_with_progress(index, vocab, outputs, config, |_, _| {})
}

/// Trains and calls `on_epoch(epoch, elapsed)` after each completed epoch.
pub fn train_with_progress(
    index: &DocumentIndex,
    vocab: &Vocabulary,
    outputs: &[u32],
    config: &TmConfig,
    mut on_epoch: impl FnMut(usize, Duration),
) -> Result<TrainedModel> {
    config.validate()?;
    let dim = vocab.len();
    if index.dim() != dim {
        return Err(Error::DimensionError {
            left: index.dim(),
            right: dim,
        });
    }
    if outputs.is_empty() {
        return Err(Error::InvalidConfig("output list is empty".into()));
    }
    for &o in outputs {
        if o as usize >= dim {
            return Err(Error::EncodingRange { id: o, dim });
        }
    }
    if config.epochs > 0 {
        check_trainable(index, vocab, outputs, config.number_of_examples)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut bank, mut weights) = initialize(dim, outputs.len(), config, &mut rng);

    let mut lacking: Option<(usize, Vec<u32>)> = None;
    let mut epoch_start = Instant::now();
    let mut current_epoch = 1;
    for step in training_schedule(outputs.len(), config.epochs, config.number_of_examples) {
        if step.epoch != current_epoch {
            on_epoch(current_epoch, epoch_start.elapsed());
            current_epoch = step.epoch;
            epoch_start = Instant::now();
        }
        let target = outputs[step.output];
        let label = step.label();
        let qualifying: &[u32] = if label {
            index.postings(target)
        } else {
            if lacking.as_ref().map(|(o, _)| *o) != Some(step.output) {
                lacking = Some((step.output, index.lacking(target)));
            }
            &lacking.as_ref().expect("just filled").1
        };
        let x = index
            .sample_from(qualifying, target, label, config.accumulation, &mut rng)
            .map_err(|e| name_word(e, vocab, target))?;
        update_for_output(&mut bank, &mut weights, step.output, &x, label, config, &mut rng);
    }
    if config.epochs > 0 && config.number_of_examples > 0 {
        on_epoch(current_epoch, epoch_start.elapsed());
    }

    Ok(TrainedModel {
        vocab: vocab.clone(),
        bank,
        weights,
        config: config.clone(),
        outputs: outputs.to_vec(),
    })
}

fn check_trainable(
    index: &DocumentIndex,
    vocab: &Vocabulary,
    outputs: &[u32],
    examples: usize,
) -> Result<()> {
    for &o in outputs {
        let df = index.doc_frequency(o);
        let label = if examples >= 1 && df == 0 {
            1
        } else if examples >= 2 && df == index.num_docs() {
            0
        } else {
            continue;
        };
        return Err(Error::SamplingUnsatisfiable {
            target: word(vocab, o),
            label,
        });
    }
    Ok(())
}

fn word(vocab: &Vocabulary, id: u32) -> String {
    vocab
        .token(id)
        .map(|t| format!("`{t}`"))
        .unwrap_or_else(|| format!("feature {id}"))
}

fn name_word(err: Error, vocab: &Vocabulary, target: u32) -> Error {
    match err {
        Error::SamplingUnsatisfiable { label, .. } => Error::SamplingUnsatisfiable {
            target: word(vocab, target),
            label,
        },
        e => e,
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters of a coalesced Tsetlin machine autoencoder run.
///
/// `Default` mirrors the published training setup: 32 clauses, T = 20000,
/// s = 1.0, 4 epochs, 8 state bits, 2000 examples, accumulation 24.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmConfig {
    pub clauses: usize,
    pub threshold: u32,
    pub specificity: f64,
    pub state_bits: u32,
    pub epochs: usize,
    pub number_of_examples: usize,
    pub accumulation: usize,
    pub boost_true_positive: bool,
    pub seed: u64,
}

impl Default for TmConfig {
    fn default() -> Self {
        Self {
            clauses: 32,
            threshold: 20000,
            specificity: 1.0,
            state_bits: 8,
            epochs: 4,
            number_of_examples: 2000,
            accumulation: 24,
            boost_true_positive: true,
            seed: 42,
        }
    }
}

impl TmConfig {
    /// Inclusion threshold N; states run over `1..=2N`.
    pub fn half_states(&self) -> u16 {
        1 << (self.state_bits - 1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.clauses == 0 {
            return bad("clauses must be >= 1");
        }
        if self.threshold == 0 {
            return bad("threshold T must be >= 1");
        }
        if !(self.specificity.is_finite() && self.specificity >= 1.0) {
            return bad("specificity s must be a finite value >= 1");
        }
        // 2N must fit in a u16 state
        if !(1..=15).contains(&self.state_bits) {
            return bad("state_bits must be in 1..=15");
        }
        if self.accumulation == 0 {
            return bad("accumulation must be >= 1");
        }
        Ok(())
    }

    /// Single-line `key=value` summary.
    pub fn echo(&self) -> String {
        format!(
            "clauses={} T={} s={:?} epochs={} accumulation={} examples={} state_bits={} boost={} seed={}",
            self.clauses,
            self.threshold,
            self.specificity,
            self.epochs,
            self.accumulation,
            self.number_of_examples,
            self.state_bits,
            self.boost_true_positive,
            self.seed
        )
    }
}

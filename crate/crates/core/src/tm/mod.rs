//! Coalesced Tsetlin machine primitives.

mod bank;
mod config;
pub mod feedback;

pub use bank::{ClauseBank, Mode, WeightMatrix};
pub use config::TmConfig;
pub use feedback::{
    bernoulli, predict, type_ia, type_ib, type_ii, update_for_output, update_probability,
    vote_sum,
};

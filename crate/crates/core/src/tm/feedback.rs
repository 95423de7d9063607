//! Vote aggregation and the three feedback rules of the coalesced machine.
//!
//! Random draws follow a fixed protocol so runs replay exactly: a Bernoulli
//! trial with probability `p` consumes one `rng.random::<f64>()` only when
//! `0 < p < 1`; degenerate probabilities consume nothing.

use rand::Rng;

use super::bank::{ClauseBank, Mode, WeightMatrix};
use super::config::TmConfig;
use crate::corpus::InputVector;

#[inline]
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.random::<f64>() < p
    }
}

/// Weighted vote of all clauses for `output`, clamped to `[-T, T]`.
pub fn vote_sum(
    bank: &ClauseBank,
    weights: &WeightMatrix,
    output: usize,
    x: &InputVector,
    mode: Mode,
    threshold: u32,
) -> i32 {
    let t = threshold as i64;
    let raw: i64 = (0..bank.clauses())
        .filter(|&j| bank.clause_output(j, x, mode))
        .map(|j| weights.get(j, output) as i64)
        .sum();
    raw.clamp(-t, t) as i32
}

/// Prediction for a clamped vote; ties go to 1.
pub fn predict(vote: i32) -> bool {
    vote >= 0
}

/// `(T - v) / 2T` for a positive label, `(T + v) / 2T` for a negative one.
pub fn update_probability(vote: i32, label: bool, threshold: u32) -> f64 {
    let (t, v) = (threshold as f64, vote as f64);
    let p = if label { (t - v) / (2.0 * t) } else { (t + v) / (2.0 * t) };
    p.clamp(0.0, 1.0)
}

/// Type Ia: reinforce a firing clause toward the input.
///
/// Literals set in `x` step up with probability `(s-1)/s` (or always when
/// `boost` is on); unset literals step down with probability `1/s`.
pub fn type_ia<R: Rng + ?Sized>(
    bank: &mut ClauseBank,
    clause: usize,
    x: &InputVector,
    s: f64,
    boost: bool,
    rng: &mut R,
) {
    let p_up = if boost { 1.0 } else { (s - 1.0) / s };
    let p_down = 1.0 / s;
    for l in 0..bank.literals() {
        if x.literal(l) {
            if bernoulli(rng, p_up) {
                bank.increment(clause, l);
            }
        } else if bernoulli(rng, p_down) {
            bank.decrement(clause, l);
        }
    }
}

/// Type Ib: forget on a clause that did not fire; every state steps down
/// with probability `1/s`.
pub fn type_ib<R: Rng + ?Sized>(bank: &mut ClauseBank, clause: usize, s: f64, rng: &mut R) {
    let p_down = 1.0 / s;
    for l in 0..bank.literals() {
        if bernoulli(rng, p_down) {
            bank.decrement(clause, l);
        }
    }
}

/// Type II: push excluded literals that are 0 in `x` one step toward
/// inclusion so the clause stops matching this input.
pub fn type_ii(bank: &mut ClauseBank, clause: usize, x: &InputVector) {
    let half = bank.half();
    for l in 0..bank.literals() {
        if !x.literal(l) && bank.state(clause, l) <= half {
            bank.increment(clause, l);
        }
    }
}

/// One coalesced update of all clauses for `output` on example `(x, label)`.
///
/// Per clause, an update is granted with the vote-margin probability. The
/// clause then receives Type I feedback when its weight sign agrees with the
/// label (positive weight for `label = 1`, negative for `label = 0`) and
/// Type II otherwise; a firing clause has its weight stepped toward the
/// label. Returns the clamped vote computed before any change.
pub fn update_for_output<R: Rng + ?Sized>(
    bank: &mut ClauseBank,
    weights: &mut WeightMatrix,
    output: usize,
    x: &InputVector,
    label: bool,
    config: &TmConfig,
    rng: &mut R,
) -> i32 {
    let fired = bank.clause_outputs(x, Mode::Train);
    let t = config.threshold as i64;
    let raw: i64 = fired
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(j, _)| weights.get(j, output) as i64)
        .sum();
    let vote = raw.clamp(-t, t) as i32;
    let p = update_probability(vote, label, config.threshold);
    let s = config.specificity;

    for (j, &fires) in fired.iter().enumerate() {
        if !bernoulli(rng, p) {
            continue;
        }
        let positive = weights.get(j, output) >= 0;
        if positive == label {
            if fires {
                type_ia(bank, j, x, s, config.boost_true_positive, rng);
            } else {
                type_ib(bank, j, s, rng);
            }
        } else if fires {
            type_ii(bank, j, x);
        }
        if fires {
            weights.step(j, output, label);
        }
    }
    vote
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::encode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: u16 = 128;

    #[test]
    fn vote_clamps_and_ties() {
        let bank = ClauseBank::new(2, 1, N);
        let w = WeightMatrix::from_vec(2, 1, vec![12500, 12500]).unwrap();
        let x = encode(&[], 1).unwrap();
        assert_eq!(vote_sum(&bank, &w, 0, &x, Mode::Train, 20000), 20000);
        assert_eq!(vote_sum(&bank, &w, 0, &x, Mode::Infer, 20000), 0);
        assert!(predict(0));
        assert!(!predict(-1));
    }

    #[test]
    fn update_probability_examples() {
        assert_eq!(update_probability(20000, true, 20000), 0.0);
        assert_eq!(update_probability(0, true, 20000), 0.5);
        assert_eq!(update_probability(0, false, 20000), 0.5);
        assert_eq!(update_probability(-20000, true, 20000), 1.0);
        assert_eq!(update_probability(-20000, false, 20000), 0.0);
    }

    #[test]
    fn type_ia_deterministic_at_s_one() {
        let mut bank = ClauseBank::new(1, 3, N);
        bank.set_state(0, 2, 2 * N);
        let x = encode(&[0, 2], 3).unwrap(); // literals: 1 0 1 | 0 1 0
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        type_ia(&mut bank, 0, &x, 1.0, true, &mut rng);
        assert_eq!(bank.row(0), [N + 1, N - 1, 2 * N, N - 1, N + 1, N - 1]);
    }

    #[test]
    fn type_ia_frequency_matches_closed_form() {
        let s = 3.9;
        let trials = 100_000;
        let x = encode(&[0], 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ups = 0;
        let mut downs = 0;
        for _ in 0..trials {
            let mut bank = ClauseBank::new(1, 1, N);
            type_ia(&mut bank, 0, &x, s, false, &mut rng);
            ups += (bank.state(0, 0) == N + 1) as u32;
            downs += (bank.state(0, 1) == N - 1) as u32;
        }
        for (count, p) in [(ups, (s - 1.0) / s), (downs, 1.0 / s)] {
            let mean = trials as f64 * p;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((count as f64 - mean).abs() < 3.0 * sigma, "{count} vs {mean}");
        }
    }

    #[test]
    fn type_ib_examples() {
        let mut bank = ClauseBank::from_states(1, 2, N, vec![1, 5, N + 1, 2 * N]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        type_ib(&mut bank, 0, 1.0, &mut rng);
        assert_eq!(bank.row(0), [1, 4, N, 2 * N - 1]);

        let trials = 100_000;
        let mut downs = 0;
        for _ in 0..trials {
            let mut bank = ClauseBank::new(1, 1, N);
            type_ib(&mut bank, 0, 2.0, &mut rng);
            downs += (bank.state(0, 0) == N - 1) as u32;
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((downs as f64 - trials as f64 * 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn type_ii_examples() {
        // x0 absent: literals [x0=0, x1=1, ¬x0=1, ¬x1=0]
        let x = encode(&[1], 2).unwrap();
        let mut bank = ClauseBank::from_states(1, 2, N, vec![N, 7, 3, N + 3]).unwrap();
        type_ii(&mut bank, 0, &x);
        assert_eq!(bank.row(0), [N + 1, 7, 3, N + 3]);
        assert!(bank.is_included(0, 0));
    }

    #[test]
    fn saturated_vote_changes_nothing() {
        let cfg = TmConfig { clauses: 1, threshold: 1, ..Default::default() };
        let mut bank = ClauseBank::new(1, 2, N);
        let mut w = WeightMatrix::from_vec(1, 1, vec![1]).unwrap();
        let x = encode(&[0], 2).unwrap();
        let before = (bank.clone(), w.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = update_for_output(&mut bank, &mut w, 0, &x, true, &cfg, &mut rng);
        assert_eq!(v, 1);
        assert_eq!((bank, w), before);
    }

    #[test]
    fn negative_label_on_positive_clause_gets_type_ii() {
        // weight +1, y = 0, empty clause fires: v = 1 = T so p = (T+v)/2T = 1
        let cfg = TmConfig { clauses: 1, threshold: 1, ..Default::default() };
        let mut bank = ClauseBank::new(1, 2, N);
        let mut w = WeightMatrix::from_vec(1, 1, vec![1]).unwrap();
        let x = encode(&[0], 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        update_for_output(&mut bank, &mut w, 0, &x, false, &cfg, &mut rng);
        assert_eq!(w.get(0, 0), 0);
        // literals with x = 0: x1 and ¬x0
        assert_eq!(bank.row(0), [N, N + 1, N + 1, N]);
    }
}

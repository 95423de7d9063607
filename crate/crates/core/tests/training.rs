mod support;

use omni_tmae::autoencoder::{initialize, training_schedule};
use omni_tmae::tm::{update_for_output, Mode};
use omni_tmae::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn toy_config() -> TmConfig {
    TmConfig {
        clauses: 8,
        threshold: 16,
        specificity: 1.0,
        state_bits: 8,
        epochs: 2,
        number_of_examples: 32,
        accumulation: 2,
        boost_true_positive: true,
        seed: 7,
    }
}

fn replay_config(c: &TmConfig) -> ReplayConfig {
    ReplayConfig {
        clauses: c.clauses,
        threshold: c.threshold as i64,
        s: c.specificity,
        half: c.half_states(),
        epochs: c.epochs,
        examples: c.number_of_examples,
        accumulation: c.accumulation,
        boost: c.boost_true_positive,
        seed: c.seed,
    }
}

fn check_replay(docs: &[Vec<String>], config: &TmConfig) {
    let vocab = build_vocabulary(docs, 1000);
    let index = build_index(docs, &vocab);
    let outputs: Vec<u32> = (0..vocab.len() as u32).collect();
    let model = train(&index, &vocab, &outputs, config).unwrap();
    let (states, weights) = replay_train(index.docs(), vocab.len(), &outputs, &replay_config(config));
    assert_eq!(model.bank.states(), &states[..]);
    assert_eq!(model.weights.as_slice(), &weights[..]);
}

#[test]
fn toy_training_replays_exactly() {
    check_replay(&toy_corpus(), &toy_config());
}

#[test]
fn replay_without_boost_and_with_specificity() {
    let config = TmConfig {
        specificity: 3.5,
        boost_true_positive: false,
        state_bits: 4,
        threshold: 5,
        ..toy_config()
    };
    check_replay(&toy_corpus(), &config);
}

#[test]
fn random_corpora_replay_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..15 {
        let words = rng.random_range(2..8);
        let docs: Vec<Vec<String>> = (0..rng.random_range(3..10))
            .map(|_| (0..rng.random_range(1..4)).map(|_| format!("v{}", rng.random_range(0..words))).collect())
            .collect();
        let vocab = build_vocabulary(&docs, 100);
        let index = build_index(&docs, &vocab);
        // a word in every document cannot be trained on label 0
        if (0..vocab.len() as u32).any(|f| index.doc_frequency(f) == index.num_docs()) {
            continue;
        }
        let config = TmConfig {
            clauses: rng.random_range(1..6),
            threshold: rng.random_range(1..10),
            specificity: rng.random_range(1.0..5.0),
            state_bits: rng.random_range(1..6),
            epochs: rng.random_range(1..3),
            number_of_examples: rng.random_range(1..10),
            accumulation: rng.random_range(1..4),
            boost_true_positive: rng.random(),
            seed: rng.random(),
        };
        check_replay(&docs, &config);
    }
}

#[test]
fn same_seed_same_bytes() {
    let docs = toy_corpus();
    let vocab = build_vocabulary(&docs, 100);
    let index = build_index(&docs, &vocab);
    let outputs: Vec<u32> = (0..vocab.len() as u32).collect();
    let a = train(&index, &vocab, &outputs, &toy_config()).unwrap();
    let b = train(&index, &vocab, &outputs, &toy_config()).unwrap();
    assert_eq!(persist::to_bytes(&a), persist::to_bytes(&b));
    let c = train(&index, &vocab, &outputs, &TmConfig { seed: 8, ..toy_config() }).unwrap();
    assert_ne!(persist::to_bytes(&a), persist::to_bytes(&c));
}

#[test]
fn zero_epochs_is_initialization() {
    let docs = toy_corpus();
    let vocab = build_vocabulary(&docs, 100);
    let index = build_index(&docs, &vocab);
    let outputs: Vec<u32> = (0..vocab.len() as u32).collect();
    let config = TmConfig { epochs: 0, ..toy_config() };
    let model = train(&index, &vocab, &outputs, &config).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (bank, weights) = initialize(vocab.len(), outputs.len(), &config, &mut rng);
    assert_eq!(model.bank, bank);
    assert_eq!(model.weights, weights);
    assert!(model.bank.states().iter().all(|&s| s == 128));
    assert!(model.weights.as_slice().iter().all(|&w| w == 1 || w == -1));
    let m = extract_all(&model);
    assert!((0..m.len()).all(|r| m.row(r).iter().all(|&v| v == 0)));
}

#[test]
fn unsatisfiable_targets_are_named() {
    let docs: Vec<Vec<String>> = vec![vec!["a".into(), "b".into()], vec!["a".into()]];
    let vocab = build_vocabulary(&docs, 10);
    let index = build_index(&docs, &vocab);
    let a = vocab.id("a").unwrap();
    let err = train(&index, &vocab, &[a], &toy_config()).unwrap_err();
    match err {
        Error::SamplingUnsatisfiable { target, label } => {
            assert!(target.contains('a'));
            assert_eq!(label, 0);
        }
        e => panic!("{e}"),
    }
    // a single example only ever asks for label 1
    let one = TmConfig { number_of_examples: 1, ..toy_config() };
    assert!(train(&index, &vocab, &[a], &one).is_ok());
}

#[test]
fn schedule_order_and_labels() {
    let steps: Vec<_> = training_schedule(2, 2, 3).collect();
    assert_eq!(steps.len(), 12);
    let keys: Vec<(usize, usize, usize)> = steps.iter().map(|s| (s.epoch, s.output, s.example)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let labels: Vec<bool> = steps[..3].iter().map(|s| s.label()).collect();
    assert_eq!(labels, [true, false, true]);
}

fn small_machine(seed: u64) -> (ClauseBank, WeightMatrix, InputVector, TmConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c, d) = (rng.random_range(1..8), rng.random_range(1..80));
    let half = 1u16 << rng.random_range(0..5);
    let (states, weights) = random_machine(&mut rng, c, d, 2, half);
    let feats: Vec<u32> = (0..d as u32).filter(|_| rng.random::<bool>()).collect();
    let config = TmConfig {
        clauses: c,
        threshold: rng.random_range(1..12),
        specificity: rng.random_range(1.0..6.0),
        state_bits: half.trailing_zeros() + 1,
        boost_true_positive: rng.random(),
        ..Default::default()
    };
    (
        ClauseBank::from_states(c, d, half, states).unwrap(),
        WeightMatrix::from_vec(c, 2, weights).unwrap(),
        encode(&feats, d).unwrap(),
        config,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn feedback_invariants(seed in any::<u64>(), label in any::<bool>()) {
        let (mut bank, mut weights, x, config) = small_machine(seed);
        let before_bank = bank.clone();
        let before_w = weights.clone();
        let fired = bank.clause_outputs(&x, Mode::Train);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        update_for_output(&mut bank, &mut weights, 1, &x, label, &config, &mut rng);

        let lits = bank.literals();
        let max = 2 * bank.half();
        for (j, &fires) in fired.iter().enumerate() {
            // the other output's column is untouched
            prop_assert_eq!(weights.get(j, 0), before_w.get(j, 0));
            let (w0, w1) = (before_w.get(j, 1), weights.get(j, 1));
            prop_assert!((w1 - w0).abs() <= 1);
            if !fires {
                prop_assert_eq!(w0, w1);
            } else if w1 != w0 {
                prop_assert_eq!(w1 - w0, if label { 1 } else { -1 });
            }
            let type_one = (w0 >= 0) == label;
            for l in 0..lits {
                let (a, b) = (before_bank.state(j, l), bank.state(j, l));
                prop_assert!((1..=max).contains(&b));
                prop_assert!((a as i32 - b as i32).abs() <= 1);
                prop_assert_eq!(bank.is_included(j, l), b > bank.half());
                if !type_one {
                    // Type II or nothing: only excluded zero literals rise
                    prop_assert!(b >= a);
                    if b > a {
                        prop_assert!(fires && !x.literal(l) && a <= bank.half());
                    }
                } else if !fires {
                    prop_assert!(b <= a);
                } else if x.literal(l) {
                    prop_assert!(b >= a);
                } else {
                    prop_assert!(b <= a);
                }
            }
        }
    }

    #[test]
    fn saturated_votes_skip_updates(seed in any::<u64>()) {
        let (mut bank, mut weights, x, config) = small_machine(seed);
        let vote = omni_tmae::tm::vote_sum(&bank, &weights, 1, &x, Mode::Train, config.threshold);
        let label = if vote == config.threshold as i32 {
            true
        } else if vote == -(config.threshold as i32) {
            false
        } else {
            return Ok(());
        };
        let (b0, w0) = (bank.clone(), weights.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        update_for_output(&mut bank, &mut weights, 1, &x, label, &config, &mut rng);
        prop_assert_eq!(bank, b0);
        prop_assert_eq!(weights, w0);
    }
}

fn small_config(seed: u64) -> TmConfig {
    TmConfig {
        clauses: 32,
        threshold: 200,
        specificity: 1.0,
        state_bits: 8,
        epochs: 4,
        number_of_examples: 200,
        accumulation: 4,
        boost_true_positive: true,
        seed,
    }
}

#[test]
fn constant_context_outweighs_absent_word() {
    let mut passes = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 500);
        let docs: Vec<Vec<String>> = (0..60)
            .map(|i| {
                let mut d: Vec<String> = (0..3).map(|_| format!("f{}", rng.random_range(0..20))).collect();
                match i % 4 {
                    0 => d.extend(["alpha".into(), "beta".into()]),
                    1 => d.push("zeta".into()),
                    2 => d.push("beta".into()),
                    _ => {}
                }
                d
            })
            .collect();
        let vocab = build_vocabulary(&docs, 100);
        let index = build_index(&docs, &vocab);
        let a = vocab.id("alpha").unwrap();
        let model = train(&index, &vocab, &[a], &small_config(seed)).unwrap();
        let e = extract_embedding(&model, 0).values;
        if e[vocab.id("beta").unwrap() as usize] > e[vocab.id("zeta").unwrap() as usize] {
            passes += 1;
        }
    }
    assert!(passes >= 18, "{passes}/20");
}
